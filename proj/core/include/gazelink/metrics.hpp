#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gazelink/config.hpp"
#include "gazelink/error.hpp"
#include "gazelink/linking.hpp"
#include "gazelink/model.hpp"

namespace gazelink {

// ---------------------------------------------------------------------------
// Hit rates
// ---------------------------------------------------------------------------

struct HitSets {
    std::set<std::string> mentioned;
    std::set<std::string> hit;
};

/// mentioned = the utterance's mentioned AOIs; hit = mentioned AOIs that carry a
/// link of `modality` for this utterance. Throws ValidationError for an excluded utterance.
HitSets hit_sets(const Utterance& utterance, std::span<const LinkRecord> links, Modality modality);

/// Per-statement counts, the unit both aggregations start from.
struct StatementHits {
    std::string utterance_id;
    Sentiment sentiment = Sentiment::unlabeled;
    std::size_t mentioned = 0;
    std::size_t hit = 0;
};

/// One entry per non-excluded utterance, in session order.
std::vector<StatementHits> statement_hits(const Session& session, std::span<const LinkRecord> links,
                                          Modality modality);

struct HitRateResult {
    std::string subject_id;
    Modality modality = Modality::gaze;
    Aggregation aggregation = Aggregation::micro;
    std::size_t statements = 0;
    std::size_t mentioned_total = 0;
    std::size_t hit_total = 0;
    double rate = 0.0;  // percent
    bool operator==(const HitRateResult&) const = default;
};

/// Throws ValidationError("no rateable statements") when `statements` is empty.
HitRateResult aggregate_hits(const std::string& subject_id, Modality modality, Aggregation aggregation,
                             std::span<const StatementHits> statements);

HitRateResult hit_rate(const Session& session, std::span<const LinkRecord> links, Modality modality,
                       Aggregation aggregation);

struct SentimentCell {
    Sentiment sentiment = Sentiment::unlabeled;
    std::optional<HitRateResult> result;  // nullopt: no statements of this sentiment
    bool operator==(const SentimentCell&) const = default;
};

/// Cells for positive, negative, neutral and unlabeled, in that order.
std::vector<SentimentCell> hit_rate_by_sentiment(const Session& session, std::span<const LinkRecord> links,
                                                 Modality modality, Aggregation aggregation);

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

struct TTestResult {
    double t = 0.0;
    int df = 0;
    double p_two_tailed = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double se_a = 0.0;
    double se_b = 0.0;
    bool operator==(const TTestResult&) const = default;
};

/// Paired-sample t-test on a - b. Throws ValidationError when n < 2, the sizes
/// differ, or the differences have zero variance ("degenerate pairs").
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct AnovaEffect {
    std::string name;
    double ss = 0.0;
    double ss_error = 0.0;
    int df_effect = 0;
    int df_error = 0;
    double f = 0.0;
    double p = 1.0;
    bool operator==(const AnovaEffect&) const = default;
};

/// Sums of squares of the two-factor repeated-measures partition.
struct AnovaSums {
    double total = 0.0;
    double subjects = 0.0;
    double a = 0.0;
    double b = 0.0;
    double ab = 0.0;
    double a_by_subject = 0.0;
    double b_by_subject = 0.0;
    double ab_by_subject = 0.0;
    bool operator==(const AnovaSums&) const = default;
};

struct AnovaResult {
    AnovaEffect factor_a;
    AnovaEffect factor_b;
    AnovaEffect interaction;
    AnovaSums sums;
    std::size_t subjects = 0;
    std::vector<std::string> dropped_subjects;
    bool operator==(const AnovaResult&) const = default;
};

/// Fully crossed within-subject table, values[(s * levels_a + i) * levels_b + j].
struct RepeatedMeasuresTable {
    std::vector<std::string> subjects;
    std::vector<std::string> a_levels;
    std::vector<std::string> b_levels;
    std::vector<std::optional<double>> values;

    std::optional<double>& at(std::size_t s, std::size_t i, std::size_t j);
    const std::optional<double>& at(std::size_t s, std::size_t i, std::size_t j) const;
};

/// Thrown for an incomplete design; names the first missing cell.
class MissingCellError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Removes subjects with any missing cell; their ids are returned in `dropped`.
RepeatedMeasuresTable drop_incomplete_subjects(const RepeatedMeasuresTable& table, std::vector<std::string>* dropped);

/// Two-factor within-subject ANOVA; each effect is tested against its
/// effect-by-subject interaction. No sphericity correction.
AnovaResult rm_anova_two_factor(const RepeatedMeasuresTable& table, std::string name_a = "A",
                                std::string name_b = "B");

/// Sentiment (positive, negative, neutral) x modality (gaze, mouse) design.
/// cells[s][sentiment][modality].
AnovaResult rm_anova_2x3(std::span<const std::string> subjects,
                         const std::vector<std::vector<std::vector<std::optional<double>>>>& cells,
                         bool drop_incomplete = false);

// ---------------------------------------------------------------------------
// Study report
// ---------------------------------------------------------------------------

struct Descriptive {
    std::size_t n = 0;
    double mean = 0.0;
    double se = 0.0;  // sample sd / sqrt(n); 0 when n < 2
    bool operator==(const Descriptive&) const = default;
};

Descriptive describe(std::span<const double> values);

struct SubjectReport {
    std::string subject_id;
    std::optional<HitRateResult> gaze;
    std::optional<HitRateResult> mouse;
    std::vector<SentimentCell> gaze_by_sentiment;
    std::vector<SentimentCell> mouse_by_sentiment;
    bool operator==(const SubjectReport&) const = default;
};

struct CohortCell {
    Sentiment sentiment = Sentiment::unlabeled;
    Modality modality = Modality::gaze;
    Descriptive stats;
    bool operator==(const CohortCell&) const = default;
};

struct StudyReport {
    std::vector<SubjectReport> subjects;
    Descriptive gaze;
    Descriptive mouse;
    std::vector<CohortCell> cells;
    std::optional<TTestResult> t_test;
    std::string t_test_unavailable;
    std::optional<AnovaResult> anova;
    std::string anova_unavailable;
    PipelineConfig config;
    bool operator==(const StudyReport&) const = default;
};

struct SessionLinks {
    const Session* session = nullptr;
    std::span<const LinkRecord> links;
};

/// Groups sessions by subject (sorted by subject id), pools each subject's
/// statements, and runs the gaze-vs-mouse t-test and the sentiment x modality ANOVA.
/// Unavailable tests carry a reason instead of failing the report.
StudyReport summarize_study(std::span<const SessionLinks> sessions, const PipelineConfig& config);

/// Plain-text table for terminals.
std::string format_report(const StudyReport& report);

}  // namespace gazelink
