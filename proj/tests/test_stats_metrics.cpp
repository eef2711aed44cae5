#include <gtest/gtest.h>

#include <cmath>

#include "gazelink/distributions.hpp"
#include "gazelink/metrics.hpp"
#include "reference_values.hpp"

namespace gazelink {
namespace {

// ---------------------------------------------------------------------------
// distributions
// ---------------------------------------------------------------------------

TEST(IncompleteBeta, ClosedForms) {
    EXPECT_NEAR(stats::regularized_incomplete_beta(2, 3, 0.5), 0.6875, 1e-14);
    EXPECT_NEAR(stats::regularized_incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
    EXPECT_NEAR(stats::regularized_incomplete_beta(3, 1, 0.4), 0.064, 1e-14);
    EXPECT_NEAR(stats::regularized_incomplete_beta(1, 4, 0.2), 1 - std::pow(0.8, 4), 1e-14);
    EXPECT_EQ(stats::regularized_incomplete_beta(2, 2, 0.0), 0.0);
    EXPECT_EQ(stats::regularized_incomplete_beta(2, 2, 1.0), 1.0);
    // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    EXPECT_NEAR(stats::regularized_incomplete_beta(4.5, 0.5, 0.7), 1 - stats::regularized_incomplete_beta(0.5, 4.5, 0.3), 1e-13);
}

TEST(StudentT, MatchesReferenceTable) {
    for (const auto& r : reference::kStudentT) {
        EXPECT_NEAR(stats::student_t_two_tailed_p(r.t, r.df), r.p_two_tailed, 1e-9) << "t=" << r.t << " df=" << r.df;
        EXPECT_NEAR(stats::student_t_two_tailed_p(-r.t, r.df), r.p_two_tailed, 1e-9);
    }
}

TEST(StudentT, CdfProperties) {
    EXPECT_DOUBLE_EQ(stats::student_t_cdf(0, 7), 0.5);
    EXPECT_NEAR(stats::student_t_cdf(2.0, 3) + stats::student_t_cdf(-2.0, 3), 1.0, 1e-14);
    for (int df : {1, 2, 9, 50}) {
        EXPECT_DOUBLE_EQ(stats::student_t_two_tailed_p(0, df), 1.0);
        double last = 1.0;
        for (double t = 0.25; t < 12; t += 0.25) {
            const double p = stats::student_t_two_tailed_p(t, df);
            EXPECT_LT(p, last);
            last = p;
        }
    }
}

TEST(StudentT, NineDegreesOfFreedomAnchor) { EXPECT_NEAR(stats::student_t_two_tailed_p(4.3, 9), 0.002, 0.0005); }

TEST(FisherF, MatchesReferenceTable) {
    for (const auto& r : reference::kFisherF) {
        EXPECT_NEAR(stats::f_upper_tail_p(r.f, r.d1, r.d2), r.p_upper, 1e-9) << "F=" << r.f << " (" << r.d1 << "," << r.d2 << ")";
    }
    EXPECT_EQ(stats::f_upper_tail_p(-1, 2, 3), 1.0);
    EXPECT_EQ(stats::f_upper_tail_p(INFINITY, 2, 3), 0.0);
}

// ---------------------------------------------------------------------------
// hit rates
// ---------------------------------------------------------------------------

Utterance stmt(std::string id, std::set<std::string> mentions, Sentiment s = Sentiment::positive) {
    return {std::move(id), "tester", 0, 1000, "", s, std::move(mentions)};
}

LinkRecord link(std::string u, std::string a, Modality m = Modality::gaze) { return {u, a, m, {{0, 10}}, 10}; }

TEST(HitSets, Intersection) {
    const std::vector<LinkRecord> links{link("u", "A"), link("u", "C"), link("u", "B", Modality::mouse), link("v", "B")};
    auto h = hit_sets(stmt("u", {"A", "B"}), links, Modality::gaze);
    EXPECT_EQ(h.hit, (std::set<std::string>{"A"}));
    EXPECT_EQ(h.mentioned, (std::set<std::string>{"A", "B"}));
    EXPECT_TRUE(hit_sets(stmt("u", {"A"}), {}, Modality::gaze).hit.empty());
    const std::vector<LinkRecord> all{link("u", "A"), link("u", "B"), link("u", "C"), link("u", "D")};
    EXPECT_EQ(hit_sets(stmt("u", {"A", "B", "C"}), all, Modality::gaze).hit, (std::set<std::string>{"A", "B", "C"}));
    EXPECT_THROW(hit_sets(stmt("u", {}), links, Modality::gaze), ValidationError);
}

Session two_statement_session() {
    Session s;
    s.subject_id = "s1";
    s.utterances = {stmt("u1", {"A", "B"}), stmt("u2", {"C", "D", "E", "F", "G", "H", "I", "J"}, Sentiment::negative)};
    return s;
}

TEST(HitRate, SingleStatementHalf) {
    Session s;
    s.subject_id = "s";
    s.utterances = {stmt("u", {"A", "B"})};
    const std::vector<LinkRecord> links{link("u", "A")};
    EXPECT_DOUBLE_EQ(hit_rate(s, links, Modality::gaze, Aggregation::micro).rate, 50.0);
    EXPECT_DOUBLE_EQ(hit_rate(s, links, Modality::gaze, Aggregation::macro).rate, 50.0);
}

TEST(HitRate, MicroAndMacroDiffer) {
    const Session s = two_statement_session();
    const std::vector<LinkRecord> links{link("u1", "A"), link("u1", "B")};
    const auto micro = hit_rate(s, links, Modality::gaze, Aggregation::micro);
    EXPECT_DOUBLE_EQ(micro.rate, 20.0);
    EXPECT_EQ(micro.mentioned_total, 10u);
    EXPECT_EQ(micro.hit_total, 2u);
    EXPECT_DOUBLE_EQ(hit_rate(s, links, Modality::gaze, Aggregation::macro).rate, 50.0);
}

TEST(HitRate, NoRateableStatements) {
    Session s;
    s.utterances = {stmt("u", {})};
    EXPECT_THROW(hit_rate(s, {}, Modality::gaze, Aggregation::micro), ValidationError);
}

TEST(HitRate, MicroIsInvariantUnderSplittingAStatement) {
    Session whole;
    whole.utterances = {stmt("u", {"A", "B", "C", "D"})};
    Session split;
    split.utterances = {stmt("u", {"A", "B"}), stmt("v", {"C", "D"})};
    const std::vector<LinkRecord> lw{link("u", "A"), link("u", "C")};
    const std::vector<LinkRecord> ls{link("u", "A"), link("v", "C")};
    EXPECT_DOUBLE_EQ(hit_rate(whole, lw, Modality::gaze, Aggregation::micro).rate,
                     hit_rate(split, ls, Modality::gaze, Aggregation::micro).rate);
}

TEST(HitRateBySentiment, MissingCellsAndRecomposition) {
    const Session s = two_statement_session();
    const std::vector<LinkRecord> links{link("u1", "A"), link("u2", "C"), link("u2", "D")};
    const auto cells = hit_rate_by_sentiment(s, links, Modality::gaze, Aggregation::micro);
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[0].sentiment, Sentiment::positive);
    ASSERT_TRUE(cells[0].result && cells[1].result);
    EXPECT_FALSE(cells[2].result);
    EXPECT_FALSE(cells[3].result);
    const std::size_t hits = cells[0].result->hit_total + cells[1].result->hit_total;
    const std::size_t mentions = cells[0].result->mentioned_total + cells[1].result->mentioned_total;
    EXPECT_DOUBLE_EQ(100.0 * hits / mentions, hit_rate(s, links, Modality::gaze, Aggregation::micro).rate);
}

TEST(HitRateBySentiment, CellCountsFollowAnnotations) {
    Session s;
    int k = 0;
    auto add = [&](Sentiment sent, int n) {
        for (int i = 0; i < n; ++i) s.utterances.push_back(stmt("u" + std::to_string(k++), {"A"}, sent));
    };
    add(Sentiment::positive, 10);
    add(Sentiment::negative, 6);
    add(Sentiment::neutral, 7);
    const auto cells = hit_rate_by_sentiment(s, {}, Modality::gaze, Aggregation::micro);
    EXPECT_EQ(cells[0].result->statements, 10u);
    EXPECT_EQ(cells[1].result->statements, 6u);
    EXPECT_EQ(cells[2].result->statements, 7u);
}

// ---------------------------------------------------------------------------
// paired t-test
// ---------------------------------------------------------------------------

TEST(PairedT, HandExample) {
    const std::vector<double> a{1, 2, 3}, b{0, 1, 1};
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.t, 4.0, 1e-12);
    EXPECT_EQ(r.df, 2);
    EXPECT_NEAR(r.p_two_tailed, 0.05719095841793663, 1e-9);
    EXPECT_DOUBLE_EQ(r.mean_a, 2.0);
    EXPECT_NEAR(r.mean_b, 2.0 / 3.0, 1e-15);
}

TEST(PairedT, DegenerateInputs) {
    const std::vector<double> a{1, 2, 3};
    EXPECT_THROW(paired_t_test(a, a), ValidationError);
    EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), ValidationError);
    EXPECT_THROW(paired_t_test(a, std::vector<double>{1, 2}), ValidationError);
}

TEST(PairedT, AntisymmetryAndLocationInvariance) {
    const std::vector<double> a{66, 70, 61, 64, 72, 59, 68}, b{41, 38, 45, 33, 47, 40, 36};
    const auto r = paired_t_test(a, b);
    const auto swapped = paired_t_test(b, a);
    EXPECT_DOUBLE_EQ(swapped.t, -r.t);
    EXPECT_DOUBLE_EQ(swapped.p_two_tailed, r.p_two_tailed);
    std::vector<double> a2 = a, b2 = b;
    for (auto& v : a2) v += 12.5;
    for (auto& v : b2) v += 12.5;
    EXPECT_NEAR(paired_t_test(a2, b2).t, r.t, 1e-9);
}

// ---------------------------------------------------------------------------
// ANOVA
// ---------------------------------------------------------------------------

using Cells = std::vector<std::vector<std::vector<std::optional<double>>>>;

Cells reference_cells() {
    Cells c(3, std::vector<std::vector<std::optional<double>>>(3, std::vector<std::optional<double>>(2)));
    for (int s = 0; s < 3; ++s)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) c[s][i][j] = reference::kAnovaCells[s][i][j];
    return c;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

TEST(Anova, MatchesReferenceFixture) {
    const std::vector<std::string> subjects{"s1", "s2", "s3"};
    const auto r = rm_anova_2x3(subjects, reference_cells());
    EXPECT_LT(rel(r.factor_a.f, reference::kAnovaSentimentF), 1e-9);
    EXPECT_LT(rel(r.factor_b.f, reference::kAnovaModalityF), 1e-9);
    EXPECT_LT(rel(r.interaction.f, reference::kAnovaInteractionF), 1e-9);
    EXPECT_NEAR(r.factor_a.p, reference::kAnovaSentimentP, 1e-9);
    EXPECT_NEAR(r.factor_b.p, reference::kAnovaModalityP, 1e-9);
    EXPECT_NEAR(r.interaction.p, reference::kAnovaInteractionP, 1e-9);
    EXPECT_EQ(r.factor_a.df_effect, 2);
    EXPECT_EQ(r.factor_a.df_error, 4);
    EXPECT_EQ(r.factor_b.df_error, 2);
    const auto& s = r.sums;
    const double parts = s.subjects + s.a + s.b + s.ab + s.a_by_subject + s.b_by_subject + s.ab_by_subject;
    EXPECT_LT(rel(parts, s.total), 1e-9);
}

TEST(Anova, EqualValuesGiveZeroF) {
    Cells c(10, std::vector<std::vector<std::optional<double>>>(3, std::vector<std::optional<double>>(2, 55.0)));
    std::vector<std::string> ids;
    for (int s = 0; s < 10; ++s) ids.push_back("s" + std::to_string(s));
    const auto r = rm_anova_2x3(ids, c);
    EXPECT_EQ(r.factor_a.f, 0.0);
    EXPECT_EQ(r.factor_b.f, 0.0);
    EXPECT_EQ(r.interaction.f, 0.0);
    EXPECT_EQ(r.factor_a.p, 1.0);
}

TEST(Anova, TenSubjectDegreesOfFreedom) {
    Cells c(10, std::vector<std::vector<std::optional<double>>>(3, std::vector<std::optional<double>>(2)));
    std::vector<std::string> ids;
    for (int s = 0; s < 10; ++s) {
        ids.push_back("s" + std::to_string(s));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) c[s][i][j] = 40 + 7 * i + 20 * j + ((s * 13 + i * 5 + j * 3) % 11);
    }
    const auto r = rm_anova_2x3(ids, c);
    EXPECT_EQ(std::make_pair(r.factor_a.df_effect, r.factor_a.df_error), std::make_pair(2, 18));
    EXPECT_EQ(std::make_pair(r.factor_b.df_effect, r.factor_b.df_error), std::make_pair(1, 9));
    EXPECT_EQ(std::make_pair(r.interaction.df_effect, r.interaction.df_error), std::make_pair(2, 18));
}

TEST(Anova, MissingCellIsNamedOrDropped) {
    auto c = reference_cells();
    c.push_back(c[0]);
    c[3][1][0].reset();
    const std::vector<std::string> ids{"s1", "s2", "s3", "s4"};
    try {
        rm_anova_2x3(ids, c);
        FAIL();
    } catch (const MissingCellError& e) {
        EXPECT_NE(std::string(e.what()).find("s4"), std::string::npos) << e.what();
    }
    const auto r = rm_anova_2x3(ids, c, true);
    EXPECT_EQ(r.dropped_subjects, std::vector<std::string>{"s4"});
    EXPECT_LT(rel(r.factor_a.f, reference::kAnovaSentimentF), 1e-9);
}

// ---------------------------------------------------------------------------
// study summary
// ---------------------------------------------------------------------------

TEST(Describe, MeanAndStandardError) {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const auto d = describe(v);
    EXPECT_EQ(d.n, 8u);
    EXPECT_DOUBLE_EQ(d.mean, 5.0);
    EXPECT_NEAR(d.se, std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-12);
    EXPECT_EQ(describe(std::vector<double>{3}).se, 0.0);
}

TEST(Summary, SingleSessionMarksTestsUnavailable) {
    const Session s = two_statement_session();
    const std::vector<LinkRecord> links{link("u1", "A"), link("u2", "C", Modality::mouse)};
    const SessionLinks sl{&s, links};
    const auto r = summarize_study(std::span<const SessionLinks>(&sl, 1), PipelineConfig{});
    ASSERT_EQ(r.subjects.size(), 1u);
    EXPECT_DOUBLE_EQ(r.subjects[0].gaze->rate, 10.0);
    EXPECT_DOUBLE_EQ(r.subjects[0].mouse->rate, 10.0);
    EXPECT_FALSE(r.t_test);
    EXPECT_FALSE(r.t_test_unavailable.empty());
    EXPECT_FALSE(r.anova);
    EXPECT_FALSE(r.anova_unavailable.empty());
    const auto text = format_report(r);
    EXPECT_NE(text.find("s1"), std::string::npos);
    EXPECT_EQ(text, format_report(summarize_study(std::span<const SessionLinks>(&sl, 1), PipelineConfig{})));
}

TEST(Summary, SessionsOfOneSubjectArePooled) {
    Session a = two_statement_session();
    a.stimulus_id = "p1";
    Session b;
    b.subject_id = "s1";
    b.stimulus_id = "p2";
    b.utterances = {stmt("u1", {"X", "Y"})};
    const std::vector<LinkRecord> la{link("u1", "A")}, lb{link("u1", "X"), link("u1", "Y")};
    const std::vector<SessionLinks> sl{{&b, lb}, {&a, la}};
    const auto r = summarize_study(sl, PipelineConfig{});
    ASSERT_EQ(r.subjects.size(), 1u);
    EXPECT_EQ(r.subjects[0].gaze->mentioned_total, 12u);
    EXPECT_EQ(r.subjects[0].gaze->hit_total, 3u);
    EXPECT_DOUBLE_EQ(r.subjects[0].gaze->rate, 25.0);
}

}  // namespace
}  // namespace gazelink
