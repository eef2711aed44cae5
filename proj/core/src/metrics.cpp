#include "gazelink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "gazelink/distributions.hpp"
#include "gazelink/error.hpp"

namespace gazelink {

namespace {

constexpr Sentiment kCellSentiments[] = {Sentiment::positive, Sentiment::negative, Sentiment::neutral,
                                         Sentiment::unlabeled};
constexpr Sentiment kAnovaSentiments[] = {Sentiment::positive, Sentiment::negative, Sentiment::neutral};
constexpr Modality kModalities[] = {Modality::gaze, Modality::mouse};

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

AnovaEffect make_effect(std::string name, double ss, double ss_error, int df_effect, int df_error) {
    AnovaEffect e{std::move(name), ss, ss_error, df_effect, df_error, 0.0, 1.0};
    const double ms_error = ss_error / df_error;
    const double ms_effect = ss / df_effect;
    if (ms_error > 0.0) {
        e.f = ms_effect / ms_error;
        e.p = stats::f_upper_tail_p(e.f, df_effect, df_error);
    } else if (ms_effect > 0.0) {
        e.f = std::numeric_limits<double>::infinity();
        e.p = 0.0;
    }
    return e;
}

}  // namespace

HitSets hit_sets(const Utterance& utterance, std::span<const LinkRecord> links, Modality modality) {
    if (utterance.excluded()) {
        throw ValidationError("utterance '" + utterance.id + "' mentions no AOI and is excluded from hit rates");
    }
    HitSets out;
    out.mentioned = utterance.mentioned_aois;
    for (const auto& l : links) {
        if (l.utterance_id == utterance.id && l.modality == modality && out.mentioned.contains(l.aoi_id)) {
            out.hit.insert(l.aoi_id);
        }
    }
    return out;
}

std::vector<StatementHits> statement_hits(const Session& session, std::span<const LinkRecord> links,
                                          Modality modality) {
    std::map<std::string, std::set<std::string>, std::less<>> linked;
    for (const auto& l : links) {
        if (l.modality == modality) linked[l.utterance_id].insert(l.aoi_id);
    }
    std::vector<StatementHits> out;
    for (const auto& u : session.utterances) {
        if (u.excluded()) continue;
        StatementHits s{u.id, u.sentiment, u.mentioned_aois.size(), 0};
        if (auto it = linked.find(u.id); it != linked.end()) {
            for (const auto& aoi : u.mentioned_aois) s.hit += it->second.contains(aoi) ? 1 : 0;
        }
        out.push_back(std::move(s));
    }
    return out;
}

HitRateResult aggregate_hits(const std::string& subject_id, Modality modality, Aggregation aggregation,
                             std::span<const StatementHits> statements) {
    if (statements.empty()) throw ValidationError("no rateable statements");
    HitRateResult r{subject_id, modality, aggregation, statements.size(), 0, 0, 0.0};
    double rate_sum = 0.0;
    for (const auto& s : statements) {
        r.mentioned_total += s.mentioned;
        r.hit_total += s.hit;
        rate_sum += 100.0 * static_cast<double>(s.hit) / static_cast<double>(s.mentioned);
    }
    r.rate = aggregation == Aggregation::micro
                 ? 100.0 * static_cast<double>(r.hit_total) / static_cast<double>(r.mentioned_total)
                 : rate_sum / static_cast<double>(statements.size());
    return r;
}

HitRateResult hit_rate(const Session& session, std::span<const LinkRecord> links, Modality modality,
                       Aggregation aggregation) {
    const auto statements = statement_hits(session, links, modality);
    return aggregate_hits(session.subject_id, modality, aggregation, statements);
}

namespace {

std::vector<SentimentCell> cells_from(const std::string& subject_id, std::span<const StatementHits> statements,
                                      Modality modality, Aggregation aggregation) {
    std::vector<SentimentCell> cells;
    for (const auto sentiment : kCellSentiments) {
        std::vector<StatementHits> subset;
        std::copy_if(statements.begin(), statements.end(), std::back_inserter(subset),
                     [&](const StatementHits& s) { return s.sentiment == sentiment; });
        SentimentCell cell{sentiment, std::nullopt};
        if (!subset.empty()) cell.result = aggregate_hits(subject_id, modality, aggregation, subset);
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace

std::vector<SentimentCell> hit_rate_by_sentiment(const Session& session, std::span<const LinkRecord> links,
                                                 Modality modality, Aggregation aggregation) {
    const auto statements = statement_hits(session, links, modality);
    if (statements.empty()) throw ValidationError("no rateable statements");
    return cells_from(session.subject_id, statements, modality, aggregation);
}

// ---------------------------------------------------------------------------

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("paired t-test: samples differ in size");
    const std::size_t n = a.size();
    if (n < 2) throw ValidationError("paired t-test: at least 2 pairs required");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    const double md = mean_of(d);
    const double sd = sample_sd(d, md);
    if (!(sd > 0.0)) throw ValidationError("paired t-test: degenerate pairs (differences have zero variance)");
    const double root_n = std::sqrt(static_cast<double>(n));

    TTestResult r;
    r.t = md / (sd / root_n);
    r.df = static_cast<int>(n) - 1;
    r.p_two_tailed = stats::student_t_two_tailed_p(r.t, r.df);
    r.mean_a = mean_of(a);
    r.mean_b = mean_of(b);
    r.se_a = sample_sd(a, r.mean_a) / root_n;
    r.se_b = sample_sd(b, r.mean_b) / root_n;
    return r;
}

std::optional<double>& RepeatedMeasuresTable::at(std::size_t s, std::size_t i, std::size_t j) {
    return values.at((s * a_levels.size() + i) * b_levels.size() + j);
}

const std::optional<double>& RepeatedMeasuresTable::at(std::size_t s, std::size_t i, std::size_t j) const {
    return values.at((s * a_levels.size() + i) * b_levels.size() + j);
}

RepeatedMeasuresTable drop_incomplete_subjects(const RepeatedMeasuresTable& table, std::vector<std::string>* dropped) {
    RepeatedMeasuresTable out{{}, table.a_levels, table.b_levels, {}};
    const std::size_t per_subject = table.a_levels.size() * table.b_levels.size();
    for (std::size_t s = 0; s < table.subjects.size(); ++s) {
        const auto first = table.values.begin() + static_cast<std::ptrdiff_t>(s * per_subject);
        const auto last = first + static_cast<std::ptrdiff_t>(per_subject);
        if (std::all_of(first, last, [](const std::optional<double>& v) { return v.has_value(); })) {
            out.subjects.push_back(table.subjects[s]);
            out.values.insert(out.values.end(), first, last);
        } else if (dropped) {
            dropped->push_back(table.subjects[s]);
        }
    }
    return out;
}

AnovaResult rm_anova_two_factor(const RepeatedMeasuresTable& table, std::string name_a, std::string name_b) {
    const std::size_t S = table.subjects.size();
    const std::size_t A = table.a_levels.size();
    const std::size_t B = table.b_levels.size();
    if (A < 2 || B < 2) throw ValidationError("ANOVA: each factor needs at least 2 levels");
    if (table.values.size() != S * A * B) throw ValidationError("ANOVA: table size does not match its dimensions");
    if (S < 2) throw ValidationError("ANOVA: at least 2 subjects required");
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t i = 0; i < A; ++i) {
            for (std::size_t j = 0; j < B; ++j) {
                if (!table.at(s, i, j)) {
                    throw MissingCellError("ANOVA: subject '" + table.subjects[s] + "' has no value for cell (" +
                                           table.a_levels[i] + ", " + table.b_levels[j] +
                                           "); drop incomplete subjects to proceed");
                }
            }
        }
    }
    auto y = [&](std::size_t s, std::size_t i, std::size_t j) { return *table.at(s, i, j); };

    const double dS = static_cast<double>(S), dA = static_cast<double>(A), dB = static_cast<double>(B);
    double grand = 0.0;
    std::vector<double> m_s(S, 0.0), m_a(A, 0.0), m_b(B, 0.0), m_ab(A * B, 0.0), m_sa(S * A, 0.0), m_sb(S * B, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t i = 0; i < A; ++i) {
            for (std::size_t j = 0; j < B; ++j) {
                const double v = y(s, i, j);
                grand += v;
                m_s[s] += v;
                m_a[i] += v;
                m_b[j] += v;
                m_ab[i * B + j] += v;
                m_sa[s * A + i] += v;
                m_sb[s * B + j] += v;
            }
        }
    }
    grand /= dS * dA * dB;
    for (auto& v : m_s) v /= dA * dB;
    for (auto& v : m_a) v /= dS * dB;
    for (auto& v : m_b) v /= dS * dA;
    for (auto& v : m_ab) v /= dS;
    for (auto& v : m_sa) v /= dB;
    for (auto& v : m_sb) v /= dA;

    auto sq = [](double x) { return x * x; };
    AnovaSums ss;
    for (std::size_t s = 0; s < S; ++s) {
        ss.subjects += dA * dB * sq(m_s[s] - grand);
        for (std::size_t i = 0; i < A; ++i) ss.a_by_subject += dB * sq(m_sa[s * A + i] - m_s[s] - m_a[i] + grand);
        for (std::size_t j = 0; j < B; ++j) ss.b_by_subject += dA * sq(m_sb[s * B + j] - m_s[s] - m_b[j] + grand);
        for (std::size_t i = 0; i < A; ++i) {
            for (std::size_t j = 0; j < B; ++j) {
                const double v = y(s, i, j);
                ss.total += sq(v - grand);
                ss.ab_by_subject += sq(v - m_ab[i * B + j] - m_sa[s * A + i] - m_sb[s * B + j] + m_a[i] + m_b[j] +
                                       m_s[s] - grand);
            }
        }
    }
    for (std::size_t i = 0; i < A; ++i) ss.a += dS * dB * sq(m_a[i] - grand);
    for (std::size_t j = 0; j < B; ++j) ss.b += dS * dA * sq(m_b[j] - grand);
    for (std::size_t i = 0; i < A; ++i) {
        for (std::size_t j = 0; j < B; ++j) ss.ab += dS * sq(m_ab[i * B + j] - m_a[i] - m_b[j] + grand);
    }

    const int df_a = static_cast<int>(A) - 1;
    const int df_b = static_cast<int>(B) - 1;
    const int df_s = static_cast<int>(S) - 1;
    AnovaResult r;
    r.subjects = S;
    r.sums = ss;
    r.factor_a = make_effect(name_a, ss.a, ss.a_by_subject, df_a, df_a * df_s);
    r.factor_b = make_effect(name_b, ss.b, ss.b_by_subject, df_b, df_b * df_s);
    r.interaction = make_effect(name_a + " x " + name_b, ss.ab, ss.ab_by_subject, df_a * df_b, df_a * df_b * df_s);
    return r;
}

AnovaResult rm_anova_2x3(std::span<const std::string> subjects,
                         const std::vector<std::vector<std::vector<std::optional<double>>>>& cells,
                         bool drop_incomplete) {
    if (cells.size() != subjects.size()) throw ValidationError("ANOVA: one cell block per subject required");
    RepeatedMeasuresTable table{{subjects.begin(), subjects.end()},
                                {"positive", "negative", "neutral"},
                                {"gaze", "mouse"},
                                {}};
    for (std::size_t s = 0; s < subjects.size(); ++s) {
        if (cells[s].size() != 3) throw ValidationError("ANOVA: subject '" + subjects[s] + "' needs 3 sentiment rows");
        for (const auto& row : cells[s]) {
            if (row.size() != 2) throw ValidationError("ANOVA: subject '" + subjects[s] + "' needs 2 modality columns");
            table.values.insert(table.values.end(), row.begin(), row.end());
        }
    }
    std::vector<std::string> dropped;
    if (drop_incomplete) table = drop_incomplete_subjects(table, &dropped);
    auto r = rm_anova_two_factor(table, "sentiment", "modality");
    r.dropped_subjects = std::move(dropped);
    return r;
}

// ---------------------------------------------------------------------------

Descriptive describe(std::span<const double> values) {
    Descriptive d;
    d.n = values.size();
    if (d.n == 0) return d;
    d.mean = mean_of(values);
    d.se = d.n < 2 ? 0.0 : sample_sd(values, d.mean) / std::sqrt(static_cast<double>(d.n));
    return d;
}

StudyReport summarize_study(std::span<const SessionLinks> sessions, const PipelineConfig& config) {
    StudyReport report;
    report.config = config;

    std::map<std::string, std::vector<const SessionLinks*>> by_subject;
    for (const auto& s : sessions) by_subject[s.session->subject_id].push_back(&s);

    for (auto& [subject, list] : by_subject) {
        std::stable_sort(list.begin(), list.end(), [](const SessionLinks* a, const SessionLinks* b) {
            return a->session->stimulus_id < b->session->stimulus_id;
        });
        SubjectReport sr;
        sr.subject_id = subject;
        for (const auto modality : kModalities) {
            std::vector<StatementHits> statements;
            for (const auto* s : list) {
                auto part = statement_hits(*s->session, s->links, modality);
                statements.insert(statements.end(), part.begin(), part.end());
            }
            auto& overall = modality == Modality::gaze ? sr.gaze : sr.mouse;
            auto& cells = modality == Modality::gaze ? sr.gaze_by_sentiment : sr.mouse_by_sentiment;
            if (!statements.empty()) {
                overall = aggregate_hits(subject, modality, config.aggregation, statements);
                cells = cells_from(subject, statements, modality, config.aggregation);
            } else {
                for (const auto sentiment : kCellSentiments) cells.push_back({sentiment, std::nullopt});
            }
        }
        report.subjects.push_back(std::move(sr));
    }

    std::vector<double> gaze_rates, mouse_rates, paired_gaze, paired_mouse;
    for (const auto& sr : report.subjects) {
        if (sr.gaze) gaze_rates.push_back(sr.gaze->rate);
        if (sr.mouse) mouse_rates.push_back(sr.mouse->rate);
        if (sr.gaze && sr.mouse) {
            paired_gaze.push_back(sr.gaze->rate);
            paired_mouse.push_back(sr.mouse->rate);
        }
    }
    report.gaze = describe(gaze_rates);
    report.mouse = describe(mouse_rates);

    for (const auto sentiment : kAnovaSentiments) {
        for (const auto modality : kModalities) {
            std::vector<double> rates;
            for (const auto& sr : report.subjects) {
                const auto& cells = modality == Modality::gaze ? sr.gaze_by_sentiment : sr.mouse_by_sentiment;
                for (const auto& c : cells) {
                    if (c.sentiment == sentiment && c.result) rates.push_back(c.result->rate);
                }
            }
            report.cells.push_back({sentiment, modality, describe(rates)});
        }
    }

    if (paired_gaze.size() < 2) {
        report.t_test_unavailable = "needs at least 2 subjects with rateable statements, have " +
                                    std::to_string(paired_gaze.size());
    } else {
        try {
            report.t_test = paired_t_test(paired_gaze, paired_mouse);
        } catch (const ValidationError& e) {
            report.t_test_unavailable = e.what();
        }
    }

    std::vector<std::string> ids;
    std::vector<std::vector<std::vector<std::optional<double>>>> cells;
    for (const auto& sr : report.subjects) {
        ids.push_back(sr.subject_id);
        std::vector<std::vector<std::optional<double>>> rows;
        for (const auto sentiment : kAnovaSentiments) {
            std::vector<std::optional<double>> row;
            for (const auto* list : {&sr.gaze_by_sentiment, &sr.mouse_by_sentiment}) {
                std::optional<double> v;
                for (const auto& c : *list) {
                    if (c.sentiment == sentiment && c.result) v = c.result->rate;
                }
                row.push_back(v);
            }
            rows.push_back(std::move(row));
        }
        cells.push_back(std::move(rows));
    }
    try {
        report.anova = rm_anova_2x3(ids, cells, config.anova_drop_incomplete);
    } catch (const ValidationError& e) {
        report.anova_unavailable = e.what();
    }
    return report;
}

namespace {

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::string rate_cell(const std::optional<HitRateResult>& r) {
    if (!r) return fmt("%18s", "-");
    return fmt("%7.1f%% (%3zu/%3zu)", r->rate, r->hit_total, r->mentioned_total);
}

std::string p_text(double p) { return p < 0.001 ? std::string("p < .001") : fmt("p = %.4f", p); }

}  // namespace

std::string format_report(const StudyReport& report) {
    std::string out;
    out += fmt("Hit rates (%s aggregation, padding %lld/%lld ms, gaze evidence: %s)\n",
               std::string(to_string(report.config.aggregation)).c_str(),
               static_cast<long long>(report.config.padding_before_ms),
               static_cast<long long>(report.config.padding_after_ms),
               std::string(to_string(report.config.gaze_evidence)).c_str());
    out += fmt("%-16s %18s %18s %10s\n", "subject", "gaze", "mouse", "statements");
    for (const auto& s : report.subjects) {
        const std::size_t n = s.gaze ? s.gaze->statements : 0;
        out += fmt("%-16s %s %s %10zu\n", s.subject_id.c_str(), rate_cell(s.gaze).c_str(), rate_cell(s.mouse).c_str(), n);
    }
    out += fmt("%-16s %8.1f%% SE %5.1f  %8.1f%% SE %5.1f\n", "cohort mean", report.gaze.mean, report.gaze.se,
               report.mouse.mean, report.mouse.se);

    out += "\nBy sentiment (cohort mean, SE, n)\n";
    out += fmt("%-10s %24s %24s\n", "sentiment", "gaze", "mouse");
    for (const auto sentiment : kAnovaSentiments) {
        std::string line = fmt("%-10s", std::string(to_string(sentiment)).c_str());
        for (const auto modality : kModalities) {
            for (const auto& c : report.cells) {
                if (c.sentiment == sentiment && c.modality == modality) {
                    line += c.stats.n == 0 ? fmt(" %24s", "-")
                                           : fmt(" %8.1f%% SE %5.1f n=%3zu", c.stats.mean, c.stats.se, c.stats.n);
                }
            }
        }
        out += line + "\n";
    }

    out += "\nPaired t-test, gaze vs mouse: ";
    if (report.t_test) {
        const auto& t = *report.t_test;
        out += fmt("t(%d) = %.3f, %s\n", t.df, t.t, p_text(t.p_two_tailed).c_str());
    } else {
        out += "unavailable (" + report.t_test_unavailable + ")\n";
    }

    out += "Repeated-measures ANOVA, sentiment x modality:";
    if (report.anova) {
        out += "\n";
        for (const auto* e : {&report.anova->factor_a, &report.anova->factor_b, &report.anova->interaction}) {
            out += fmt("  %-22s F(%d, %d) = %.3f, %s\n", e->name.c_str(), e->df_effect, e->df_error, e->f,
                       p_text(e->p).c_str());
        }
        if (!report.anova->dropped_subjects.empty()) {
            out += "  dropped incomplete subjects:";
            for (const auto& s : report.anova->dropped_subjects) out += " " + s;
            out += "\n";
        }
    } else {
        out += " unavailable (" + report.anova_unavailable + ")\n";
    }
    return out;
}

}  // namespace gazelink
