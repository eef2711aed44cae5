#include "gazelink/bundle.hpp"

#include <algorithm>
#include <map>

#include "gazelink/error.hpp"
#include "gazelink/serialize.hpp"
#include "json_io.hpp"

namespace gazelink {

using detail::ojson;

const Stimulus* StudyBundle::find_stimulus(std::string_view id) const noexcept {
    for (const auto& s : stimuli) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

namespace {

double dominant_offset(std::span<const ScrollState> scroll, Interval w) {
    if (scroll.empty()) return 0.0;
    if (w.length() <= 0) return scroll_at(scroll, w.start).offset_y;
    std::map<double, TimeMs> held;
    TimeMs t = w.start;
    double current = scroll_at(scroll, t).offset_y;
    auto it = std::upper_bound(scroll.begin(), scroll.end(), t, [](TimeMs v, const ScrollState& s) { return v < s.t; });
    for (; it != scroll.end() && it->t < w.end; ++it) {
        held[current] += it->t - t;
        t = it->t;
        current = it->offset_y;
    }
    held[current] += w.end - t;
    double best = current;
    TimeMs best_len = -1;
    for (const auto& [offset, len] : held) {
        if (len > best_len) {
            best = offset;
            best_len = len;
        }
    }
    return best;
}

}  // namespace

std::vector<UtterancePath> build_paths(const Session& session, std::span<const Fixation> fixations,
                                       const LinkConfig& config) {
    std::vector<UtterancePath> out;
    for (const auto& u : session.utterances) {
        if (u.excluded()) continue;
        const PathSegment seg = segment_paths(session, fixations, u, config);
        UtterancePath p;
        p.utterance_id = u.id;
        p.window = seg.window;
        for (std::size_t i = 0; i < fixations.size(); ++i) {
            if (fixations[i].span.end >= seg.window.start && fixations[i].span.start <= seg.window.end) {
                p.fixation_indices.push_back(i);
            }
        }
        for (const auto& m : seg.mouse) {
            const ScrollState s = session.scroll.empty() ? ScrollState{} : scroll_at(session.scroll, m.t);
            const PagePoint q = to_page_coords({m.x, m.y}, s);
            if (p.mouse_trail.empty() || !(p.mouse_trail.back() == q)) p.mouse_trail.push_back(q);
        }
        p.dominant_scroll_offset = dominant_offset(session.scroll, seg.window);
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

namespace {

ojson interval_json(Interval i) { return ojson::array({i.start, i.end}); }

ojson stimulus_json(const Stimulus& s) {
    ojson aois = ojson::array();
    for (const auto& a : s.aois) {
        aois.push_back({{"id", a.id}, {"label", a.label}, {"x", a.rect.x}, {"y", a.rect.y}, {"w", a.rect.w}, {"h", a.rect.h}});
    }
    return {{"id", s.id},
            {"screenshot", s.screenshot},
            {"page_width", s.page_width},
            {"page_height", s.page_height},
            {"viewport_width", s.viewport_width},
            {"viewport_height", s.viewport_height},
            {"aois", std::move(aois)}};
}

ojson validation_json(const ValidationReport& r) {
    ojson gaps = ojson::array();
    for (const auto& g : r.gaps) gaps.push_back({{"stream", g.stream}, {"from", g.from}, {"to", g.to}});
    return {{"gaze_samples", r.gaze_samples},
            {"invalid_gaze_samples", r.invalid_gaze_samples},
            {"gaps", std::move(gaps)},
            {"clamped_utterances", r.clamped_utterances},
            {"dropped_out_of_range", r.dropped_out_of_range},
            {"dropped_other_speaker", r.dropped_other_speaker},
            {"dropped_uncovered", r.dropped_uncovered},
            {"tester_ties", r.tester_ties},
            {"duplicates", {{"gaze", r.duplicates.gaze}, {"mouse", r.duplicates.mouse}, {"scroll", r.duplicates.scroll}}}};
}

ojson utterance_json(const Utterance& u) {
    return {{"id", u.id},
            {"speaker", u.speaker},
            {"start", u.start},
            {"end", u.end},
            {"text", u.text},
            {"sentiment", to_string(u.sentiment)},
            {"mentioned_aois", u.mentioned_aois}};
}

ojson fixation_json(const Fixation& f) {
    return {{"start", f.span.start},
            {"end", f.span.end},
            {"x", f.centroid.x},
            {"y", f.centroid.y},
            {"dispersion", f.dispersion},
            {"samples", f.sample_count}};
}

ojson link_json(const LinkRecord& l) {
    ojson ev = ojson::array();
    for (const auto& i : l.evidence) ev.push_back(interval_json(i));
    return {{"utterance_id", l.utterance_id},
            {"aoi_id", l.aoi_id},
            {"modality", to_string(l.modality)},
            {"dwell_ms", l.total_dwell_ms},
            {"evidence", std::move(ev)}};
}

ojson path_json(const UtterancePath& p) {
    ojson trail = ojson::array();
    for (const auto& q : p.mouse_trail) trail.push_back(ojson::array({q.x, q.y}));
    return {{"utterance_id", p.utterance_id},
            {"window", interval_json(p.window)},
            {"fixations", p.fixation_indices},
            {"mouse_trail", std::move(trail)},
            {"dominant_scroll_offset", p.dominant_scroll_offset}};
}

ojson hit_rate_json(const std::optional<HitRateResult>& r) {
    if (!r) return nullptr;
    return {{"subject_id", r->subject_id},
            {"modality", to_string(r->modality)},
            {"aggregation", to_string(r->aggregation)},
            {"statements", r->statements},
            {"mentioned", r->mentioned_total},
            {"hits", r->hit_total},
            {"rate", r->rate}};
}

ojson cells_json(const std::vector<SentimentCell>& cells) {
    ojson out = ojson::array();
    for (const auto& c : cells) out.push_back({{"sentiment", to_string(c.sentiment)}, {"result", hit_rate_json(c.result)}});
    return out;
}

ojson descriptive_json(const Descriptive& d) { return {{"n", d.n}, {"mean", d.mean}, {"se", d.se}}; }

ojson effect_json(const AnovaEffect& e) {
    return {{"name", e.name},
            {"ss", e.ss},
            {"ss_error", e.ss_error},
            {"df_effect", e.df_effect},
            {"df_error", e.df_error},
            {"f", detail::number_or_null(e.f)},
            {"p", e.p}};
}

ojson report_json(const StudyReport& r) {
    ojson subjects = ojson::array();
    for (const auto& s : r.subjects) {
        subjects.push_back({{"subject_id", s.subject_id},
                            {"gaze", hit_rate_json(s.gaze)},
                            {"mouse", hit_rate_json(s.mouse)},
                            {"gaze_by_sentiment", cells_json(s.gaze_by_sentiment)},
                            {"mouse_by_sentiment", cells_json(s.mouse_by_sentiment)}});
    }
    ojson cells = ojson::array();
    for (const auto& c : r.cells) {
        cells.push_back({{"sentiment", to_string(c.sentiment)}, {"modality", to_string(c.modality)}, {"stats", descriptive_json(c.stats)}});
    }
    ojson t = nullptr;
    if (r.t_test) {
        t = {{"t", detail::number_or_null(r.t_test->t)},
             {"df", r.t_test->df},
             {"p", r.t_test->p_two_tailed},
             {"mean_a", r.t_test->mean_a},
             {"mean_b", r.t_test->mean_b},
             {"se_a", r.t_test->se_a},
             {"se_b", r.t_test->se_b}};
    }
    ojson anova = nullptr;
    if (r.anova) {
        const auto& a = *r.anova;
        anova = {{"subjects", a.subjects},
                 {"dropped_subjects", a.dropped_subjects},
                 {"factor_a", effect_json(a.factor_a)},
                 {"factor_b", effect_json(a.factor_b)},
                 {"interaction", effect_json(a.interaction)},
                 {"sums",
                  {{"total", a.sums.total},
                   {"subjects", a.sums.subjects},
                   {"a", a.sums.a},
                   {"b", a.sums.b},
                   {"ab", a.sums.ab},
                   {"a_by_subject", a.sums.a_by_subject},
                   {"b_by_subject", a.sums.b_by_subject},
                   {"ab_by_subject", a.sums.ab_by_subject}}}};
    }
    return {{"subjects", std::move(subjects)},
            {"gaze", descriptive_json(r.gaze)},
            {"mouse", descriptive_json(r.mouse)},
            {"cells", std::move(cells)},
            {"t_test", std::move(t)},
            {"t_test_unavailable", r.t_test_unavailable},
            {"anova", std::move(anova)},
            {"anova_unavailable", r.anova_unavailable},
            {"config", detail::config_to_json(r.config)}};
}

}  // namespace

std::string write_bundle_json(const StudyBundle& b) {
    ojson doc;
    doc["schema_version"] = b.schema_version;
    doc["config"] = detail::config_to_json(b.config);
    ojson stimuli = ojson::array();
    for (const auto& s : b.stimuli) stimuli.push_back(stimulus_json(s));
    doc["stimuli"] = std::move(stimuli);
    ojson sessions = ojson::array();
    for (const auto& s : b.sessions) {
        ojson utts = ojson::array(), fix = ojson::array(), act = ojson::array(), paths = ojson::array(), links = ojson::array();
        for (const auto& u : s.utterances) utts.push_back(utterance_json(u));
        for (const auto& f : s.fixations) fix.push_back(fixation_json(f));
        for (const auto& a : s.mouse_activity) {
            act.push_back({{"start", a.window.start}, {"end", a.window.end}, {"kind", to_string(a.kind)}});
        }
        for (const auto& p : s.paths) paths.push_back(path_json(p));
        for (const auto& l : s.links) links.push_back(link_json(l));
        sessions.push_back({{"subject_id", s.subject_id},
                            {"stimulus_id", s.stimulus_id},
                            {"validation", validation_json(s.validation)},
                            {"utterances", std::move(utts)},
                            {"fixations", std::move(fix)},
                            {"mouse_activity", std::move(act)},
                            {"paths", std::move(paths)},
                            {"links", std::move(links)}});
    }
    doc["sessions"] = std::move(sessions);
    ojson skipped = ojson::array();
    for (const auto& s : b.skipped) skipped.push_back({{"manifest", s.manifest}, {"error", s.error}});
    doc["skipped"] = std::move(skipped);
    doc["report"] = report_json(b.report);
    return doc.dump(2) + '\n';
}

// ---------------------------------------------------------------------------
// Reading
// ---------------------------------------------------------------------------

namespace {

Interval interval_from(const ojson& j) { return {j.at(0).get<TimeMs>(), j.at(1).get<TimeMs>()}; }

Stimulus stimulus_from(const ojson& j) {
    Stimulus s;
    s.id = j.at("id").get<std::string>();
    s.screenshot = j.at("screenshot").get<std::string>();
    s.page_width = j.at("page_width").get<double>();
    s.page_height = j.at("page_height").get<double>();
    s.viewport_width = j.at("viewport_width").get<double>();
    s.viewport_height = j.at("viewport_height").get<double>();
    for (const auto& a : j.at("aois")) {
        s.aois.push_back({a.at("id").get<std::string>(), a.at("label").get<std::string>(),
                          {a.at("x").get<double>(), a.at("y").get<double>(), a.at("w").get<double>(), a.at("h").get<double>()}});
    }
    return s;
}

ValidationReport validation_from(const ojson& j) {
    ValidationReport r;
    r.gaze_samples = j.at("gaze_samples").get<std::size_t>();
    r.invalid_gaze_samples = j.at("invalid_gaze_samples").get<std::size_t>();
    for (const auto& g : j.at("gaps")) {
        r.gaps.push_back({g.at("stream").get<std::string>(), g.at("from").get<TimeMs>(), g.at("to").get<TimeMs>()});
    }
    r.clamped_utterances = j.at("clamped_utterances").get<std::vector<std::string>>();
    r.dropped_out_of_range = j.at("dropped_out_of_range").get<std::vector<std::string>>();
    r.dropped_other_speaker = j.at("dropped_other_speaker").get<std::size_t>();
    r.dropped_uncovered = j.at("dropped_uncovered").get<std::size_t>();
    r.tester_ties = j.at("tester_ties").get<std::size_t>();
    const auto& d = j.at("duplicates");
    r.duplicates = {d.at("gaze").get<std::size_t>(), d.at("mouse").get<std::size_t>(), d.at("scroll").get<std::size_t>()};
    return r;
}

Utterance utterance_from(const ojson& j) {
    Utterance u;
    u.id = j.at("id").get<std::string>();
    u.speaker = j.at("speaker").get<std::string>();
    u.start = j.at("start").get<TimeMs>();
    u.end = j.at("end").get<TimeMs>();
    u.text = j.at("text").get<std::string>();
    u.sentiment = parse_sentiment(j.at("sentiment").get<std::string>());
    for (const auto& a : j.at("mentioned_aois")) u.mentioned_aois.insert(a.get<std::string>());
    return u;
}

std::optional<HitRateResult> hit_rate_from(const ojson& j) {
    if (j.is_null()) return std::nullopt;
    HitRateResult r;
    r.subject_id = j.at("subject_id").get<std::string>();
    r.modality = parse_modality(j.at("modality").get<std::string>());
    r.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    r.statements = j.at("statements").get<std::size_t>();
    r.mentioned_total = j.at("mentioned").get<std::size_t>();
    r.hit_total = j.at("hits").get<std::size_t>();
    r.rate = j.at("rate").get<double>();
    return r;
}

std::vector<SentimentCell> cells_from(const ojson& j) {
    std::vector<SentimentCell> out;
    for (const auto& c : j) out.push_back({parse_sentiment(c.at("sentiment").get<std::string>()), hit_rate_from(c.at("result"))});
    return out;
}

Descriptive descriptive_from(const ojson& j) {
    return {j.at("n").get<std::size_t>(), j.at("mean").get<double>(), j.at("se").get<double>()};
}

AnovaEffect effect_from(const ojson& j) {
    return {j.at("name").get<std::string>(), j.at("ss").get<double>(),     j.at("ss_error").get<double>(),
            j.at("df_effect").get<int>(),    j.at("df_error").get<int>(), detail::number_or_inf(j.at("f")),
            j.at("p").get<double>()};
}

StudyReport report_from(const ojson& j, std::string_view source) {
    StudyReport r;
    for (const auto& s : j.at("subjects")) {
        r.subjects.push_back({s.at("subject_id").get<std::string>(), hit_rate_from(s.at("gaze")), hit_rate_from(s.at("mouse")),
                              cells_from(s.at("gaze_by_sentiment")), cells_from(s.at("mouse_by_sentiment"))});
    }
    r.gaze = descriptive_from(j.at("gaze"));
    r.mouse = descriptive_from(j.at("mouse"));
    for (const auto& c : j.at("cells")) {
        r.cells.push_back({parse_sentiment(c.at("sentiment").get<std::string>()),
                           parse_modality(c.at("modality").get<std::string>()), descriptive_from(c.at("stats"))});
    }
    if (const auto& t = j.at("t_test"); !t.is_null()) {
        r.t_test = TTestResult{detail::number_or_inf(t.at("t")), t.at("df").get<int>(),       t.at("p").get<double>(),
                               t.at("mean_a").get<double>(),       t.at("mean_b").get<double>(), t.at("se_a").get<double>(),
                               t.at("se_b").get<double>()};
    }
    r.t_test_unavailable = j.at("t_test_unavailable").get<std::string>();
    if (const auto& a = j.at("anova"); !a.is_null()) {
        AnovaResult res;
        res.subjects = a.at("subjects").get<std::size_t>();
        res.dropped_subjects = a.at("dropped_subjects").get<std::vector<std::string>>();
        res.factor_a = effect_from(a.at("factor_a"));
        res.factor_b = effect_from(a.at("factor_b"));
        res.interaction = effect_from(a.at("interaction"));
        const auto& s = a.at("sums");
        res.sums = {s.at("total").get<double>(),        s.at("subjects").get<double>(),     s.at("a").get<double>(),
                    s.at("b").get<double>(),            s.at("ab").get<double>(),           s.at("a_by_subject").get<double>(),
                    s.at("b_by_subject").get<double>(), s.at("ab_by_subject").get<double>()};
        r.anova = std::move(res);
    }
    r.anova_unavailable = j.at("anova_unavailable").get<std::string>();
    r.config = detail::config_from_json(j.at("config"), source);
    return r;
}

}  // namespace

StudyBundle parse_bundle_json(std::string_view text, std::string_view source) {
    const std::string src(source);
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ParseError(src, 0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("schema_version")) throw ParseError(src, 0, "missing schema_version");
    if (!doc.at("schema_version").is_string() || doc.at("schema_version").get<std::string>() != kBundleSchemaVersion) {
        throw ValidationError(src + ": unsupported bundle schema_version " + doc.at("schema_version").dump() +
                              " (expected \"" + std::string(kBundleSchemaVersion) + "\")");
    }
    StudyBundle b;
    try {
        b.config = detail::config_from_json(doc.at("config"), source);
        for (const auto& s : doc.at("stimuli")) b.stimuli.push_back(stimulus_from(s));
        for (const auto& s : doc.at("sessions")) {
            BundleSession bs;
            bs.subject_id = s.at("subject_id").get<std::string>();
            bs.stimulus_id = s.at("stimulus_id").get<std::string>();
            bs.validation = validation_from(s.at("validation"));
            for (const auto& u : s.at("utterances")) bs.utterances.push_back(utterance_from(u));
            for (const auto& f : s.at("fixations")) {
                bs.fixations.push_back({{f.at("start").get<TimeMs>(), f.at("end").get<TimeMs>()},
                                        {f.at("x").get<double>(), f.at("y").get<double>()},
                                        f.at("dispersion").get<double>(),
                                        f.at("samples").get<std::size_t>()});
            }
            for (const auto& a : s.at("mouse_activity")) {
                bs.mouse_activity.push_back({{a.at("start").get<TimeMs>(), a.at("end").get<TimeMs>()},
                                             parse_mouse_activity_kind(a.at("kind").get<std::string>())});
            }
            for (const auto& p : s.at("paths")) {
                UtterancePath up;
                up.utterance_id = p.at("utterance_id").get<std::string>();
                up.window = interval_from(p.at("window"));
                up.fixation_indices = p.at("fixations").get<std::vector<std::size_t>>();
                for (const auto& q : p.at("mouse_trail")) up.mouse_trail.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
                up.dominant_scroll_offset = p.at("dominant_scroll_offset").get<double>();
                bs.paths.push_back(std::move(up));
            }
            for (const auto& l : s.at("links")) {
                LinkRecord r;
                r.utterance_id = l.at("utterance_id").get<std::string>();
                r.aoi_id = l.at("aoi_id").get<std::string>();
                r.modality = parse_modality(l.at("modality").get<std::string>());
                r.total_dwell_ms = l.at("dwell_ms").get<TimeMs>();
                for (const auto& e : l.at("evidence")) r.evidence.push_back(interval_from(e));
                bs.links.push_back(std::move(r));
            }
            b.sessions.push_back(std::move(bs));
        }
        for (const auto& s : doc.at("skipped")) {
            b.skipped.push_back({s.at("manifest").get<std::string>(), s.at("error").get<std::string>()});
        }
        b.report = report_from(doc.at("report"), source);
    } catch (const ojson::exception& e) {
        throw ParseError(src, 0, std::string("malformed bundle: ") + e.what());
    } catch (const ValidationError& e) {
        throw ParseError(src, 0, std::string("malformed bundle: ") + e.what());
    }
    return b;
}

StudyBundle read_bundle(const std::filesystem::path& file) {
    return parse_bundle_json(read_text_file(file), file.string());
}

void write_bundle(const std::filesystem::path& file, const StudyBundle& bundle) {
    write_text_file(file, write_bundle_json(bundle));
}

}  // namespace gazelink
