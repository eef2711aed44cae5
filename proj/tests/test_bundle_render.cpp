#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "gazelink/bundle.hpp"
#include "gazelink/pipeline.hpp"
#include "gazelink/render.hpp"
#include "gazelink/synth.hpp"
#include "support.hpp"

namespace gazelink {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

synth::SynthSpec small_spec(int subjects = 10) {
    synth::SynthSpec s;
    s.subjects = subjects;
    s.aois_per_page = 16;
    s.statements_per_subject = 6;
    s.mentions_per_statement = 4;
    s.statement_duration_ms = 3000;
    s.seed = 11;
    return s;
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

TEST(Config, RoundTripPreservesEveryField) {
    PipelineConfig c;
    c.dispersion_threshold_px = 35.5;
    c.min_duration_ms = 120;
    c.padding_before_ms = 250;
    c.padding_after_ms = 500;
    c.gaze_evidence = GazeEvidence::raw_samples;
    c.aggregation = Aggregation::macro;
    c.anova_drop_incomplete = true;
    c.map.positive_color = "#00ff00";
    c.map.evidence = MapEvidence::mention_only;
    c.map.legend = false;
    EXPECT_EQ(parse_pipeline_config(write_pipeline_config(c)), c);
    EXPECT_EQ(parse_pipeline_config("{}"), PipelineConfig{});
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(parse_pipeline_config(R"({"padding_ms": 3})"), ParseError);
    EXPECT_THROW(parse_pipeline_config(R"({"map": {"colour": "red"}})"), ParseError);
    EXPECT_THROW(parse_pipeline_config(R"({"min_duration_ms": -5})"), ValidationError);
    EXPECT_THROW(parse_pipeline_config(R"({"aggregation": "median"})"), ParseError);
    EXPECT_THROW(parse_pipeline_config("[1,2"), ParseError);
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

Stimulus two_aoi_page() {
    Stimulus s;
    s.id = "page";
    s.page_width = 800;
    s.page_height = 600;
    s.viewport_width = 800;
    s.viewport_height = 600;
    s.aois = {{"A", "Alpha", {10, 10, 100, 100}}, {"B", "Beta & co", {200, 10, 100, 100}}};
    return s;
}

Utterance said(std::string id, Sentiment s, std::set<std::string> aois) {
    return {std::move(id), "tester", 0, 1000, "", s, std::move(aois)};
}

TEST(Render, ThreePositiveMentionsColourPositive) {
    const auto stim = two_aoi_page();
    const std::vector<Utterance> u{said("u1", Sentiment::positive, {"A"}), said("u2", Sentiment::positive, {"A"}),
                                   said("u3", Sentiment::positive, {"A"})};
    std::vector<LinkRecord> links;
    for (const auto& x : u) links.push_back({x.id, "A", Modality::gaze, {{0, 100}}, 100});
    const auto fb = aoi_feedback(stim, u, links, MapEvidence::gaze_linked);
    ASSERT_EQ(fb.size(), 2u);
    EXPECT_EQ(fb[0].positive, 3u);
    EXPECT_DOUBLE_EQ(*fb[0].score(), 1.0);
    SentimentMapStyle style;
    EXPECT_EQ(classify_feedback(fb[0], style), MapHue::positive);
    EXPECT_EQ(classify_feedback(fb[1], style), MapHue::no_feedback);

    const auto svg = render_sentiment_map(stim, fb, style);
    EXPECT_NE(svg.find("id=\"aoi-A\" x=\"10\" y=\"10\" width=\"100\" height=\"100\" fill=\"" + style.positive_color),
              std::string::npos)
        << svg;
    EXPECT_NE(svg.find("id=\"aoi-B\" x=\"200\" y=\"10\" width=\"100\" height=\"100\" fill=\"none\""), std::string::npos);
    EXPECT_NE(svg.find("Beta &amp; co"), std::string::npos);
    EXPECT_EQ(svg, render_sentiment_map(stim, u, links, style));
}

TEST(Render, EvidenceRuleGatesFeedback) {
    const auto stim = two_aoi_page();
    const std::vector<Utterance> u{said("u1", Sentiment::negative, {"A", "B"})};
    const std::vector<LinkRecord> links{{"u1", "B", Modality::mouse, {{0, 10}}, 10}};
    EXPECT_EQ(aoi_feedback(stim, u, links, MapEvidence::gaze_linked)[1].total(), 0u);
    EXPECT_EQ(aoi_feedback(stim, u, links, MapEvidence::mouse_linked)[1].negative, 1u);
    EXPECT_EQ(aoi_feedback(stim, u, links, MapEvidence::any_linked)[0].total(), 0u);
    const auto all = aoi_feedback(stim, u, links, MapEvidence::mention_only);
    EXPECT_EQ(all[0].negative, 1u);
    EXPECT_EQ(all[1].negative, 1u);
}

TEST(Render, BalancedFeedbackIsNeutralAndUnlabeledIsMixed) {
    SentimentMapStyle style;
    AoiFeedback balanced{"A", 1, 1, 0, 0};
    EXPECT_DOUBLE_EQ(*balanced.score(), 0.0);
    EXPECT_EQ(classify_feedback(balanced, style), MapHue::neutral);
    AoiFeedback unlabeled{"A", 0, 0, 0, 2};
    EXPECT_FALSE(unlabeled.score());
    EXPECT_EQ(classify_feedback(unlabeled, style), MapHue::mixed);
    EXPECT_EQ(classify_feedback(AoiFeedback{"A", 0, 3, 1, 0}, style), MapHue::negative);
    // Cutoffs are strict.
    EXPECT_EQ(classify_feedback(AoiFeedback{"A", 3, 2, 0, 0}, style), MapHue::neutral);
    EXPECT_EQ(classify_feedback(AoiFeedback{"A", 3, 1, 0, 0}, style), MapHue::positive);
}

TEST(Render, EveryAoiAppearsAndLegendIsOptional) {
    const auto study = synth::generate_study(small_spec(1));
    const auto& stim = study.stimuli.front();
    SentimentMapStyle style;
    const auto& ss = study.sessions.front().session;
    auto svg = render_sentiment_map(stim, ss.utterances, {}, style);
    EXPECT_EQ(count_of(svg, "<rect id=\"aoi-"), stim.aois.size());
    EXPECT_NE(svg.find("legend"), std::string::npos);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    style.legend = false;
    svg = render_sentiment_map(stim, ss.utterances, {}, style);
    EXPECT_EQ(svg.find("legend"), std::string::npos);
}

// ---------------------------------------------------------------------------
// bundle
// ---------------------------------------------------------------------------

TEST(BuildPaths, FixationsAndTrailFollowTheWindow) {
    Session s;
    s.utterances = {said("u1", Sentiment::positive, {"A"})};
    s.utterances[0].start = 100;
    s.utterances[0].end = 300;
    s.mouse = {{0, 5, 5}, {150, 5, 5}, {200, 7, 9}, {400, 1, 1}};
    s.scroll = {{0, 0, 0}, {250, 0, 40}};
    const std::vector<Fixation> fx{
        {{0, 90}, {10, 20}, 5, 8}, {{120, 200}, {30, 40}, 5, 8}, {{290, 350}, {50, 60}, 5, 6}, {{400, 500}, {1, 1}, 5, 9}};
    const auto paths = build_paths(s, fx, LinkConfig{});
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].fixation_indices, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(paths[0].mouse_trail, (std::vector<PagePoint>{{5, 5}, {7, 9}}));
    EXPECT_DOUBLE_EQ(paths[0].dominant_scroll_offset, 0.0);
}

TEST(Bundle, RoundTripAndSchemaChecks) {
    TempDir dir("bundle");
    const auto study = synth::generate_study(small_spec(3));
    const auto manifests = synth::write_study(study, dir.path() / "study");
    const auto bundle = run_pipeline(manifests, PipelineConfig{}, {.bundle_dir = dir.path()});
    const auto text = write_bundle_json(bundle);
    EXPECT_EQ(parse_bundle_json(text), bundle);
    EXPECT_EQ(write_bundle_json(parse_bundle_json(text)), text);

    auto wrong = text;
    const auto pos = wrong.find("\"schema_version\": \"1\"");
    ASSERT_NE(pos, std::string::npos);
    wrong.replace(pos, 21, "\"schema_version\": \"0\"");
    EXPECT_THROW(parse_bundle_json(wrong), ValidationError);
    EXPECT_THROW(parse_bundle_json(""), ParseError);
    EXPECT_THROW(parse_bundle_json("{\"schema_version\": \"1\"}"), ParseError);

    write_bundle(dir / "b.json", bundle);
    EXPECT_EQ(read_bundle(dir / "b.json"), bundle);
    EXPECT_EQ(slurp(dir / "b.json"), text);
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

TEST(Pipeline, TenSessionsAreDeterministicAcrossThreadCounts) {
    TempDir dir("pipeline");
    const auto study = synth::generate_study(small_spec(10));
    const auto manifests = synth::write_study(study, dir.path());
    const auto one = run_pipeline(manifests, PipelineConfig{}, {.threads = 1});
    const auto many = run_pipeline(manifests, PipelineConfig{}, {.threads = 4});
    EXPECT_EQ(write_bundle_json(one), write_bundle_json(many));
    ASSERT_EQ(one.sessions.size(), 10u);
    EXPECT_EQ(one.report.subjects.size(), 10u);
    EXPECT_TRUE(one.skipped.empty());
    for (std::size_t i = 0; i < one.sessions.size(); ++i) {
        EXPECT_EQ(one.sessions[i].subject_id, study.sessions[i].session.subject_id);
        EXPECT_EQ(one.sessions[i].paths.size(), one.sessions[i].utterances.size());
    }
    for (std::size_t i = 0; i < one.report.subjects.size(); ++i) {
        const auto& truth = study.truth.subjects[i];
        ASSERT_TRUE(one.report.subjects[i].gaze);
        EXPECT_EQ(one.report.subjects[i].gaze->hit_total, truth.gaze_hits);
        EXPECT_EQ(one.report.subjects[i].mouse->hit_total, truth.mouse_hits);
    }
}

TEST(Pipeline, BrokenSessionAbortsOrIsSkipped) {
    TempDir dir("pipeline-bad");
    const auto study = synth::generate_study(small_spec(3));
    const auto manifests = synth::write_study(study, dir.path());
    fs::remove(manifests[1].parent_path() / "gaze.csv");
    try {
        run_pipeline(manifests, PipelineConfig{});
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(manifests[1].parent_path().filename().string()), std::string::npos)
            << e.what();
    }
    const auto bundle = run_pipeline(manifests, PipelineConfig{}, {.skip_invalid = true});
    EXPECT_EQ(bundle.sessions.size(), 2u);
    ASSERT_EQ(bundle.skipped.size(), 1u);
    EXPECT_FALSE(bundle.skipped[0].error.empty());

    const auto checks = validate_manifests(manifests, PipelineConfig{});
    ASSERT_EQ(checks.size(), 3u);
    EXPECT_TRUE(checks[0].ok);
    EXPECT_FALSE(checks[1].ok);
    EXPECT_TRUE(checks[2].ok);
}

TEST(Pipeline, DuplicateSessionsAreRejected) {
    TempDir dir("pipeline-dup");
    const auto manifests = synth::write_study(synth::generate_study(small_spec(2)), dir.path());
    const std::vector<fs::path> twice{manifests[0], manifests[1], manifests[0]};
    EXPECT_THROW(run_pipeline(twice, PipelineConfig{}), Error);
}

TEST(Pipeline, SentimentMapFromBundle) {
    TempDir dir("pipeline-map");
    const auto manifests = synth::write_study(synth::generate_study(small_spec(4)), dir.path());
    const auto bundle = run_pipeline(manifests, PipelineConfig{}, {.bundle_dir = dir.path()});
    ASSERT_EQ(bundle.stimuli.size(), 1u);
    const auto svg = render_sentiment_map(bundle, bundle.stimuli[0].id);
    EXPECT_NE(svg.find("href=\"" + bundle.stimuli[0].screenshot + "\""), std::string::npos);
    EXPECT_NE(render_sentiment_map(bundle, bundle.stimuli[0].id, "shot.png").find("href=\"shot.png\""),
              std::string::npos);
    EXPECT_THROW(render_sentiment_map(bundle, "no-such-page"), ValidationError);
}

TEST(Export, CopiesScreenshotsAndUiAndRewritesReferences) {
    TempDir dir("export");
    const auto manifests = synth::write_study(synth::generate_study(small_spec(2)), dir / "study");
    const auto bundle_file = dir / "out" / "bundle.json";
    fs::create_directories(bundle_file.parent_path());
    write_bundle(bundle_file, run_pipeline(manifests, PipelineConfig{}, {.bundle_dir = bundle_file.parent_path()}));
    fs::create_directories(dir / "ui" / "assets");
    std::ofstream(dir / "ui" / "index.html") << "<html></html>\n";
    std::ofstream(dir / "ui" / "assets" / "app.js") << "//\n";

    const auto out = dir / "site";
    const auto exported = export_bundle(bundle_file, out, dir / "ui");
    EXPECT_TRUE(fs::exists(out / "index.html"));
    EXPECT_TRUE(fs::exists(out / "assets" / "app.js"));
    ASSERT_EQ(exported.stimuli.size(), 1u);
    EXPECT_EQ(exported.stimuli[0].screenshot, "screenshots/page1.svg");
    EXPECT_TRUE(fs::exists(out / "screenshots" / "page1.svg"));
    EXPECT_EQ(read_bundle(out / "bundle.json"), exported);

    auto original = read_bundle(bundle_file);
    original.stimuli[0].screenshot = exported.stimuli[0].screenshot;
    original.config.map = exported.config.map;
    EXPECT_EQ(original, exported);
}

}  // namespace
}  // namespace gazelink
