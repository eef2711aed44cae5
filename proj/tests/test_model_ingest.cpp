#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gazelink/error.hpp"
#include "gazelink/ingest.hpp"
#include "gazelink/model.hpp"
#include "gazelink/serialize.hpp"
#include "support.hpp"

namespace gazelink {
namespace {

// ---------------------------------------------------------------------------
// core model
// ---------------------------------------------------------------------------

TEST(Model, ToPageCoordsAddsOffset) {
    EXPECT_EQ(to_page_coords({400, 500}, {0, 0, 300}), (PagePoint{400, 800}));
    EXPECT_EQ(to_page_coords({10, 20}, {0, 0, 0}), (PagePoint{10, 20}));
    EXPECT_EQ(to_page_coords({100, 50}, {0, 30, 700}), (PagePoint{130, 750}));
}

TEST(Model, PageCoordsInvertExactly) {
    const ScrollState s{0, 17, 1234};
    for (double x : {0.0, 3.5, 1919.0}) {
        for (double y : {0.0, 0.25, 1079.0}) {
            const ViewportPoint p{x, y};
            EXPECT_EQ(to_viewport_coords(to_page_coords(p, s), s), p);
        }
    }
}

TEST(Model, AoiMembershipIsHalfOpen) {
    const Aoi a{"A", "", {0, 0, 10, 10}};
    EXPECT_TRUE(point_in_aoi({5, 5}, a));
    EXPECT_FALSE(point_in_aoi({10, 5}, a));
    EXPECT_TRUE(point_in_aoi({0, 0}, a));
    EXPECT_FALSE(point_in_aoi({5, 10}, a));
    EXPECT_FALSE(point_in_aoi({-0.001, 5}, a));
    // Adjacent AOIs never both claim the shared edge.
    const Aoi b{"B", "", {10, 0, 10, 10}};
    for (double x = 8.0; x <= 12.0; x += 0.5) EXPECT_NE(point_in_aoi({x, 5}, a), point_in_aoi({x, 5}, b)) << x;
}

TEST(Model, IntervalOverlap) {
    EXPECT_EQ(interval_overlap({0, 10}, {5, 20}), 5);
    EXPECT_EQ(interval_overlap({0, 10}, {10, 20}), 0);
    EXPECT_EQ(interval_overlap({3, 7}, {3, 7}), 4);
    EXPECT_EQ(interval_overlap({0, 3}, {5, 9}), 0);
    for (TimeMs a0 = 0; a0 < 6; ++a0) {
        for (TimeMs b0 = 0; b0 < 6; ++b0) {
            const Interval a{a0, a0 + 3}, b{b0, b0 + 5};
            EXPECT_EQ(interval_overlap(a, b), interval_overlap(b, a));
            EXPECT_LE(interval_overlap(a, b), 3);
            EXPECT_GE(interval_overlap(a, b), 0);
        }
    }
}

TEST(Model, EnumNamesRoundTrip) {
    for (auto s : {Sentiment::positive, Sentiment::negative, Sentiment::neutral, Sentiment::unlabeled}) {
        EXPECT_EQ(parse_sentiment(to_string(s)), s);
    }
    EXPECT_EQ(parse_modality("mouse"), Modality::mouse);
    EXPECT_EQ(parse_aggregation("macro"), Aggregation::macro);
    EXPECT_EQ(parse_gaze_evidence(to_string(GazeEvidence::raw_samples)), GazeEvidence::raw_samples);
    EXPECT_THROW(parse_sentiment("happy"), ValidationError);
}

TEST(Model, SessionTimeRangeCoversGazeAndMouse) {
    Session s;
    EXPECT_EQ(s.time_range(), (Interval{0, 0}));
    s.gaze = {{100, 0, 0, true}, {500, 0, 0, true}};
    s.mouse = {{50, 0, 0}, {400, 0, 0}};
    EXPECT_EQ(s.time_range(), (Interval{50, 500}));
}

// ---------------------------------------------------------------------------
// streams
// ---------------------------------------------------------------------------

TEST(Streams, GazeRowsAreSorted) {
    const auto g = parse_gaze_csv("t_ms,x,y,valid\n30,3,3,1\n10,1,1,1\n20,2,2,0\n", "g.csv");
    ASSERT_EQ(g.samples.size(), 3u);
    EXPECT_EQ(g.samples[0].t, 10);
    EXPECT_EQ(g.samples[1].t, 20);
    EXPECT_FALSE(g.samples[1].valid);
    EXPECT_EQ(g.samples[2].t, 30);
}

TEST(Streams, NonNumericFieldNamesLine) {
    try {
        parse_gaze_csv("t_ms,x,y,valid\n10,1,1,1\n20,abc,2,1\n", "g.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.source(), "g.csv");
        EXPECT_NE(std::string(e.what()).find("g.csv:3"), std::string::npos);
    }
}

TEST(Streams, DuplicateTimestampsKeepLastRow) {
    const auto g = parse_gaze_csv("t_ms,x,y,valid\n10,1,1,1\n10,5,5,1\n20,2,2,1\n20,7,7,1\n30,3,3,1\n", "g.csv");
    ASSERT_EQ(g.samples.size(), 3u);
    EXPECT_EQ(g.duplicates, 2u);
    EXPECT_EQ(g.samples[0].x, 5);
    EXPECT_EQ(g.samples[1].x, 7);
}

TEST(Streams, EmptyGazeIsAnError) {
    EXPECT_THROW(parse_gaze_csv("t_ms,x,y,valid\n", "g.csv"), ParseError);
}

TEST(Streams, EmptyScrollBecomesZeroOffset) {
    const auto s = parse_scroll_csv("t_ms,offset_x,offset_y\n", "s.csv");
    ASSERT_EQ(s.samples.size(), 1u);
    EXPECT_EQ(s.samples[0], (ScrollState{0, 0, 0}));
}

TEST(Streams, BadHeaderAndNegativeOffsetAreRejected) {
    EXPECT_THROW(parse_mouse_csv("time,x,y\n1,2,3\n", "m.csv"), ParseError);
    EXPECT_THROW(parse_scroll_csv("t_ms,offset_x,offset_y\n0,0,-5\n", "s.csv"), Error);
}

TEST(Streams, CsvWritersRoundTrip) {
    const std::vector<GazeSample> g{{0, 1.5, 2.25, true}, {11, 3, 4, false}};
    EXPECT_EQ(parse_gaze_csv(write_gaze_csv(g), "g").samples, g);
    const std::vector<MouseSample> m{{0, 1, 2}, {16, 0.1, 1e-3}};
    EXPECT_EQ(parse_mouse_csv(write_mouse_csv(m), "m").samples, m);
    const std::vector<ScrollState> s{{0, 0, 0}, {500, 0, 300}};
    EXPECT_EQ(parse_scroll_csv(write_scroll_csv(s), "s").samples, s);
}

// ---------------------------------------------------------------------------
// speech
// ---------------------------------------------------------------------------

TEST(Transcript, SecondsBecomeMilliseconds) {
    const auto t = parse_transcript(R"([{"start": 1.2, "end": 3.4, "text": "hi"}])", "t.json");
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].start, 1200);
    EXPECT_EQ(t[0].end, 3400);
    EXPECT_EQ(seconds_to_ms(0.0005), 1);
    EXPECT_EQ(seconds_to_ms(2.0004), 2000);
}

TEST(Transcript, OverlapAllowedZeroLengthRejected) {
    EXPECT_EQ(parse_transcript(R"([{"start":0,"end":2,"text":"a"},{"start":1,"end":3,"text":"b"}])", "t").size(), 2u);
    EXPECT_THROW(parse_transcript(R"([{"start":1,"end":1,"text":"a"}])", "t"), Error);
    EXPECT_THROW(parse_transcript("[]", "t"), Error);
    EXPECT_THROW(parse_transcript(R"([{"start":0,"end":1,"text":"   "}])", "t"), Error);
}

TEST(Transcript, SegmentsObjectAndIds) {
    const auto t = parse_transcript(
        R"({"segments": [{"id": 1, "start": 5, "end": 6, "text": "b"}, {"id": 0, "start": 1, "end": 2, "text": "a"}]})", "t");
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].id, "u0000");
    EXPECT_EQ(t[0].text, "a");
    EXPECT_EQ(t[1].id, "u0001");
}

std::vector<TranscriptSegment> seg(TimeMs s, TimeMs e) { return {{"u0000", s, e, "text"}}; }

TEST(Diarization, FullyInsideTesterTurnIsKept) {
    const auto r = apply_diarization(seg(0, 2000), {{0, 5000, "tester"}}, "tester");
    ASSERT_EQ(r.utterances.size(), 1u);
    EXPECT_EQ(r.utterances[0].speaker, "tester");
}

TEST(Diarization, InterviewerSegmentIsDropped) {
    const auto r = apply_diarization(seg(0, 2000), {{0, 5000, "interviewer"}, {6000, 7000, "tester"}}, "tester");
    EXPECT_TRUE(r.utterances.empty());
    EXPECT_EQ(r.dropped_other_speaker, 1u);
}

TEST(Diarization, MajorityCoverageDecides) {
    const auto r = apply_diarization(seg(0, 2000), {{0, 1200, "tester"}, {1200, 2000, "interviewer"}}, "tester");
    EXPECT_EQ(r.utterances.size(), 1u);
    const auto r2 = apply_diarization(seg(0, 2000), {{0, 800, "tester"}, {800, 2000, "interviewer"}}, "tester");
    EXPECT_TRUE(r2.utterances.empty());
}

TEST(Diarization, TiesGoToTesterAndUncoveredIsCounted) {
    const auto r = apply_diarization(seg(0, 2000), {{0, 1000, "tester"}, {1000, 2000, "interviewer"}}, "tester");
    EXPECT_EQ(r.utterances.size(), 1u);
    EXPECT_EQ(r.tester_ties, 1u);
    const auto r2 = apply_diarization(seg(3000, 4000), {{0, 1000, "tester"}}, "tester");
    EXPECT_EQ(r2.dropped_uncovered, 1u);
    EXPECT_THROW(apply_diarization(seg(0, 1), {{0, 1000, "someone"}}, "tester"), Error);
}

Utterance utt(std::string id, TimeMs s, TimeMs e, std::string text = "x") {
    return {std::move(id), "tester", s, e, std::move(text), Sentiment::unlabeled, {}};
}

TEST(Merge, GapThreshold) {
    const std::vector<Utterance> u{utt("u1", 0, 1000), utt("u2", 1200, 2000)};
    EXPECT_EQ(merge_utterances(u, 500, {}).size(), 1u);
    const std::vector<Utterance> v{utt("u1", 0, 1000), utt("u2", 1800, 2000)};
    EXPECT_EQ(merge_utterances(v, 500, {}).size(), 2u);
    EXPECT_EQ(merge_utterances(u, 0, {}).size(), 2u);
}

TEST(Merge, FlagJoinsSplitStatement) {
    const std::vector<Utterance> u{utt("u1", 0, 3000, "But I notice that a lot of large images are used."),
                                   utt("u2", 4000, 6000, "Again, I think that's a bit too much.")};
    Annotations ann;
    ann["u1"] = {Sentiment::negative, {"A"}, false};
    ann["u2"] = {Sentiment::unlabeled, {"B"}, true};
    auto withAnn = apply_annotations(u, ann, Stimulus{"p", "", 100, 100, 100, 100, {{"A", "", {0, 0, 1, 1}}, {"B", "", {1, 1, 1, 1}}}});
    const auto merged = merge_utterances(withAnn, 0, ann);
    ASSERT_EQ(merged.size(), 1u);
    EXPECT_EQ(merged[0].id, "u1");
    EXPECT_EQ(merged[0].start, 0);
    EXPECT_EQ(merged[0].end, 6000);
    EXPECT_EQ(merged[0].text, "But I notice that a lot of large images are used. Again, I think that's a bit too much.");
    EXPECT_EQ(merged[0].sentiment, Sentiment::negative);
    EXPECT_EQ(merged[0].mentioned_aois, (std::set<std::string>{"A", "B"}));
}

TEST(Merge, FlagOnFirstUtteranceIsAnError) {
    Annotations ann;
    ann["u1"] = {Sentiment::positive, {}, true};
    EXPECT_THROW(merge_utterances({utt("u1", 0, 10)}, 0, ann), Error);
}

TEST(Merge, IsIdempotent) {
    Annotations ann;
    ann["u3"] = {Sentiment::positive, {}, true};
    const std::vector<Utterance> u{utt("u1", 0, 100), utt("u2", 300, 400), utt("u3", 2000, 2100), utt("u4", 2150, 2200),
                                   utt("u5", 9000, 9100)};
    for (TimeMs gap : {0, 100, 250, 1000}) {
        const auto once = merge_utterances(u, gap, ann);
        EXPECT_EQ(merge_utterances(once, gap, ann), once) << gap;
    }
}

// ---------------------------------------------------------------------------
// AOIs and annotations
// ---------------------------------------------------------------------------

std::string aoi_doc(const std::string& aois) {
    return R"({"page_width": 1000, "page_height": 3000, "viewport_width": 1000, "viewport_height": 800, "aois": [)" + aois + "]}";
}

TEST(Aois, ValidRectIsAccepted) {
    const auto s = parse_aois(aoi_doc(R"({"id": "A", "label": "nav", "x": 0, "y": 0, "w": 100, "h": 50})"), "a.json");
    ASSERT_EQ(s.aois.size(), 1u);
    EXPECT_EQ(s.aois[0].rect, (Rect{0, 0, 100, 50}));
    EXPECT_EQ(s.page_height, 3000);
}

TEST(Aois, BadGeometryAndDuplicatesAreRejected) {
    EXPECT_THROW(parse_aois(aoi_doc(R"({"id": "A", "label": "", "x": 0, "y": 0, "w": -5, "h": 50})"), "a"), Error);
    EXPECT_THROW(parse_aois(aoi_doc(R"({"id": "A", "label": "", "x": 0, "y": 0, "w": 5, "h": 5},
                                       {"id": "A", "label": "", "x": 9, "y": 9, "w": 5, "h": 5})"), "a"), Error);
    try {
        parse_aois(aoi_doc(R"({"id": "Far", "label": "", "x": 990, "y": 0, "w": 50, "h": 5})"), "a");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("Far"), std::string::npos);
    }
}

TEST(Aois, FortyTwoAoisParse) {
    std::string body;
    for (int k = 0; k < 42; ++k) {
        if (k) body += ",";
        body += R"({"id": "A)" + std::to_string(k) + R"(", "label": "", "x": )" + std::to_string((k % 6) * 150) +
                R"(, "y": )" + std::to_string((k / 6) * 300) + R"(, "w": 100, "h": 200})";
    }
    EXPECT_EQ(parse_aois(aoi_doc(body), "a").aois.size(), 42u);
}

const Stimulus kStim{"p", "", 100, 100, 100, 100, {{"A", "", {0, 0, 10, 10}}, {"B", "", {10, 10, 10, 10}}}};

TEST(Annotations, FieldsAreSet) {
    const auto ann = parse_annotations(
        R"({"utterances": [{"id": "u1", "sentiment": "positive", "mentioned_aois": ["A", "B"], "merge_with_previous": false}]})", "n");
    const auto out = apply_annotations({utt("u1", 0, 10), utt("u2", 20, 30)}, ann, kStim);
    EXPECT_EQ(out[0].sentiment, Sentiment::positive);
    EXPECT_EQ(out[0].mentioned_aois, (std::set<std::string>{"A", "B"}));
    EXPECT_FALSE(out[0].excluded());
    EXPECT_EQ(out[1].sentiment, Sentiment::unlabeled);
    EXPECT_TRUE(out[1].excluded());
}

TEST(Annotations, UnknownIdsAreErrors) {
    Annotations ann;
    ann["u1"] = {Sentiment::positive, {"Z"}, false};
    EXPECT_THROW(apply_annotations({utt("u1", 0, 10)}, ann, kStim), ValidationError);
    Annotations ann2;
    ann2["nope"] = {Sentiment::positive, {"A"}, false};
    EXPECT_THROW(apply_annotations({utt("u1", 0, 10)}, ann2, kStim), ValidationError);
}

TEST(Annotations, MentionCountIsPreserved) {
    Annotations ann;
    ann["u1"] = {Sentiment::positive, {"A", "B"}, false};
    ann["u2"] = {Sentiment::negative, {"B"}, false};
    const auto out = apply_annotations({utt("u1", 0, 10), utt("u2", 20, 30)}, ann, kStim);
    std::size_t total = 0;
    for (const auto& u : out) total += u.mentioned_aois.size();
    EXPECT_EQ(total, 3u);
}

// ---------------------------------------------------------------------------
// validation report
// ---------------------------------------------------------------------------

Session clean_session() {
    Session s;
    for (TimeMs t = 0; t <= 3000; t += 11) {
        s.gaze.push_back({t, 10, 10, true});
        s.mouse.push_back({t, 5, 5});
    }
    s.scroll = {{0, 0, 0}};
    s.utterances = {utt("u1", 100, 900)};
    return s;
}

TEST(Validation, CleanSessionHasEmptyReport) {
    EXPECT_TRUE(validate_session(clean_session()).empty());
}

TEST(Validation, OneSecondGapIsReported) {
    Session s = clean_session();
    std::erase_if(s.gaze, [](const GazeSample& g) { return g.t > 1000 && g.t < 2000; });
    const auto r = validate_session(s);
    ASSERT_EQ(r.gaps.size(), 1u);
    EXPECT_EQ(r.gaps[0].stream, "gaze");
    EXPECT_FALSE(r.describe().empty());
}

TEST(Validation, InvalidFractionAndDroppedCounts) {
    Session s = clean_session();
    for (std::size_t i = 0; i < s.gaze.size(); i += 4) s.gaze[i].valid = false;
    IngestStats stats;
    stats.dropped_other_speaker = 3;
    const auto r = validate_session(s, stats);
    EXPECT_EQ(r.dropped_other_speaker, 3u);
    EXPECT_NEAR(r.invalid_gaze_fraction(), 0.25, 0.01);
}

TEST(Validation, ClampingKeepsUtterancesInsideRange) {
    IngestStats stats;
    const auto out = clamp_utterances({utt("u1", -50, 500), utt("u2", 5000, 6000), utt("u3", 100, 200)}, {0, 3000}, stats);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].start, 0);
    EXPECT_EQ(stats.clamped_utterances, std::vector<std::string>{"u1"});
    EXPECT_EQ(stats.dropped_out_of_range, std::vector<std::string>{"u2"});
}

// ---------------------------------------------------------------------------
// session files on disk
// ---------------------------------------------------------------------------

struct FixtureFiles {
    testing::TempDir dir{"ingest"};
    std::filesystem::path manifest;

    FixtureFiles() {
        Stimulus stim{"page1", "", 1000, 3000, 1000, 800,
                      {{"A", "navigation", {0, 0, 500, 100}}, {"B", "hero image", {0, 200, 1000, 600}}}};
        write_text_file(dir / "aois.json", write_aois_json(stim));
        SessionFiles f;
        f.subject_id = "s01";
        f.stimulus_id = "page1";
        for (TimeMs t = 0; t <= 6000; t += 11) {
            f.gaze.push_back({t, 100.5, 250, t % 7 != 0});
            f.mouse.push_back({t, 300, static_cast<double>(t % 400)});
        }
        f.scroll = {{0, 0, 0}, {2000, 0, 450}, {4000, 0, 900}};
        f.transcript = {{"u0000", 100, 1500, "The menu is clear."},
                        {"u0001", 1600, 2600, "Can you say more?"},
                        {"u0002", 2700, 4100, "The image is too large."},
                        {"u0003", 4300, 5900, "Okay."}};
        f.speakers = {{0, 1550, "tester"}, {1550, 2650, "interviewer"}, {2650, 6000, "tester"}};
        f.annotations["u0000"] = {Sentiment::positive, {"A"}, false};
        f.annotations["u0002"] = {Sentiment::negative, {"B"}, false};
        manifest = write_session_files(dir / "session", f, dir / "aois.json", {});
    }
};

TEST(LoadSession, FullIngest) {
    FixtureFiles fx;
    const auto loaded = load_session(fx.manifest);
    const Session& s = loaded.session;
    EXPECT_EQ(s.subject_id, "s01");
    EXPECT_EQ(loaded.stimulus.id, "page1");
    ASSERT_EQ(s.utterances.size(), 3u);
    EXPECT_EQ(s.utterances[0].sentiment, Sentiment::positive);
    EXPECT_TRUE(s.utterances[2].excluded());
    EXPECT_EQ(loaded.report.dropped_other_speaker, 1u);
    EXPECT_EQ(s.scroll.size(), 3u);
}

TEST(LoadSession, RoundTripIsFieldIdentical) {
    FixtureFiles fx;
    const auto first = load_session(fx.manifest);
    testing::TempDir again("roundtrip");
    write_text_file(again / "aois.json", write_aois_json(first.stimulus));
    const auto files = session_files_from(first.session);
    const auto manifest = write_session_files(again / "s", files, again / "aois.json", {});
    const auto second = load_session(manifest);
    EXPECT_EQ(second.session, first.session);
    EXPECT_EQ(second.stimulus.aois, first.stimulus.aois);
}

TEST(LoadSession, MissingGazeFileNamesPath) {
    FixtureFiles fx;
    std::filesystem::remove(fx.manifest.parent_path() / "gaze.csv");
    try {
        load_session(fx.manifest);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("gaze.csv"), std::string::npos) << e.what();
    }
}

TEST(LoadSession, ScrollBeyondPageIsRejected) {
    FixtureFiles fx;
    write_text_file(fx.manifest.parent_path() / "scroll.csv", "t_ms,offset_x,offset_y\n0,0,0\n10,0,2500\n");
    EXPECT_THROW(load_session(fx.manifest), ValidationError);
}

TEST(LoadSession, ManifestNeedsRequiredKeys) {
    testing::TempDir dir("manifest");
    write_text_file(dir / "m.json", R"({"subject_id": "s"})");
    EXPECT_THROW(read_manifest(dir / "m.json"), Error);
}

}  // namespace
}  // namespace gazelink
