#include "gazelink/serialize.hpp"

#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gazelink/error.hpp"

namespace gazelink {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

namespace {

double ms_to_seconds(TimeMs ms) { return static_cast<double>(ms) / 1000.0; }

}  // namespace

std::string write_gaze_csv(std::span<const GazeSample> gaze) {
    std::string out = "t_ms,x,y,valid\n";
    for (const auto& g : gaze) {
        out += std::to_string(g.t) + ',' + format_number(g.x) + ',' + format_number(g.y) + ',' + (g.valid ? '1' : '0') + '\n';
    }
    return out;
}

std::string write_mouse_csv(std::span<const MouseSample> mouse) {
    std::string out = "t_ms,x,y\n";
    for (const auto& m : mouse) out += std::to_string(m.t) + ',' + format_number(m.x) + ',' + format_number(m.y) + '\n';
    return out;
}

std::string write_scroll_csv(std::span<const ScrollState> scroll) {
    std::string out = "t_ms,offset_x,offset_y\n";
    for (const auto& s : scroll) {
        out += std::to_string(s.t) + ',' + format_number(s.offset_x) + ',' + format_number(s.offset_y) + '\n';
    }
    return out;
}

std::string write_transcript_json(std::span<const TranscriptSegment> segments) {
    ojson list = ojson::array();
    for (const auto& s : segments) {
        list.push_back({{"id", s.id}, {"start", ms_to_seconds(s.start)}, {"end", ms_to_seconds(s.end)}, {"text", s.text}});
    }
    return list.dump(2) + '\n';
}

std::string write_speaker_turns_json(std::span<const SpeakerTurn> turns) {
    ojson list = ojson::array();
    for (const auto& t : turns) {
        list.push_back({{"start", ms_to_seconds(t.start)}, {"end", ms_to_seconds(t.end)}, {"speaker", t.speaker}});
    }
    return list.dump(2) + '\n';
}

std::string write_aois_json(const Stimulus& stimulus) {
    ojson doc;
    doc["page_width"] = stimulus.page_width;
    doc["page_height"] = stimulus.page_height;
    doc["viewport_width"] = stimulus.viewport_width;
    doc["viewport_height"] = stimulus.viewport_height;
    ojson aois = ojson::array();
    for (const auto& a : stimulus.aois) {
        aois.push_back({{"id", a.id}, {"label", a.label}, {"x", a.rect.x}, {"y", a.rect.y}, {"w", a.rect.w}, {"h", a.rect.h}});
    }
    doc["aois"] = std::move(aois);
    return doc.dump(2) + '\n';
}

std::string write_annotations_json(const Annotations& annotations) {
    ojson list = ojson::array();
    for (const auto& [id, rec] : annotations) {
        ojson mentioned = ojson::array();
        for (const auto& a : rec.mentioned_aois) mentioned.push_back(a);
        list.push_back({{"id", id},
                        {"sentiment", std::string(to_string(rec.sentiment))},
                        {"mentioned_aois", std::move(mentioned)},
                        {"merge_with_previous", rec.merge_with_previous}});
    }
    ojson doc;
    doc["utterances"] = std::move(list);
    return doc.dump(2) + '\n';
}

SessionFiles session_files_from(const Session& session, const std::string& tester_label) {
    SessionFiles f;
    f.subject_id = session.subject_id;
    f.stimulus_id = session.stimulus_id;
    f.tester_label = tester_label;
    f.gaze = session.gaze;
    f.mouse = session.mouse;
    f.scroll = session.scroll;
    for (const auto& u : session.utterances) {
        f.transcript.push_back({u.id, u.start, u.end, u.text});
        f.speakers.push_back({u.start, u.end, tester_label});
        if (u.sentiment != Sentiment::unlabeled || !u.mentioned_aois.empty()) {
            f.annotations[u.id] = {u.sentiment, u.mentioned_aois, false};
        }
    }
    return f;
}

void write_text_file(const fs::path& file, std::string_view text) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + file.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("failed writing '" + file.string() + "'");
}

fs::path write_session_files(const fs::path& dir, const SessionFiles& files, const fs::path& aois_file,
                             const fs::path& screenshot, const SessionFileNames& names) {
    fs::create_directories(dir);
    write_text_file(dir / names.gaze, write_gaze_csv(files.gaze));
    write_text_file(dir / names.mouse, write_mouse_csv(files.mouse));
    write_text_file(dir / names.scroll, write_scroll_csv(files.scroll));
    write_text_file(dir / names.transcript, write_transcript_json(files.transcript));
    write_text_file(dir / names.speakers, write_speaker_turns_json(files.speakers));
    write_text_file(dir / names.annotations, write_annotations_json(files.annotations));

    auto relative = [&](const fs::path& p) {
        return fs::absolute(p).lexically_relative(fs::absolute(dir)).generic_string();
    };
    ojson m;
    m["subject_id"] = files.subject_id;
    m["stimulus_id"] = files.stimulus_id;
    m["tester_label"] = files.tester_label;
    if (!screenshot.empty()) m["screenshot"] = relative(screenshot);
    m["gaze"] = names.gaze;
    m["mouse"] = names.mouse;
    m["scroll"] = names.scroll;
    m["transcript"] = names.transcript;
    m["speakers"] = names.speakers;
    m["aois"] = relative(aois_file);
    m["annotations"] = names.annotations;
    const auto manifest = dir / names.manifest;
    write_text_file(manifest, m.dump(2) + '\n');
    return manifest;
}

}  // namespace gazelink
