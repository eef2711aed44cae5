#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gazelink/ingest.hpp"
#include "gazelink/model.hpp"

namespace gazelink {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

std::string write_gaze_csv(std::span<const GazeSample> gaze);
std::string write_mouse_csv(std::span<const MouseSample> mouse);
std::string write_scroll_csv(std::span<const ScrollState> scroll);
std::string write_transcript_json(std::span<const TranscriptSegment> segments);
std::string write_speaker_turns_json(std::span<const SpeakerTurn> turns);
std::string write_aois_json(const Stimulus& stimulus);
std::string write_annotations_json(const Annotations& annotations);

/// Everything needed to write one session's file set.
struct SessionFiles {
    std::string subject_id;
    std::string stimulus_id;
    std::string tester_label = "tester";
    std::vector<GazeSample> gaze;
    std::vector<MouseSample> mouse;
    std::vector<ScrollState> scroll;
    std::vector<TranscriptSegment> transcript;
    std::vector<SpeakerTurn> speakers;
    Annotations annotations;
};

/// Inverse of ingest for an already-loaded session: one transcript segment and
/// one tester turn per utterance, one annotation record per labeled utterance.
SessionFiles session_files_from(const Session& session, const std::string& tester_label = "tester");

/// File names used inside a session directory.
struct SessionFileNames {
    std::string gaze = "gaze.csv";
    std::string mouse = "mouse.csv";
    std::string scroll = "scroll.csv";
    std::string transcript = "transcript.json";
    std::string speakers = "speakers.json";
    std::string annotations = "annotations.json";
    std::string manifest = "manifest.json";
};

/// Writes the session's streams and speech files into `dir` plus a manifest that
/// points at `aois_file` and `screenshot` (both may live elsewhere; stored relative
/// to `dir`). Returns the manifest path.
std::filesystem::path write_session_files(const std::filesystem::path& dir, const SessionFiles& files,
                                          const std::filesystem::path& aois_file,
                                          const std::filesystem::path& screenshot,
                                          const SessionFileNames& names = {});

/// Writes `text` to `file`, creating parent directories.
void write_text_file(const std::filesystem::path& file, std::string_view text);

}  // namespace gazelink
