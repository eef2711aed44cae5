#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gazelink/model.hpp"

namespace gazelink {

// ---------------------------------------------------------------------------
// Streams
// ---------------------------------------------------------------------------

/// Rows dropped because a later row carried the same timestamp.
struct DuplicateCounts {
    std::size_t gaze = 0;
    std::size_t mouse = 0;
    std::size_t scroll = 0;

    std::size_t total() const noexcept { return gaze + mouse + scroll; }
    bool operator==(const DuplicateCounts&) const = default;
};

template <typename Sample>
struct ParsedStream {
    std::vector<Sample> samples;
    std::size_t duplicates = 0;
};

// Each parser takes the full file text; `source` names the file in error messages.
// Rows are sorted by timestamp and de-duplicated with the last row winning.

/// Header `t_ms,x,y,valid`. Throws ParseError on an empty stream.
ParsedStream<GazeSample> parse_gaze_csv(std::string_view text, std::string_view source);
/// Header `t_ms,x,y`. An empty stream is allowed.
ParsedStream<MouseSample> parse_mouse_csv(std::string_view text, std::string_view source);
/// Header `t_ms,offset_x,offset_y`. An empty stream yields one zero-offset state at t=0.
ParsedStream<ScrollState> parse_scroll_csv(std::string_view text, std::string_view source);

struct ParsedStreams {
    std::vector<GazeSample> gaze;
    std::vector<MouseSample> mouse;
    std::vector<ScrollState> scroll;
    DuplicateCounts duplicates;
};

/// Reads all three streams from disk. A missing scroll path is treated as an empty scroll file.
ParsedStreams parse_streams(const std::filesystem::path& gaze_file,
                            const std::filesystem::path& mouse_file,
                            const std::optional<std::filesystem::path>& scroll_file);

// ---------------------------------------------------------------------------
// Speech
// ---------------------------------------------------------------------------

/// Seconds to integer milliseconds, rounding half up.
TimeMs seconds_to_ms(double seconds) noexcept;

struct TranscriptSegment {
    std::string id;
    TimeMs start = 0;
    TimeMs end = 0;
    std::string text;
    bool operator==(const TranscriptSegment&) const = default;
};

/// Accepts either a bare JSON array of `{start, end, text}` or an object with a
/// `segments` array (speech-recognizer output). Segment ids are taken from a
/// string `id` field when present, otherwise `u%04d` of the numeric id or of the
/// position in start order.
std::vector<TranscriptSegment> parse_transcript(std::string_view json_text, std::string_view source);

struct SpeakerTurn {
    TimeMs start = 0;
    TimeMs end = 0;
    std::string speaker;
    bool operator==(const SpeakerTurn&) const = default;
};

std::vector<SpeakerTurn> parse_speaker_turns(std::string_view json_text, std::string_view source);

struct DiarizationResult {
    std::vector<Utterance> utterances;
    std::size_t dropped_other_speaker = 0;
    std::size_t dropped_uncovered = 0;
    /// Segments where the tester tied with another speaker for the largest coverage.
    std::size_t tester_ties = 0;
};

/// Assigns every segment to the speaker whose turns cover most of it (ties go to
/// the tester) and keeps only the tester's segments.
DiarizationResult apply_diarization(const std::vector<TranscriptSegment>& segments,
                                    const std::vector<SpeakerTurn>& turns,
                                    const std::string& tester_label);

// ---------------------------------------------------------------------------
// AOIs and annotations
// ---------------------------------------------------------------------------

/// Parses the AOI layout file. The returned stimulus has empty id and screenshot.
Stimulus parse_aois(std::string_view json_text, std::string_view source);

/// Checks page/viewport geometry and every AOI; throws ValidationError naming the offender.
void validate_stimulus(const Stimulus& stimulus);

struct AnnotationRecord {
    Sentiment sentiment = Sentiment::unlabeled;
    std::set<std::string> mentioned_aois;
    bool merge_with_previous = false;
    bool operator==(const AnnotationRecord&) const = default;
};

/// Keyed by utterance id.
using Annotations = std::map<std::string, AnnotationRecord, std::less<>>;

Annotations parse_annotations(std::string_view json_text, std::string_view source);

/// Sets sentiment and mentioned AOIs on each utterance. Utterances without a
/// record become unlabeled with no mentions (excluded from hit rates).
/// Throws ValidationError on an unknown utterance or AOI id.
std::vector<Utterance> apply_annotations(std::vector<Utterance> utterances,
                                         const Annotations& annotations,
                                         const Stimulus& stimulus);

/// Merges consecutive same-speaker utterances whose gap is at most `max_gap_ms`
/// (automatic merging is disabled when `max_gap_ms` <= 0) or whose annotation
/// sets `merge_with_previous`. The merged utterance keeps the head's id and
/// sentiment (or the first labeled constituent's when the head is unlabeled).
std::vector<Utterance> merge_utterances(std::vector<Utterance> utterances, TimeMs max_gap_ms,
                                        const Annotations& annotations);

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

/// Facts recorded while loading a session that are not visible in the result.
struct IngestStats {
    DuplicateCounts duplicates;
    std::size_t dropped_other_speaker = 0;
    std::size_t dropped_uncovered = 0;
    std::size_t tester_ties = 0;
    std::vector<std::string> clamped_utterances;
    std::vector<std::string> dropped_out_of_range;
    bool operator==(const IngestStats&) const = default;
};

struct StreamGap {
    std::string stream;
    TimeMs from = 0;
    TimeMs to = 0;
    bool operator==(const StreamGap&) const = default;
};

struct ValidationReport {
    std::vector<StreamGap> gaps;
    std::size_t gaze_samples = 0;
    std::size_t invalid_gaze_samples = 0;
    std::vector<std::string> clamped_utterances;
    std::vector<std::string> dropped_out_of_range;
    std::size_t dropped_other_speaker = 0;
    std::size_t dropped_uncovered = 0;
    std::size_t tester_ties = 0;
    DuplicateCounts duplicates;

    double invalid_gaze_fraction() const noexcept;
    /// True when nothing was flagged.
    bool empty() const noexcept;
    /// One human-readable line per finding.
    std::vector<std::string> describe() const;
    bool operator==(const ValidationReport&) const = default;
};

inline constexpr TimeMs kDefaultGapReportMs = 500;

/// Reports stream gaps longer than `gap_threshold_ms` plus everything carried in `stats`.
ValidationReport validate_session(const Session& session, const IngestStats& stats = {},
                                  TimeMs gap_threshold_ms = kDefaultGapReportMs);

/// Clamps utterance windows to the stream range; utterances left empty are removed.
std::vector<Utterance> clamp_utterances(std::vector<Utterance> utterances, Interval range,
                                        IngestStats& stats);

struct Manifest {
    std::string subject_id;
    std::string stimulus_id;
    std::string tester_label;
    std::filesystem::path screenshot;
    std::filesystem::path gaze;
    std::filesystem::path mouse;
    std::optional<std::filesystem::path> scroll;
    std::filesystem::path transcript;
    std::filesystem::path speakers;
    std::filesystem::path aois;
    std::optional<std::filesystem::path> annotations;
};

/// Relative paths are resolved against the manifest's directory.
Manifest read_manifest(const std::filesystem::path& manifest_file);

struct IngestOptions {
    TimeMs max_gap_ms = 0;
    TimeMs gap_report_ms = kDefaultGapReportMs;
};

struct LoadedSession {
    Session session;
    Stimulus stimulus;
    ValidationReport report;
    std::filesystem::path manifest;
};

/// Full ingest of one session. Errors are rethrown with the manifest path prefixed.
LoadedSession load_session(const std::filesystem::path& manifest_file, const IngestOptions& options = {});

/// Reads a whole file; throws Error naming the path when it cannot be opened.
std::string read_text_file(const std::filesystem::path& file);

}  // namespace gazelink
