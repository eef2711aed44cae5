#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gazelink {

/// Milliseconds since session start.
using TimeMs = std::int64_t;

/// Closed-open or closed time range depending on use; see each operation.
struct Interval {
    TimeMs start = 0;
    TimeMs end = 0;

    TimeMs length() const noexcept { return end - start; }
    bool operator==(const Interval&) const = default;
};

struct ViewportPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const ViewportPoint&) const = default;
};

struct PagePoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const PagePoint&) const = default;
};

struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    bool operator==(const Rect&) const = default;
};

struct GazeSample {
    TimeMs t = 0;
    double x = 0.0;
    double y = 0.0;
    bool valid = true;
    bool operator==(const GazeSample&) const = default;
};

struct MouseSample {
    TimeMs t = 0;
    double x = 0.0;
    double y = 0.0;
    bool operator==(const MouseSample&) const = default;
};

/// Offset of the viewport origin within the page.
struct ScrollState {
    TimeMs t = 0;
    double offset_x = 0.0;
    double offset_y = 0.0;
    bool operator==(const ScrollState&) const = default;
};

struct Aoi {
    std::string id;
    std::string label;
    Rect rect;
    bool operator==(const Aoi&) const = default;
};

struct Stimulus {
    std::string id;
    std::string screenshot;
    double page_width = 0.0;
    double page_height = 0.0;
    double viewport_width = 0.0;
    double viewport_height = 0.0;
    std::vector<Aoi> aois;

    const Aoi* find_aoi(std::string_view aoi_id) const noexcept;
    bool operator==(const Stimulus&) const = default;
};

enum class Sentiment { positive, negative, neutral, unlabeled };

std::string_view to_string(Sentiment s) noexcept;
/// Throws ValidationError on an unknown name.
Sentiment parse_sentiment(std::string_view name);

enum class Modality { gaze, mouse };

std::string_view to_string(Modality m) noexcept;
Modality parse_modality(std::string_view name);

enum class GazeEvidence { fixations, raw_samples };

std::string_view to_string(GazeEvidence g) noexcept;
GazeEvidence parse_gaze_evidence(std::string_view name);

/// micro pools mention/hit counts before dividing; macro averages per-statement rates.
enum class Aggregation { micro, macro };

std::string_view to_string(Aggregation a) noexcept;
Aggregation parse_aggregation(std::string_view name);

struct Utterance {
    std::string id;
    std::string speaker;
    TimeMs start = 0;
    TimeMs end = 0;
    std::string text;
    Sentiment sentiment = Sentiment::unlabeled;
    std::set<std::string> mentioned_aois;

    /// Statements that mention no AOI stay in the session but never enter a hit rate.
    bool excluded() const noexcept { return mentioned_aois.empty(); }
    bool operator==(const Utterance&) const = default;
};

struct Session {
    std::string subject_id;
    std::string stimulus_id;
    std::vector<GazeSample> gaze;
    std::vector<MouseSample> mouse;
    std::vector<ScrollState> scroll;
    std::vector<Utterance> utterances;

    /// Earliest to latest timestamp over the gaze and mouse streams.
    /// Returns {0, 0} when both streams are empty.
    Interval time_range() const noexcept;

    const Utterance* find_utterance(std::string_view utterance_id) const noexcept;
    bool operator==(const Session&) const = default;
};

PagePoint to_page_coords(ViewportPoint p, const ScrollState& s) noexcept;
ViewportPoint to_viewport_coords(PagePoint p, const ScrollState& s) noexcept;

/// Half-open membership: closed on the min edges, open on the max edges.
bool point_in_rect(PagePoint p, const Rect& r) noexcept;
bool point_in_aoi(PagePoint p, const Aoi& a) noexcept;

/// Length of the intersection of two intervals, never negative.
TimeMs interval_overlap(Interval a, Interval b) noexcept;

}  // namespace gazelink
