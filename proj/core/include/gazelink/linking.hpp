#pragma once

#include <span>
#include <string>
#include <vector>

#include "gazelink/model.hpp"
#include "gazelink/signal.hpp"

namespace gazelink {

struct LinkConfig {
    TimeMs padding_before_ms = 0;
    TimeMs padding_after_ms = 0;
    GazeEvidence gaze_evidence = GazeEvidence::fixations;
    TimeMs min_mouse_dwell_ms = 0;
};

/// Evidence that one modality's path crossed one AOI while an utterance was spoken.
struct LinkRecord {
    std::string utterance_id;
    std::string aoi_id;
    Modality modality = Modality::gaze;
    std::vector<Interval> evidence;
    TimeMs total_dwell_ms = 0;
    bool operator==(const LinkRecord&) const = default;
};

/// The utterance window padded by the config and clamped to the session range.
Interval utterance_window(const Session& session, const Utterance& utterance, const LinkConfig& config);

struct PathSegment {
    Interval window;
    std::span<const GazeSample> gaze;    // start <= t <= end
    std::span<const MouseSample> mouse;  // start <= t <= end
    std::vector<Fixation> fixations;     // any overlap with the closed window
};

PathSegment segment_paths(const Session& session, std::span<const Fixation> fixations, const Utterance& utterance,
                          const LinkConfig& config);

/// Gaze and mouse link records for one utterance, ordered by (aoi id, modality).
///
/// Timing model, all in integer milliseconds over the window [ws, we):
///  - fixations: a fixation contributes [max(start, ws), min(end, we)] to every
///    AOI containing its centroid;
///  - raw gaze: a valid sample at t in [ws, we] holds its page position (scroll
///    applied at t) until the next sample of the stream;
///  - mouse: the latest sample at or before each instant gives the cursor, mapped
///    with the scroll state of that instant.
/// Only positive dwell creates a record; mouse records also need at least
/// `min_mouse_dwell_ms`.
std::vector<LinkRecord> link_utterance(const Session& session, const Stimulus& stimulus,
                                       std::span<const Fixation> fixations, const Utterance& utterance,
                                       const LinkConfig& config);

/// Links every non-excluded utterance; ordered by (utterance start, utterance id, aoi id, modality).
std::vector<LinkRecord> link_session(const Session& session, const Stimulus& stimulus,
                                     std::span<const Fixation> fixations, const LinkConfig& config);

}  // namespace gazelink
