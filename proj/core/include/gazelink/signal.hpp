#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gazelink/model.hpp"

namespace gazelink {

/// Step lookup: the latest state with state.t <= t, or the first state when t
/// precedes every event. `stream` must be non-empty and sorted.
ScrollState scroll_at(std::span<const ScrollState> stream, TimeMs t);

struct Fixation {
    Interval span;  // first to last constituent sample, inclusive
    PagePoint centroid;
    double dispersion = 0.0;
    std::size_t sample_count = 0;
    bool operator==(const Fixation&) const = default;
};

struct FixationParams {
    double dispersion_threshold_px = 40.0;
    TimeMs min_duration_ms = 100;
};

/// Sum of the x and y extents of the points.
double dispersion(std::span<const PagePoint> points) noexcept;

/// Dispersion-threshold (I-DT) detection over valid samples mapped into page
/// coordinates. Invalid samples break any window in progress.
/// Throws std::invalid_argument when a threshold is not positive.
std::vector<Fixation> detect_fixations(std::span<const GazeSample> gaze, std::span<const ScrollState> scroll,
                                       const FixationParams& params = {});

enum class MouseActivityKind { idle, scroll, move };

std::string_view to_string(MouseActivityKind k) noexcept;
MouseActivityKind parse_mouse_activity_kind(std::string_view name);

struct MouseActivity {
    Interval window;
    MouseActivityKind kind = MouseActivityKind::idle;
    bool operator==(const MouseActivity&) const = default;
};

struct MouseActivityParams {
    TimeMs quantum_ms = 250;
    double move_threshold_px = 5.0;
};

/// Splits `timeline` into quanta and labels each one: `scroll` when the scroll
/// offset changes inside it, else `move` when the cursor path length reaches the
/// threshold, else `idle`. Adjacent quanta of one kind are merged, so the result
/// tiles `timeline` exactly.
std::vector<MouseActivity> classify_mouse_activity(std::span<const MouseSample> mouse,
                                                   std::span<const ScrollState> scroll, Interval timeline,
                                                   const MouseActivityParams& params = {});

}  // namespace gazelink
