#include "gazelink/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gazelink/error.hpp"

namespace gazelink {

ScrollState scroll_at(std::span<const ScrollState> stream, TimeMs t) {
    if (stream.empty()) throw std::invalid_argument("scroll_at: empty scroll stream");
    auto it = std::upper_bound(stream.begin(), stream.end(), t, [](TimeMs v, const ScrollState& s) { return v < s.t; });
    if (it == stream.begin()) return stream.front();
    return *std::prev(it);
}

double dispersion(std::span<const PagePoint> points) noexcept {
    if (points.empty()) return 0.0;
    double min_x = points[0].x, max_x = points[0].x, min_y = points[0].y, max_y = points[0].y;
    for (const auto& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    return (max_x - min_x) + (max_y - min_y);
}

namespace {

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(PagePoint p) noexcept {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    Bounds with(PagePoint p) const noexcept {
        Bounds b = *this;
        b.add(p);
        return b;
    }
    double spread() const noexcept { return (max_x - min_x) + (max_y - min_y); }
};

}  // namespace

std::vector<Fixation> detect_fixations(std::span<const GazeSample> gaze, std::span<const ScrollState> scroll,
                                       const FixationParams& params) {
    if (!(params.dispersion_threshold_px > 0) || params.min_duration_ms <= 0) {
        throw std::invalid_argument("detect_fixations: thresholds must be positive");
    }
    std::vector<Fixation> out;
    const std::size_t n = gaze.size();
    if (n == 0) return out;

    const ScrollState zero{};
    std::vector<PagePoint> page(n);
    std::size_t cursor = 0;  // scroll index, advanced monotonically since gaze is sorted
    for (std::size_t k = 0; k < n; ++k) {
        const ScrollState* s = &zero;
        if (!scroll.empty()) {
            while (cursor + 1 < scroll.size() && scroll[cursor + 1].t <= gaze[k].t) ++cursor;
            s = &scroll[cursor];
        }
        page[k] = to_page_coords({gaze[k].x, gaze[k].y}, *s);
    }

    std::size_t i = 0;
    while (i < n) {
        if (!gaze[i].valid) {
            ++i;
            continue;
        }
        // Smallest window starting at i that spans the minimum duration.
        Bounds bounds;
        bounds.add(page[i]);
        std::size_t j = i;
        bool broken = false;
        while (gaze[j].t - gaze[i].t < params.min_duration_ms) {
            ++j;
            if (j >= n || !gaze[j].valid) {
                broken = true;
                break;
            }
            bounds.add(page[j]);
        }
        if (broken) {
            // No window starting before j can reach the minimum duration without crossing it.
            i = j + 1;
            continue;
        }
        if (bounds.spread() > params.dispersion_threshold_px) {
            ++i;
            continue;
        }
        while (j + 1 < n && gaze[j + 1].valid && bounds.with(page[j + 1]).spread() <= params.dispersion_threshold_px) {
            ++j;
            bounds.add(page[j]);
        }
        Fixation f;
        f.span = {gaze[i].t, gaze[j].t};
        double sx = 0.0, sy = 0.0;
        for (std::size_t k = i; k <= j; ++k) {
            sx += page[k].x;
            sy += page[k].y;
        }
        f.sample_count = j - i + 1;
        f.centroid = {sx / static_cast<double>(f.sample_count), sy / static_cast<double>(f.sample_count)};
        f.dispersion = bounds.spread();
        out.push_back(f);
        i = j + 1;
    }
    return out;
}

std::string_view to_string(MouseActivityKind k) noexcept {
    switch (k) {
        case MouseActivityKind::scroll: return "scroll";
        case MouseActivityKind::move: return "move";
        case MouseActivityKind::idle: break;
    }
    return "idle";
}

MouseActivityKind parse_mouse_activity_kind(std::string_view name) {
    if (name == "idle") return MouseActivityKind::idle;
    if (name == "scroll") return MouseActivityKind::scroll;
    if (name == "move") return MouseActivityKind::move;
    throw ValidationError("unknown mouse activity kind '" + std::string(name) + "'");
}

std::vector<MouseActivity> classify_mouse_activity(std::span<const MouseSample> mouse,
                                                   std::span<const ScrollState> scroll, Interval timeline,
                                                   const MouseActivityParams& params) {
    if (params.quantum_ms <= 0) throw std::invalid_argument("classify_mouse_activity: quantum must be positive");
    std::vector<MouseActivity> out;
    if (timeline.end <= timeline.start) return out;

    // Scroll events that actually change the offset.
    std::vector<TimeMs> changes;
    for (std::size_t k = 1; k < scroll.size(); ++k) {
        if (scroll[k].offset_x != scroll[k - 1].offset_x || scroll[k].offset_y != scroll[k - 1].offset_y) {
            changes.push_back(scroll[k].t);
        }
    }

    std::size_t m = 0;  // first mouse sample with t >= quantum start
    std::size_t c = 0;  // first change with t >= quantum start
    while (m < mouse.size() && mouse[m].t < timeline.start) ++m;
    while (c < changes.size() && changes[c] < timeline.start) ++c;

    for (TimeMs q = timeline.start; q < timeline.end; q += params.quantum_ms) {
        const TimeMs q_end = std::min(q + params.quantum_ms, timeline.end);
        // The last quantum is closed so events at timeline.end are not lost.
        const bool last = q_end == timeline.end;
        auto inside = [&](TimeMs t) { return t < q_end || (last && t == q_end); };

        bool scrolled = false;
        while (c < changes.size() && inside(changes[c])) {
            scrolled = true;
            ++c;
        }
        double path = 0.0;
        bool have_prev = m > 0;
        double px = have_prev ? mouse[m - 1].x : 0.0;
        double py = have_prev ? mouse[m - 1].y : 0.0;
        while (m < mouse.size() && inside(mouse[m].t)) {
            if (have_prev) path += std::hypot(mouse[m].x - px, mouse[m].y - py);
            px = mouse[m].x;
            py = mouse[m].y;
            have_prev = true;
            ++m;
        }
        const auto kind = scrolled                              ? MouseActivityKind::scroll
                          : path >= params.move_threshold_px ? MouseActivityKind::move
                                                             : MouseActivityKind::idle;
        if (!out.empty() && out.back().kind == kind) {
            out.back().window.end = q_end;
        } else {
            out.push_back({{q, q_end}, kind});
        }
    }
    return out;
}

}  // namespace gazelink
