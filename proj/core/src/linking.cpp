#include "gazelink/linking.hpp"

#include <algorithm>
#include <map>

namespace gazelink {

namespace {

// Accumulates per-AOI evidence, coalescing intervals that touch.
class EvidenceSet {
public:
    explicit EvidenceSet(const Stimulus& stimulus) : stimulus_(stimulus), spans_(stimulus.aois.size()) {}

    void add_point(PagePoint p, Interval span, bool coalesce) {
        if (span.length() <= 0) return;
        for (std::size_t a = 0; a < stimulus_.aois.size(); ++a) {
            if (!point_in_aoi(p, stimulus_.aois[a])) continue;
            auto& list = spans_[a];
            if (coalesce && !list.empty() && list.back().end == span.start) {
                list.back().end = span.end;
            } else {
                list.push_back(span);
            }
        }
    }

    void emit(const std::string& utterance_id, Modality modality, TimeMs min_dwell, std::vector<LinkRecord>& out) const {
        for (std::size_t a = 0; a < spans_.size(); ++a) {
            TimeMs dwell = 0;
            for (const auto& s : spans_[a]) dwell += s.length();
            if (dwell <= 0 || dwell < min_dwell) continue;
            out.push_back({utterance_id, stimulus_.aois[a].id, modality, spans_[a], dwell});
        }
    }

private:
    const Stimulus& stimulus_;
    std::vector<std::vector<Interval>> spans_;
};

ScrollState offset_at(std::span<const ScrollState> scroll, TimeMs t) {
    return scroll.empty() ? ScrollState{} : scroll_at(scroll, t);
}

template <typename Sample>
std::span<const Sample> samples_in(std::span<const Sample> stream, Interval w) {
    auto lo = std::lower_bound(stream.begin(), stream.end(), w.start, [](const Sample& s, TimeMs t) { return s.t < t; });
    auto hi = std::upper_bound(lo, stream.end(), w.end, [](TimeMs t, const Sample& s) { return t < s.t; });
    return {lo, hi};
}

void link_fixations(std::span<const Fixation> fixations, Interval w, EvidenceSet& set) {
    for (const auto& f : fixations) {
        if (f.span.end < w.start || f.span.start > w.end) continue;
        set.add_point(f.centroid, {std::max(f.span.start, w.start), std::min(f.span.end, w.end)}, false);
    }
}

void link_raw_gaze(const Session& session, Interval w, EvidenceSet& set) {
    const std::span<const GazeSample> gaze(session.gaze);
    auto first = std::lower_bound(gaze.begin(), gaze.end(), w.start, [](const GazeSample& s, TimeMs t) { return s.t < t; });
    for (auto it = first; it != gaze.end() && it->t <= w.end; ++it) {
        if (!it->valid) continue;
        const TimeMs hold_end = std::next(it) != gaze.end() ? std::next(it)->t : it->t;
        const auto page = to_page_coords({it->x, it->y}, offset_at(session.scroll, it->t));
        set.add_point(page, {it->t, std::min(hold_end, w.end)}, true);
    }
}

void link_mouse(const Session& session, Interval w, EvidenceSet& set) {
    const auto& mouse = session.mouse;
    const auto& scroll = session.scroll;
    if (mouse.empty() || w.length() <= 0) return;

    // Cursor = latest sample at or before the instant.
    auto m = std::upper_bound(mouse.begin(), mouse.end(), w.start, [](TimeMs t, const MouseSample& s) { return t < s.t; });
    auto s = std::upper_bound(scroll.begin(), scroll.end(), w.start, [](TimeMs t, const ScrollState& st) { return t < st.t; });
    const MouseSample* held = m == mouse.begin() ? nullptr : &*std::prev(m);
    ScrollState offset = offset_at(scroll, w.start);

    TimeMs t = w.start;
    while (t < w.end) {
        const TimeMs next_mouse = m != mouse.end() ? m->t : w.end;
        const TimeMs next_scroll = s != scroll.end() ? s->t : w.end;
        const TimeMs next = std::min({next_mouse, next_scroll, w.end});
        if (held) set.add_point(to_page_coords({held->x, held->y}, offset), {t, next}, true);
        t = next;
        while (m != mouse.end() && m->t <= t) held = &*m++;
        while (s != scroll.end() && s->t <= t) offset = *s++;
    }
}

}  // namespace

Interval utterance_window(const Session& session, const Utterance& utterance, const LinkConfig& config) {
    const Interval range = session.time_range();
    Interval w{utterance.start - config.padding_before_ms, utterance.end + config.padding_after_ms};
    w.start = std::max(w.start, range.start);
    w.end = std::min(w.end, range.end);
    if (w.end < w.start) w.end = w.start;
    return w;
}

PathSegment segment_paths(const Session& session, std::span<const Fixation> fixations, const Utterance& utterance,
                          const LinkConfig& config) {
    PathSegment seg;
    seg.window = utterance_window(session, utterance, config);
    seg.gaze = samples_in(std::span<const GazeSample>(session.gaze), seg.window);
    seg.mouse = samples_in(std::span<const MouseSample>(session.mouse), seg.window);
    for (const auto& f : fixations) {
        if (f.span.end >= seg.window.start && f.span.start <= seg.window.end) seg.fixations.push_back(f);
    }
    return seg;
}

std::vector<LinkRecord> link_utterance(const Session& session, const Stimulus& stimulus,
                                       std::span<const Fixation> fixations, const Utterance& utterance,
                                       const LinkConfig& config) {
    const Interval w = utterance_window(session, utterance, config);
    std::vector<LinkRecord> out;

    EvidenceSet gaze(stimulus);
    if (config.gaze_evidence == GazeEvidence::fixations) {
        link_fixations(fixations, w, gaze);
    } else {
        link_raw_gaze(session, w, gaze);
    }
    gaze.emit(utterance.id, Modality::gaze, 0, out);

    EvidenceSet mouse(stimulus);
    link_mouse(session, w, mouse);
    mouse.emit(utterance.id, Modality::mouse, config.min_mouse_dwell_ms, out);

    std::sort(out.begin(), out.end(), [](const LinkRecord& a, const LinkRecord& b) {
        return std::tie(a.aoi_id, a.modality) < std::tie(b.aoi_id, b.modality);
    });
    return out;
}

std::vector<LinkRecord> link_session(const Session& session, const Stimulus& stimulus,
                                     std::span<const Fixation> fixations, const LinkConfig& config) {
    std::vector<const Utterance*> order;
    for (const auto& u : session.utterances) {
        if (!u.excluded()) order.push_back(&u);
    }
    std::sort(order.begin(), order.end(), [](const Utterance* a, const Utterance* b) {
        return std::tie(a->start, a->id) < std::tie(b->start, b->id);
    });
    std::vector<LinkRecord> out;
    for (const auto* u : order) {
        auto records = link_utterance(session, stimulus, fixations, *u, config);
        out.insert(out.end(), std::make_move_iterator(records.begin()), std::make_move_iterator(records.end()));
    }
    return out;
}

}  // namespace gazelink
