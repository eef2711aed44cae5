#include "gazelink/model.hpp"

#include <algorithm>

#include "gazelink/error.hpp"

namespace gazelink {

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + message),
      source_(std::move(source)),
      line_(line) {}

const Aoi* Stimulus::find_aoi(std::string_view aoi_id) const noexcept {
    auto it = std::find_if(aois.begin(), aois.end(), [&](const Aoi& a) { return a.id == aoi_id; });
    return it == aois.end() ? nullptr : &*it;
}

std::string_view to_string(Sentiment s) noexcept {
    switch (s) {
        case Sentiment::positive: return "positive";
        case Sentiment::negative: return "negative";
        case Sentiment::neutral: return "neutral";
        case Sentiment::unlabeled: break;
    }
    return "unlabeled";
}

Sentiment parse_sentiment(std::string_view name) {
    if (name == "positive") return Sentiment::positive;
    if (name == "negative") return Sentiment::negative;
    if (name == "neutral") return Sentiment::neutral;
    if (name == "unlabeled" || name.empty()) return Sentiment::unlabeled;
    throw ValidationError("unknown sentiment '" + std::string(name) + "'");
}

std::string_view to_string(Modality m) noexcept {
    return m == Modality::gaze ? "gaze" : "mouse";
}

Modality parse_modality(std::string_view name) {
    if (name == "gaze") return Modality::gaze;
    if (name == "mouse") return Modality::mouse;
    throw ValidationError("unknown modality '" + std::string(name) + "'");
}

std::string_view to_string(GazeEvidence g) noexcept {
    return g == GazeEvidence::fixations ? "fixations" : "raw_samples";
}

GazeEvidence parse_gaze_evidence(std::string_view name) {
    if (name == "fixations") return GazeEvidence::fixations;
    if (name == "raw_samples") return GazeEvidence::raw_samples;
    throw ValidationError("unknown gaze evidence mode '" + std::string(name) + "'");
}

std::string_view to_string(Aggregation a) noexcept {
    return a == Aggregation::micro ? "micro" : "macro";
}

Aggregation parse_aggregation(std::string_view name) {
    if (name == "micro") return Aggregation::micro;
    if (name == "macro") return Aggregation::macro;
    throw ValidationError("unknown aggregation '" + std::string(name) + "'");
}

Interval Session::time_range() const noexcept {
    bool any = false;
    Interval r;
    auto widen = [&](TimeMs first, TimeMs last) {
        if (!any) {
            r = {first, last};
            any = true;
        } else {
            r.start = std::min(r.start, first);
            r.end = std::max(r.end, last);
        }
    };
    if (!gaze.empty()) widen(gaze.front().t, gaze.back().t);
    if (!mouse.empty()) widen(mouse.front().t, mouse.back().t);
    return r;
}

const Utterance* Session::find_utterance(std::string_view utterance_id) const noexcept {
    auto it = std::find_if(utterances.begin(), utterances.end(),
                           [&](const Utterance& u) { return u.id == utterance_id; });
    return it == utterances.end() ? nullptr : &*it;
}

PagePoint to_page_coords(ViewportPoint p, const ScrollState& s) noexcept {
    return {p.x + s.offset_x, p.y + s.offset_y};
}

ViewportPoint to_viewport_coords(PagePoint p, const ScrollState& s) noexcept {
    return {p.x - s.offset_x, p.y - s.offset_y};
}

bool point_in_rect(PagePoint p, const Rect& r) noexcept {
    return r.x <= p.x && p.x < r.x + r.w && r.y <= p.y && p.y < r.y + r.h;
}

bool point_in_aoi(PagePoint p, const Aoi& a) noexcept {
    return point_in_rect(p, a.rect);
}

TimeMs interval_overlap(Interval a, Interval b) noexcept {
    return std::max<TimeMs>(0, std::min(a.end, b.end) - std::max(a.start, b.start));
}

}  // namespace gazelink
