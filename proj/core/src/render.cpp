#include "gazelink/render.hpp"

#include <map>
#include <set>
#include <tuple>

#include "gazelink/error.hpp"
#include "gazelink/serialize.hpp"

namespace gazelink {

std::string_view to_string(MapHue h) noexcept {
    switch (h) {
        case MapHue::positive: return "positive";
        case MapHue::negative: return "negative";
        case MapHue::neutral: return "neutral";
        case MapHue::mixed: return "mixed";
        case MapHue::no_feedback: return "no_feedback";
    }
    return "no_feedback";
}

std::optional<double> AoiFeedback::score() const noexcept {
    if (labeled() == 0) return std::nullopt;
    return (static_cast<double>(positive) - static_cast<double>(negative)) / static_cast<double>(labeled());
}

MapHue classify_feedback(const AoiFeedback& f, const SentimentMapStyle& style) noexcept {
    if (f.total() == 0) return MapHue::no_feedback;
    const auto s = f.score();
    if (!s) return MapHue::mixed;
    if (*s > style.positive_cutoff) return MapHue::positive;
    if (*s < style.negative_cutoff) return MapHue::negative;
    return MapHue::neutral;
}

void tally_feedback(std::vector<AoiFeedback>& tally, const Stimulus& stimulus, std::span<const Utterance> utterances,
                    std::span<const LinkRecord> links, MapEvidence evidence) {
    if (tally.size() != stimulus.aois.size()) {
        tally.assign(stimulus.aois.size(), {});
        for (std::size_t a = 0; a < stimulus.aois.size(); ++a) tally[a].aoi_id = stimulus.aois[a].id;
    }
    std::set<std::tuple<std::string_view, std::string_view, Modality>> linked;
    for (const auto& l : links) linked.insert({l.utterance_id, l.aoi_id, l.modality});
    auto has = [&](const std::string& u, const std::string& a, Modality m) { return linked.contains({u, a, m}); };

    for (const auto& u : utterances) {
        for (std::size_t a = 0; a < stimulus.aois.size(); ++a) {
            const auto& id = stimulus.aois[a].id;
            if (!u.mentioned_aois.contains(id)) continue;
            bool counted = false;
            switch (evidence) {
                case MapEvidence::gaze_linked: counted = has(u.id, id, Modality::gaze); break;
                case MapEvidence::mouse_linked: counted = has(u.id, id, Modality::mouse); break;
                case MapEvidence::any_linked: counted = has(u.id, id, Modality::gaze) || has(u.id, id, Modality::mouse); break;
                case MapEvidence::mention_only: counted = true; break;
            }
            if (!counted) continue;
            auto& f = tally[a];
            switch (u.sentiment) {
                case Sentiment::positive: ++f.positive; break;
                case Sentiment::negative: ++f.negative; break;
                case Sentiment::neutral: ++f.neutral; break;
                case Sentiment::unlabeled: ++f.unlabeled; break;
            }
        }
    }
}

std::vector<AoiFeedback> aoi_feedback(const Stimulus& stimulus, std::span<const Utterance> utterances,
                                      std::span<const LinkRecord> links, MapEvidence evidence) {
    std::vector<AoiFeedback> tally;
    tally_feedback(tally, stimulus, utterances, links, evidence);
    return tally;
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string attr(std::string_view name, double v) { return std::string(" ") + std::string(name) + "=\"" + format_number(v) + "\""; }

const std::string& hue_color(MapHue h, const SentimentMapStyle& st) {
    switch (h) {
        case MapHue::positive: return st.positive_color;
        case MapHue::negative: return st.negative_color;
        case MapHue::neutral: return st.neutral_color;
        case MapHue::mixed: return st.mixed_color;
        case MapHue::no_feedback: break;
    }
    return st.no_feedback_color;
}

}  // namespace

std::string render_sentiment_map(const Stimulus& stimulus, std::span<const AoiFeedback> feedback,
                                 const SentimentMapStyle& style) {
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\"" +
           attr("width", stimulus.page_width) + attr("height", stimulus.page_height) + " viewBox=\"0 0 " +
           format_number(stimulus.page_width) + " " + format_number(stimulus.page_height) + "\">\n";
    if (style.include_screenshot && !stimulus.screenshot.empty()) {
        svg += "  <image x=\"0\" y=\"0\"" + attr("width", stimulus.page_width) + attr("height", stimulus.page_height) +
               " xlink:href=\"" + xml_escape(stimulus.screenshot) + "\"/>\n";
    }
    svg += "  <g id=\"aois\">\n";
    for (std::size_t a = 0; a < stimulus.aois.size(); ++a) {
        const Aoi& aoi = stimulus.aois[a];
        const AoiFeedback empty{aoi.id};
        const AoiFeedback& f = a < feedback.size() ? feedback[a] : empty;
        const MapHue hue = classify_feedback(f, style);
        const auto& color = hue_color(hue, style);
        svg += "    <rect id=\"aoi-" + xml_escape(aoi.id) + "\"" + attr("x", aoi.rect.x) + attr("y", aoi.rect.y) +
               attr("width", aoi.rect.w) + attr("height", aoi.rect.h);
        if (hue == MapHue::no_feedback) {
            svg += " fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" stroke-dasharray=\"6 4\"";
        } else {
            svg += " fill=\"" + color + "\"" + attr("fill-opacity", style.opacity) + " stroke=\"" + color + "\" stroke-width=\"2\"";
        }
        svg += "><title>" + xml_escape(aoi.id + " " + aoi.label) + " | " + std::string(to_string(hue));
        if (const auto s = f.score()) svg += " | s=" + format_number(*s);
        svg += " | +" + std::to_string(f.positive) + " -" + std::to_string(f.negative) + " =" + std::to_string(f.neutral) +
               " ?" + std::to_string(f.unlabeled) + "</title></rect>\n";
    }
    svg += "  </g>\n";
    if (style.legend) {
        const std::pair<MapHue, const char*> entries[] = {{MapHue::positive, "positive"},
                                                          {MapHue::neutral, "neutral"},
                                                          {MapHue::negative, "negative"},
                                                          {MapHue::mixed, "unlabeled feedback"},
                                                          {MapHue::no_feedback, "no feedback"}};
        svg += "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"14\">\n";
        svg += "    <rect x=\"8\" y=\"8\" width=\"190\" height=\"" + std::to_string(16 + 22 * 5) +
               "\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#999999\"/>\n";
        int y = 16;
        for (const auto& [hue, label] : entries) {
            const auto& color = hue_color(hue, style);
            svg += "    <rect x=\"16\" y=\"" + std::to_string(y) + "\" width=\"16\" height=\"16\"";
            svg += hue == MapHue::no_feedback ? " fill=\"none\" stroke=\"" + color + "\" stroke-dasharray=\"3 2\"/>\n"
                                               : " fill=\"" + color + "\"" + attr("fill-opacity", style.opacity) + "/>\n";
            svg += "    <text x=\"40\" y=\"" + std::to_string(y + 13) + "\">" + label + "</text>\n";
            y += 22;
        }
        svg += "  </g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_sentiment_map(const Stimulus& stimulus, std::span<const Utterance> utterances,
                                 std::span<const LinkRecord> links, const SentimentMapStyle& style) {
    const auto fb = aoi_feedback(stimulus, utterances, links, style.evidence);
    return render_sentiment_map(stimulus, fb, style);
}

std::string render_sentiment_map(const StudyBundle& bundle, std::string_view stimulus_id,
                                 std::optional<std::string> screenshot_href) {
    const Stimulus* found = bundle.find_stimulus(stimulus_id);
    if (!found) throw ValidationError("bundle has no stimulus '" + std::string(stimulus_id) + "'");
    Stimulus stim = *found;
    if (screenshot_href) stim.screenshot = *screenshot_href;
    std::vector<AoiFeedback> tally;
    tally_feedback(tally, stim, {}, {}, bundle.config.map.evidence);
    for (const auto& s : bundle.sessions) {
        if (s.stimulus_id == stimulus_id) tally_feedback(tally, stim, s.utterances, s.links, bundle.config.map.evidence);
    }
    return render_sentiment_map(stim, tally, bundle.config.map);
}

}  // namespace gazelink
