#include "gazelink/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "gazelink/error.hpp"
#include "json_io.hpp"

namespace gazelink {

std::string_view to_string(MapEvidence e) noexcept {
    switch (e) {
        case MapEvidence::mouse_linked: return "mouse_linked";
        case MapEvidence::any_linked: return "any_linked";
        case MapEvidence::mention_only: return "mention_only";
        case MapEvidence::gaze_linked: break;
    }
    return "gaze_linked";
}

MapEvidence parse_map_evidence(std::string_view name) {
    if (name == "gaze_linked") return MapEvidence::gaze_linked;
    if (name == "mouse_linked") return MapEvidence::mouse_linked;
    if (name == "any_linked") return MapEvidence::any_linked;
    if (name == "mention_only") return MapEvidence::mention_only;
    throw ValidationError("unknown map evidence mode '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& rule) {
        throw ValidationError("config: " + field + " " + rule);
    };
    if (!(dispersion_threshold_px > 0) || !std::isfinite(dispersion_threshold_px)) fail("dispersion_threshold_px", "must be > 0");
    if (min_duration_ms <= 0) fail("min_duration_ms", "must be > 0");
    if (quantum_ms <= 0) fail("quantum_ms", "must be > 0");
    if (!(move_threshold_px > 0) || !std::isfinite(move_threshold_px)) fail("move_threshold_px", "must be > 0");
    if (padding_before_ms < 0) fail("padding_before_ms", "must be >= 0");
    if (padding_after_ms < 0) fail("padding_after_ms", "must be >= 0");
    if (min_mouse_dwell_ms < 0) fail("min_mouse_dwell_ms", "must be >= 0");
    if (max_gap_ms < 0) fail("max_gap_ms", "must be >= 0");
    if (gap_report_ms <= 0) fail("gap_report_ms", "must be > 0");
    if (!(map.opacity >= 0.0 && map.opacity <= 1.0)) fail("map.opacity", "must lie in [0, 1]");
    if (!(map.negative_cutoff <= map.positive_cutoff)) fail("map.negative_cutoff", "must not exceed map.positive_cutoff");
    if (!(map.positive_cutoff >= -1.0 && map.positive_cutoff <= 1.0)) fail("map.positive_cutoff", "must lie in [-1, 1]");
    if (!(map.negative_cutoff >= -1.0 && map.negative_cutoff <= 1.0)) fail("map.negative_cutoff", "must lie in [-1, 1]");
    const std::set<std::string> colors{map.positive_color, map.negative_color, map.neutral_color, map.mixed_color,
                                       map.no_feedback_color};
    if (colors.size() != 5) fail("map colors", "must be distinct");
}

namespace detail {

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

double number_or_inf(const ojson& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
}

ojson config_to_json(const PipelineConfig& c) {
    ojson map;
    map["positive_color"] = c.map.positive_color;
    map["negative_color"] = c.map.negative_color;
    map["neutral_color"] = c.map.neutral_color;
    map["mixed_color"] = c.map.mixed_color;
    map["no_feedback_color"] = c.map.no_feedback_color;
    map["opacity"] = c.map.opacity;
    map["legend"] = c.map.legend;
    map["include_screenshot"] = c.map.include_screenshot;
    map["positive_cutoff"] = c.map.positive_cutoff;
    map["negative_cutoff"] = c.map.negative_cutoff;
    map["evidence"] = std::string(to_string(c.map.evidence));

    ojson j;
    j["dispersion_threshold_px"] = c.dispersion_threshold_px;
    j["min_duration_ms"] = c.min_duration_ms;
    j["quantum_ms"] = c.quantum_ms;
    j["move_threshold_px"] = c.move_threshold_px;
    j["padding_before_ms"] = c.padding_before_ms;
    j["padding_after_ms"] = c.padding_after_ms;
    j["gaze_evidence"] = std::string(to_string(c.gaze_evidence));
    j["min_mouse_dwell_ms"] = c.min_mouse_dwell_ms;
    j["max_gap_ms"] = c.max_gap_ms;
    j["gap_report_ms"] = c.gap_report_ms;
    j["aggregation"] = std::string(to_string(c.aggregation));
    j["anova_drop_incomplete"] = c.anova_drop_incomplete;
    j["map"] = std::move(map);
    return j;
}

namespace {

template <typename T>
void read_field(const ojson& obj, const char* key, T& out, std::string_view source) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const ojson::exception&) {
        throw ParseError(std::string(source), 0, std::string("config field '") + key + "' has the wrong type");
    }
}

template <typename Enum, typename Parse>
void read_enum(const ojson& obj, const char* key, Enum& out, Parse parse, std::string_view source) {
    std::string name;
    read_field(obj, key, name, source);
    if (!obj.contains(key)) return;
    try {
        out = parse(name);
    } catch (const ValidationError& e) {
        throw ParseError(std::string(source), 0, e.what());
    }
}

void reject_unknown(const ojson& obj, const std::set<std::string>& known, std::string_view source,
                    const std::string& prefix) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) throw ParseError(std::string(source), 0, "unknown config key '" + prefix + key + "'");
    }
}

}  // namespace

PipelineConfig config_from_json(const ojson& j, std::string_view source) {
    if (!j.is_object()) throw ParseError(std::string(source), 0, "config must be a JSON object");
    reject_unknown(j,
                   {"dispersion_threshold_px", "min_duration_ms", "quantum_ms", "move_threshold_px",
                    "padding_before_ms", "padding_after_ms", "gaze_evidence", "min_mouse_dwell_ms", "max_gap_ms",
                    "gap_report_ms", "aggregation", "anova_drop_incomplete", "map"},
                   source, "");
    PipelineConfig c;
    read_field(j, "dispersion_threshold_px", c.dispersion_threshold_px, source);
    read_field(j, "min_duration_ms", c.min_duration_ms, source);
    read_field(j, "quantum_ms", c.quantum_ms, source);
    read_field(j, "move_threshold_px", c.move_threshold_px, source);
    read_field(j, "padding_before_ms", c.padding_before_ms, source);
    read_field(j, "padding_after_ms", c.padding_after_ms, source);
    read_enum(j, "gaze_evidence", c.gaze_evidence, parse_gaze_evidence, source);
    read_field(j, "min_mouse_dwell_ms", c.min_mouse_dwell_ms, source);
    read_field(j, "max_gap_ms", c.max_gap_ms, source);
    read_field(j, "gap_report_ms", c.gap_report_ms, source);
    read_enum(j, "aggregation", c.aggregation, parse_aggregation, source);
    read_field(j, "anova_drop_incomplete", c.anova_drop_incomplete, source);
    if (j.contains("map")) {
        const auto& m = j.at("map");
        if (!m.is_object()) throw ParseError(std::string(source), 0, "config field 'map' must be an object");
        reject_unknown(m,
                       {"positive_color", "negative_color", "neutral_color", "mixed_color", "no_feedback_color",
                        "opacity", "legend", "include_screenshot", "positive_cutoff", "negative_cutoff", "evidence"},
                       source, "map.");
        read_field(m, "positive_color", c.map.positive_color, source);
        read_field(m, "negative_color", c.map.negative_color, source);
        read_field(m, "neutral_color", c.map.neutral_color, source);
        read_field(m, "mixed_color", c.map.mixed_color, source);
        read_field(m, "no_feedback_color", c.map.no_feedback_color, source);
        read_field(m, "opacity", c.map.opacity, source);
        read_field(m, "legend", c.map.legend, source);
        read_field(m, "include_screenshot", c.map.include_screenshot, source);
        read_field(m, "positive_cutoff", c.map.positive_cutoff, source);
        read_field(m, "negative_cutoff", c.map.negative_cutoff, source);
        read_enum(m, "evidence", c.map.evidence, parse_map_evidence, source);
    }
    return c;
}

}  // namespace detail

PipelineConfig parse_pipeline_config(std::string_view json_text, std::string_view source) {
    detail::ojson doc;
    try {
        doc = detail::ojson::parse(json_text);
    } catch (const detail::ojson::parse_error& e) {
        throw ParseError(std::string(source), 0, std::string("invalid JSON: ") + e.what());
    }
    auto c = detail::config_from_json(doc, source);
    c.validate();
    return c;
}

std::string write_pipeline_config(const PipelineConfig& config) {
    return detail::config_to_json(config).dump(2) + '\n';
}

}  // namespace gazelink
