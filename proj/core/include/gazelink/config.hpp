#pragma once

#include <string>
#include <string_view>

#include "gazelink/ingest.hpp"
#include "gazelink/linking.hpp"
#include "gazelink/model.hpp"
#include "gazelink/signal.hpp"

namespace gazelink {

/// Which utterances count toward an AOI on the sentiment map.
enum class MapEvidence { gaze_linked, mouse_linked, any_linked, mention_only };

std::string_view to_string(MapEvidence e) noexcept;
MapEvidence parse_map_evidence(std::string_view name);

struct SentimentMapStyle {
    std::string positive_color = "#2e9d4f";
    std::string negative_color = "#d2372c";
    std::string neutral_color = "#7a8aa0";
    /// AOIs whose counted feedback carries no sentiment label.
    std::string mixed_color = "#e0a526";
    std::string no_feedback_color = "#444444";
    double opacity = 0.45;
    bool legend = true;
    bool include_screenshot = true;
    double positive_cutoff = 0.2;
    double negative_cutoff = -0.2;
    MapEvidence evidence = MapEvidence::gaze_linked;

    bool operator==(const SentimentMapStyle&) const = default;
};

/// Every tunable of the pipeline. Serialized verbatim into each output.
struct PipelineConfig {
    // signal
    double dispersion_threshold_px = 40.0;
    TimeMs min_duration_ms = 100;
    TimeMs quantum_ms = 250;
    double move_threshold_px = 5.0;
    // linking
    TimeMs padding_before_ms = 0;
    TimeMs padding_after_ms = 0;
    GazeEvidence gaze_evidence = GazeEvidence::fixations;
    TimeMs min_mouse_dwell_ms = 0;
    // ingest
    TimeMs max_gap_ms = 0;
    TimeMs gap_report_ms = kDefaultGapReportMs;
    // metrics
    Aggregation aggregation = Aggregation::micro;
    bool anova_drop_incomplete = false;
    // rendering
    SentimentMapStyle map;

    FixationParams fixation_params() const { return {dispersion_threshold_px, min_duration_ms}; }
    MouseActivityParams mouse_activity_params() const { return {quantum_ms, move_threshold_px}; }
    LinkConfig link_config() const { return {padding_before_ms, padding_after_ms, gaze_evidence, min_mouse_dwell_ms}; }
    IngestOptions ingest_options() const { return {max_gap_ms, gap_report_ms}; }

    /// Throws ValidationError naming the first out-of-range field.
    void validate() const;

    bool operator==(const PipelineConfig&) const = default;
};

/// Parses a JSON config; absent keys keep their defaults, unknown keys are rejected.
PipelineConfig parse_pipeline_config(std::string_view json_text, std::string_view source = "config");
std::string write_pipeline_config(const PipelineConfig& config);

}  // namespace gazelink
