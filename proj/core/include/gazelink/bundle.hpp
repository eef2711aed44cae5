#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gazelink/config.hpp"
#include "gazelink/ingest.hpp"
#include "gazelink/linking.hpp"
#include "gazelink/metrics.hpp"
#include "gazelink/model.hpp"
#include "gazelink/signal.hpp"

namespace gazelink {

inline constexpr std::string_view kBundleSchemaVersion = "1";

/// What a replay view needs for one utterance.
struct UtterancePath {
    std::string utterance_id;
    Interval window;
    std::vector<std::size_t> fixation_indices;  // into BundleSession::fixations, temporal order
    std::vector<PagePoint> mouse_trail;         // page coordinates, consecutive repeats dropped
    double dominant_scroll_offset = 0.0;        // vertical offset held longest inside the window
    bool operator==(const UtterancePath&) const = default;
};

struct BundleSession {
    std::string subject_id;
    std::string stimulus_id;
    ValidationReport validation;
    std::vector<Utterance> utterances;
    std::vector<Fixation> fixations;
    std::vector<MouseActivity> mouse_activity;
    std::vector<UtterancePath> paths;
    std::vector<LinkRecord> links;
    bool operator==(const BundleSession&) const = default;
};

struct SkippedSession {
    std::string manifest;
    std::string error;
    bool operator==(const SkippedSession&) const = default;
};

/// The single-file study export consumed by the review interface.
struct StudyBundle {
    std::string schema_version{kBundleSchemaVersion};
    PipelineConfig config;
    std::vector<Stimulus> stimuli;  // screenshot paths relative to the bundle file
    std::vector<BundleSession> sessions;
    std::vector<SkippedSession> skipped;
    StudyReport report;

    const Stimulus* find_stimulus(std::string_view id) const noexcept;
    bool operator==(const StudyBundle&) const = default;
};

/// Builds the replay paths of every linked utterance of a session.
std::vector<UtterancePath> build_paths(const Session& session, std::span<const Fixation> fixations,
                                       const LinkConfig& config);

/// Deterministic JSON text (fixed key order, two-space indent, trailing newline).
std::string write_bundle_json(const StudyBundle& bundle);

/// Throws ParseError for malformed JSON or fields, ValidationError for a
/// schema_version other than "1".
StudyBundle parse_bundle_json(std::string_view text, std::string_view source = "bundle");

StudyBundle read_bundle(const std::filesystem::path& file);
void write_bundle(const std::filesystem::path& file, const StudyBundle& bundle);

}  // namespace gazelink
