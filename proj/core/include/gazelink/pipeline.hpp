#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gazelink/bundle.hpp"
#include "gazelink/config.hpp"
#include "gazelink/ingest.hpp"

namespace gazelink {

struct PipelineOptions {
    /// Record failing sessions in StudyBundle::skipped instead of aborting.
    bool skip_invalid = false;
    /// Directory the bundle will be written to; screenshot references are made
    /// relative to it. Empty keeps them as resolved from the manifests.
    std::filesystem::path bundle_dir;
    /// Worker threads for the per-session stages; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// ingest -> fixations and mouse activity -> links -> study report, one bundle.
/// Sessions keep the order of `manifests`. Throws the first session error (with
/// the manifest path in the message) unless `skip_invalid` is set.
StudyBundle run_pipeline(std::span<const std::filesystem::path> manifests, const PipelineConfig& config,
                         const PipelineOptions& options = {});

struct ManifestCheck {
    std::filesystem::path manifest;
    bool ok = false;
    std::string error;         // set when ingest failed
    ValidationReport report;   // informational findings when ok
};

/// Ingests each manifest and reports the outcome without linking.
std::vector<ManifestCheck> validate_manifests(std::span<const std::filesystem::path> manifests,
                                              const PipelineConfig& config);

/// Copies the bundle and its screenshots into `out_dir` (screenshots under
/// `screenshots/`, references rewritten) and, when given, the contents of
/// `ui_dir`. Returns the exported bundle.
StudyBundle export_bundle(const std::filesystem::path& bundle_file, const std::filesystem::path& out_dir,
                          const std::filesystem::path& ui_dir = {});

}  // namespace gazelink
