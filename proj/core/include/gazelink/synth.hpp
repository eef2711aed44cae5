#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gazelink/model.hpp"
#include "gazelink/serialize.hpp"

namespace gazelink::synth {

enum class ScrollPattern {
    jump,     // one scroll event per change; the cursor is re-placed at the same instant
    stepped,  // a few intermediate offsets while the cursor stays put (scroll-past presence)
};

std::string_view to_string(ScrollPattern p) noexcept;

/// Statement sentiment proportions. Defaults follow 100/64/67 labeled statements.
struct SentimentMix {
    double positive = 100.0 / 231.0;
    double negative = 64.0 / 231.0;
    double neutral = 67.0 / 231.0;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int subjects = 10;
    int stimuli = 1;
    int aois_per_page = 42;
    /// AOI-mentioning statements per subject, spread over the stimuli.
    int statements_per_subject = 23;
    int mentions_per_statement = 7;
    double target_gaze_hit_rate = 66.2;
    double target_mouse_hit_rate = 40.0;
    /// Each subject's targets are shifted by a uniform draw in [-jitter, +jitter].
    double per_subject_jitter = 0.0;
    TimeMs statement_duration_ms = 7200;
    TimeMs statement_gap_ms = 600;
    SentimentMix sentiment_mix;
    /// Gaze fixations on unmentioned AOIs per statement.
    int distractors_per_statement = 1;
    /// Statements that mention no AOI (excluded from hit rates).
    int general_statements_per_subject = 0;
    /// Interviewer segments per session, placed in pauses, dropped by diarization.
    int interviewer_segments_per_session = 0;
    /// Extra AOIs spanning two neighbouring AOIs of a row.
    int overlapping_aois = 0;
    ScrollPattern scroll_pattern = ScrollPattern::jump;
    double sample_rate_hz = 90.0;

    /// Throws ValidationError for an infeasible spec.
    void validate() const;
};

SynthSpec parse_synth_spec(std::string_view json_text, std::string_view source = "spec");

struct PlantedLink {
    std::string utterance_id;
    std::string aoi_id;
    Modality modality = Modality::gaze;
    auto operator<=>(const PlantedLink&) const = default;
};

/// One planted gaze cluster; `aoi_ids` lists every AOI containing its centre.
struct PlantedFixation {
    std::string utterance_id;  // empty outside statements
    Interval slot;
    PagePoint center;
    std::vector<std::string> aoi_ids;
};

struct SessionTruth {
    std::string subject_id;
    std::string stimulus_id;
    std::vector<PlantedLink> links;  // sorted, unique
    std::vector<PlantedFixation> fixations;
};

struct SubjectTruth {
    std::string subject_id;
    std::size_t mentioned = 0;
    std::size_t gaze_hits = 0;
    std::size_t mouse_hits = 0;
    double gaze_rate = 0.0;
    double mouse_rate = 0.0;
};

struct GroundTruth {
    std::vector<SessionTruth> sessions;
    std::vector<SubjectTruth> subjects;
};

struct SynthSession {
    Session session;
    SessionFiles files;
};

struct SynthStudy {
    SynthSpec spec;
    std::vector<Stimulus> stimuli;
    std::vector<SynthSession> sessions;
    GroundTruth truth;
};

/// Deterministic for a given spec. Hits are planted by construction: for every
/// subject the hit count is round(rate * mentions) over the pooled statements.
SynthStudy generate_study(const SynthSpec& spec);

/// Wireframe SVG standing in for the stimulus screenshot.
std::string stimulus_wireframe_svg(const Stimulus& stimulus);

std::string write_ground_truth_json(const GroundTruth& truth);

/// Writes stimuli, session file sets, manifests and ground truth under `dir`.
/// Returns the manifest paths in session order.
std::vector<std::filesystem::path> write_study(const SynthStudy& study, const std::filesystem::path& dir);

}  // namespace gazelink::synth
