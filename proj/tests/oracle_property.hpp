#pragma once

// Randomized comparison of the interval linker against the reference linker.
// Shared by the unit suite and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>

#include "gazelink/linking.hpp"
#include "gazelink/oracle.hpp"
#include "gazelink/signal.hpp"
#include "gazelink/synth.hpp"

namespace gazelink::testing {

struct OracleCase {
    synth::SynthSpec spec;
    LinkConfig link;
    double invalid_fraction = 0.0;
    double drop_fraction = 0.0;
};

/// Varies AOI count, padding, scroll pattern, gaze evidence and mouse dwell per seed.
inline OracleCase oracle_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 7919 + 17);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    OracleCase c;
    c.spec.seed = seed;
    c.spec.subjects = 1;
    c.spec.aois_per_page = pick(8, 48);
    c.spec.statements_per_subject = pick(2, 6);
    c.spec.mentions_per_statement = pick(1, 6);
    c.spec.distractors_per_statement = pick(0, 2);
    c.spec.overlapping_aois = pick(0, 3);
    c.spec.general_statements_per_subject = pick(0, 1);
    c.spec.statement_duration_ms = pick(1500, 4000);
    c.spec.statement_gap_ms = pick(150, 800);
    c.spec.scroll_pattern = pick(0, 1) ? synth::ScrollPattern::stepped : synth::ScrollPattern::jump;
    c.spec.sample_rate_hz = pick(0, 3) == 0 ? 60.0 : 90.0;
    c.link.padding_before_ms = pick(0, 3) * 250;
    c.link.padding_after_ms = pick(0, 3) * 300;
    c.link.gaze_evidence = pick(0, 2) == 0 ? GazeEvidence::raw_samples : GazeEvidence::fixations;
    c.link.min_mouse_dwell_ms = pick(0, 1) ? 0 : pick(1, 400);
    c.invalid_fraction = pick(0, 1) ? 0.0 : 0.03;
    c.drop_fraction = pick(0, 1) ? 0.0 : 0.02;
    return c;
}

struct OracleOutcome {
    bool equal = true;
    std::size_t records = 0;
    std::string detail;
};

inline OracleOutcome run_oracle_case(std::uint64_t seed) {
    const OracleCase c = oracle_case(seed);
    auto study = synth::generate_study(c.spec);
    std::mt19937_64 noise(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    OracleOutcome out;
    for (auto& s : study.sessions) {
        Session& sess = s.session;
        // Perturb: tracker dropouts and lost samples exercise the window-breaking paths.
        std::vector<GazeSample> gaze;
        for (std::size_t i = 0; i < sess.gaze.size(); ++i) {
            GazeSample g = sess.gaze[i];
            const bool endpoint = i == 0 || i + 1 == sess.gaze.size();
            if (!endpoint && u01(noise) < c.drop_fraction) continue;
            if (!endpoint && u01(noise) < c.invalid_fraction) g.valid = false;
            gaze.push_back(g);
        }
        sess.gaze = std::move(gaze);
        const Stimulus& stim = study.stimuli.front();
        const auto fixations = detect_fixations(sess.gaze, sess.scroll);
        const auto fast = link_session(sess, stim, fixations, c.link);
        const auto slow = oracle::brute_force_links(sess, stim, fixations, c.link);
        const auto diff = oracle::diff_links(fast, slow);
        out.records += fast.size();
        if (!diff.empty()) {
            out.equal = false;
            out.detail += "seed " + std::to_string(seed) + ":\n" + diff.describe();
        }
    }
    return out;
}

}  // namespace gazelink::testing
