#pragma once

#include <span>
#include <string>
#include <vector>

#include "gazelink/linking.hpp"
#include "gazelink/model.hpp"
#include "gazelink/signal.hpp"

namespace gazelink::oracle {

// Reference linker. It walks every millisecond of each utterance window and
// asks, for that instant, where the gaze (or fixation) and the cursor are. It is
// slow on purpose and shares no windowing, scroll or hit-test code with the
// interval-based linker; only the fixation list is taken as input.
std::vector<LinkRecord> brute_force_links(const Session& session, const Stimulus& stimulus,
                                          std::span<const Fixation> fixations, const LinkConfig& config);

struct DwellMismatch {
    std::string utterance_id;
    std::string aoi_id;
    Modality modality = Modality::gaze;
    TimeMs dwell_a = 0;
    TimeMs dwell_b = 0;
};

struct LinkKey {
    std::string utterance_id;
    std::string aoi_id;
    Modality modality = Modality::gaze;
    auto operator<=>(const LinkKey&) const = default;
};

struct LinkDiff {
    std::vector<LinkKey> only_in_a;
    std::vector<LinkKey> only_in_b;
    std::vector<DwellMismatch> dwell_mismatches;  // |a - b| > tolerance

    bool empty() const noexcept { return only_in_a.empty() && only_in_b.empty() && dwell_mismatches.empty(); }
    std::string describe() const;
};

LinkDiff diff_links(std::span<const LinkRecord> a, std::span<const LinkRecord> b, TimeMs dwell_tolerance_ms = 1);

}  // namespace gazelink::oracle
