#include "gazelink/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace gazelink::oracle {

namespace {

bool inside(double x, double y, const Rect& r) { return x >= r.x && x < r.x + r.w && y >= r.y && y < r.y + r.h; }

// Forward-only cursor over the scroll stream; queries must be non-decreasing.
class ScrollCursor {
public:
    explicit ScrollCursor(const std::vector<ScrollState>& s) : s_(s) {}
    double x(TimeMs t) { return at(t).first; }
    double y(TimeMs t) { return at(t).second; }

private:
    std::pair<double, double> at(TimeMs t) {
        if (s_.empty()) return {0.0, 0.0};
        while (i_ + 1 < s_.size() && s_[i_ + 1].t <= t) ++i_;
        return {s_[i_].offset_x, s_[i_].offset_y};
    }
    const std::vector<ScrollState>& s_;
    std::size_t i_ = 0;
};

// Per-AOI tally of covered milliseconds, turned into maximal runs.
struct Tally {
    std::vector<std::vector<Interval>> runs;
    explicit Tally(std::size_t n) : runs(n) {}
    void mark(std::size_t aoi, TimeMs t) {
        auto& r = runs[aoi];
        if (!r.empty() && r.back().end == t) {
            r.back().end = t + 1;
        } else {
            r.push_back({t, t + 1});
        }
    }
};

void emit(const Stimulus& stim, const std::string& utt, Modality m, const Tally& tally, TimeMs min_dwell,
          std::vector<LinkRecord>& out) {
    for (std::size_t a = 0; a < stim.aois.size(); ++a) {
        TimeMs dwell = 0;
        for (const auto& r : tally.runs[a]) dwell += r.end - r.start;
        if (dwell > 0 && dwell >= min_dwell) out.push_back({utt, stim.aois[a].id, m, tally.runs[a], dwell});
    }
}

}  // namespace

std::vector<LinkRecord> brute_force_links(const Session& session, const Stimulus& stimulus,
                                          std::span<const Fixation> fixations, const LinkConfig& config) {
    std::vector<LinkRecord> out;
    if (session.gaze.empty() && session.mouse.empty()) return out;

    TimeMs lo = 0, hi = 0;
    bool seeded = false;
    auto widen = [&](TimeMs a, TimeMs b) {
        lo = seeded ? std::min(lo, a) : a;
        hi = seeded ? std::max(hi, b) : b;
        seeded = true;
    };
    if (!session.gaze.empty()) widen(session.gaze.front().t, session.gaze.back().t);
    if (!session.mouse.empty()) widen(session.mouse.front().t, session.mouse.back().t);

    std::vector<const Utterance*> utts;
    for (const auto& u : session.utterances) {
        if (!u.mentioned_aois.empty()) utts.push_back(&u);
    }
    std::stable_sort(utts.begin(), utts.end(), [](const Utterance* a, const Utterance* b) {
        return a->start != b->start ? a->start < b->start : a->id < b->id;
    });

    const auto& aois = stimulus.aois;
    for (const Utterance* u : utts) {
        const TimeMs ws = std::max(u->start - config.padding_before_ms, lo);
        const TimeMs we = std::min(u->end + config.padding_after_ms, hi);

        Tally gaze(aois.size()), mouse(aois.size());
        ScrollCursor gaze_scroll(session.scroll), mouse_scroll(session.scroll);
        std::size_t gi = 0, mi = 0, fi = 0;
        bool have_g = false, have_m = false;

        for (TimeMs t = ws; t < we; ++t) {
            if (config.gaze_evidence == GazeEvidence::fixations) {
                while (fi < fixations.size() && fixations[fi].span.end <= t) ++fi;
                if (fi < fixations.size() && fixations[fi].span.start <= t) {
                    const auto& c = fixations[fi].centroid;
                    for (std::size_t a = 0; a < aois.size(); ++a) {
                        if (inside(c.x, c.y, aois[a].rect)) gaze.mark(a, t);
                    }
                }
            } else {
                while (gi < session.gaze.size() && session.gaze[gi].t <= t) {
                    ++gi;
                    have_g = true;
                }
                // Sample gi-1 is the latest at or before t. It must lie inside the
                // window, be valid, and not be the stream's final sample.
                if (have_g && gi < session.gaze.size()) {
                    const auto& s = session.gaze[gi - 1];
                    if (s.valid && s.t >= ws) {
                        const double px = s.x + gaze_scroll.x(s.t);
                        const double py = s.y + gaze_scroll.y(s.t);
                        for (std::size_t a = 0; a < aois.size(); ++a) {
                            if (inside(px, py, aois[a].rect)) gaze.mark(a, t);
                        }
                    }
                }
            }

            while (mi < session.mouse.size() && session.mouse[mi].t <= t) {
                ++mi;
                have_m = true;
            }
            if (have_m) {
                const auto& s = session.mouse[mi - 1];
                const double px = s.x + mouse_scroll.x(t);
                const double py = s.y + mouse_scroll.y(t);
                for (std::size_t a = 0; a < aois.size(); ++a) {
                    if (inside(px, py, aois[a].rect)) mouse.mark(a, t);
                }
            }
        }

        std::vector<LinkRecord> recs;
        emit(stimulus, u->id, Modality::gaze, gaze, 0, recs);
        emit(stimulus, u->id, Modality::mouse, mouse, config.min_mouse_dwell_ms, recs);
        std::sort(recs.begin(), recs.end(), [](const LinkRecord& a, const LinkRecord& b) {
            return a.aoi_id != b.aoi_id ? a.aoi_id < b.aoi_id : a.modality < b.modality;
        });
        out.insert(out.end(), recs.begin(), recs.end());
    }
    return out;
}

LinkDiff diff_links(std::span<const LinkRecord> a, std::span<const LinkRecord> b, TimeMs dwell_tolerance_ms) {
    std::map<LinkKey, TimeMs> ma, mb;
    for (const auto& r : a) ma[{r.utterance_id, r.aoi_id, r.modality}] += r.total_dwell_ms;
    for (const auto& r : b) mb[{r.utterance_id, r.aoi_id, r.modality}] += r.total_dwell_ms;
    LinkDiff d;
    for (const auto& [k, dwell] : ma) {
        auto it = mb.find(k);
        if (it == mb.end()) {
            d.only_in_a.push_back(k);
        } else if (std::abs(dwell - it->second) > dwell_tolerance_ms) {
            d.dwell_mismatches.push_back({k.utterance_id, k.aoi_id, k.modality, dwell, it->second});
        }
    }
    for (const auto& [k, dwell] : mb) {
        if (!ma.contains(k)) d.only_in_b.push_back(k);
    }
    return d;
}

std::string LinkDiff::describe() const {
    std::ostringstream os;
    for (const auto& k : only_in_a) os << "only in a: " << k.utterance_id << ' ' << k.aoi_id << ' ' << to_string(k.modality) << '\n';
    for (const auto& k : only_in_b) os << "only in b: " << k.utterance_id << ' ' << k.aoi_id << ' ' << to_string(k.modality) << '\n';
    for (const auto& m : dwell_mismatches) {
        os << "dwell: " << m.utterance_id << ' ' << m.aoi_id << ' ' << to_string(m.modality) << ' ' << m.dwell_a
           << " vs " << m.dwell_b << '\n';
    }
    return os.str();
}

}  // namespace gazelink::oracle
