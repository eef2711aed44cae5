#include "gazelink/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "gazelink/error.hpp"
#include "gazelink/ingest.hpp"

namespace gazelink::synth {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Page grid. AOIs sit inside cells; the horizontal bands between rows are
// whitespace by construction (AOIs only ever shrink towards their cell's top-left).
constexpr double kViewportWidth = 1920.0;
constexpr double kViewportHeight = 1080.0;
constexpr int kColumns = 6;
constexpr double kCellWidth = 320.0;
constexpr double kCellHeight = 300.0;
constexpr double kAoiOffset = 40.0;
constexpr double kAoiMaxWidth = 240.0;
constexpr double kAoiMaxHeight = 220.0;
constexpr double kInset = 20.0;
constexpr double kMinSeparation = 60.0;
constexpr std::size_t kMinSlotSamples = 20;
constexpr std::size_t kScrollSteps = 3;

const char* const kAoiKinds[] = {"navigation", "headline", "image", "text", "teaser", "button", "gallery", "footer"};

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double manhattan(PagePoint a, PagePoint b) { return std::fabs(a.x - b.x) + std::fabs(a.y - b.y); }

long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5 + 1e-9)); }

std::string padded(const char* prefix, int value, int width) {
    std::string digits_text = std::to_string(value);
    if (static_cast<int>(digits_text.size()) < width) digits_text.insert(0, static_cast<std::size_t>(width) - digits_text.size(), '0');
    return prefix + digits_text;
}

int digits(int n) { return n < 10 ? 1 : 1 + digits(n / 10); }

std::vector<std::string> containing(const Stimulus& stim, PagePoint p) {
    std::vector<std::string> ids;
    for (const auto& a : stim.aois) {
        if (point_in_aoi(p, a)) ids.push_back(a.id);
    }
    return ids;
}

// Largest-remainder split of `total` by `weights`.
std::vector<int> apportion(int total, const std::vector<double>& weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<int> out(weights.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int used = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = total * weights[i] / sum;
        out[i] = static_cast<int>(std::floor(exact));
        used += out[i];
        rem.push_back({exact - out[i], i});
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < total - used; ++k) ++out[rem[static_cast<std::size_t>(k) % rem.size()].second];
    return out;
}

Stimulus make_stimulus(const SynthSpec& spec, int index, int id_width) {
    Rng rng = make_rng(spec.seed, 0xA0, static_cast<std::uint64_t>(index));
    Stimulus s;
    s.id = padded("page", index + 1, id_width);
    const int rows = (spec.aois_per_page + kColumns - 1) / kColumns;
    s.viewport_width = kViewportWidth;
    s.viewport_height = kViewportHeight;
    s.page_width = kViewportWidth;
    s.page_height = std::max(rows * kCellHeight + kAoiOffset, kViewportHeight + 400.0);
    for (int k = 0; k < spec.aois_per_page; ++k) {
        const int r = k / kColumns, c = k % kColumns;
        Aoi a;
        a.id = padded("A", k + 1, 2);
        a.label = std::string(kAoiKinds[uniform_int(rng, 0, 7)]) + " " + std::to_string(r + 1) + "." + std::to_string(c + 1);
        a.rect = {c * kCellWidth + kAoiOffset, r * kCellHeight + kAoiOffset,
                  std::round(kAoiMaxWidth * uniform_real(rng, 0.7, 1.0)),
                  std::round(kAoiMaxHeight * uniform_real(rng, 0.7, 1.0))};
        s.aois.push_back(std::move(a));
    }
    // Overlapping AOIs span two horizontal neighbours of one row.
    std::vector<int> pairs;
    for (int k = 0; k + 1 < spec.aois_per_page; ++k) {
        if (k % kColumns != kColumns - 1) pairs.push_back(k);
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    for (int v = 0; v < spec.overlapping_aois && v < static_cast<int>(pairs.size()); ++v) {
        const auto& left = s.aois[static_cast<std::size_t>(pairs[static_cast<std::size_t>(v)])].rect;
        const auto& right = s.aois[static_cast<std::size_t>(pairs[static_cast<std::size_t>(v)]) + 1].rect;
        Aoi a;
        a.id = padded("V", v + 1, 2);
        a.label = "section " + std::to_string(v + 1);
        a.rect = {left.x, left.y, right.x + right.w - left.x, std::min(left.h, right.h)};
        s.aois.push_back(std::move(a));
    }
    return s;
}

// Integer page point inside the AOI, kept away from its edges.
PagePoint interior_point(Rng& rng, const Aoi& a) {
    return {std::floor(uniform_real(rng, a.rect.x + kInset, a.rect.x + a.rect.w - kInset)),
            std::floor(uniform_real(rng, a.rect.y + kInset, a.rect.y + a.rect.h - kInset))};
}

PagePoint interior_point_away(Rng& rng, const Aoi& a, PagePoint avoid) {
    PagePoint p = interior_point(rng, a);
    for (int attempt = 0; attempt < 64 && manhattan(p, avoid) < kMinSeparation; ++attempt) p = interior_point(rng, a);
    return p;
}

// Whitespace point in the band under the target's row, at least kMinSeparation from `avoid`.
PagePoint whitespace_near(const Stimulus& stim, PagePoint target, PagePoint avoid) {
    const double row = std::floor(target.y / kCellHeight);
    const double band_y = std::min((row + 1) * kCellHeight, stim.page_height - kAoiOffset / 2);
    const double offsets[] = {0, 150, -150, 300, -300, 450, -450, 600, -600};
    for (double dx : offsets) {
        const PagePoint p{std::clamp(target.x + dx, kInset, stim.page_width - kInset), band_y};
        if (containing(stim, p).empty() && manhattan(p, avoid) >= kMinSeparation) return p;
    }
    throw ValidationError("synthetic layout for '" + stim.id + "' has no whitespace near (" +
                          std::to_string(target.x) + ", " + std::to_string(target.y) + ")");
}

double centered_offset(const Stimulus& stim, PagePoint target) {
    return std::clamp(target.y - std::floor(stim.viewport_height / 2), 0.0, stim.page_height - stim.viewport_height);
}

enum class SlotKind { gaze_hit, mouse_hit, distractor };

struct Slot {
    SlotKind kind;
    std::size_t aoi;
};

struct Phase {
    std::size_t n0 = 0;
    std::size_t n1 = 0;  // exclusive
    PagePoint gaze;
    PagePoint mouse;
    double offset = 0.0;
    std::string utterance_id;
};

struct Statement {
    std::string id;
    bool general = false;
    Sentiment sentiment = Sentiment::unlabeled;
    std::set<std::string> mentioned;
    std::vector<Slot> slots;
};

class SessionBuilder {
public:
    SessionBuilder(const SynthSpec& spec, const Stimulus& stim, Rng& rng) : spec_(spec), stim_(stim), rng_(rng) {}

    std::size_t samples_for(TimeMs ms) const {
        return static_cast<std::size_t>(std::llround(static_cast<double>(ms) * spec_.sample_rate_hz / 1000.0));
    }
    TimeMs time_of(std::size_t n) const {
        return static_cast<TimeMs>(std::llround(static_cast<double>(n) * 1000.0 / spec_.sample_rate_hz));
    }

    void silence(std::size_t count) {
        Phase p;
        p.n0 = cursor_;
        p.n1 = cursor_ + std::max<std::size_t>(count, 1);
        p.offset = offset_;
        p.gaze = whitespace_near(stim_, anchor_, last_gaze_);
        p.mouse = whitespace_near(stim_, anchor_, {-1e6, -1e6});
        push(std::move(p));
    }

    Interval statement(const Statement& st, std::size_t count) {
        const std::size_t slots = std::max<std::size_t>(st.slots.size(), 1);
        count = std::max(count, slots * kMinSlotSamples);
        const std::size_t start = cursor_;
        for (std::size_t k = 0; k < slots; ++k) {
            const std::size_t len = count / slots + (k < count % slots ? 1 : 0);
            Phase p;
            p.n0 = cursor_;
            p.n1 = cursor_ + len;
            p.utterance_id = st.id;
            if (st.slots.empty()) {
                p.offset = offset_;
                p.gaze = whitespace_near(stim_, anchor_, last_gaze_);
                p.mouse = whitespace_near(stim_, anchor_, {-1e6, -1e6});
            } else {
                const Slot& slot = st.slots[k];
                const Aoi& aoi = stim_.aois[slot.aoi];
                if (slot.kind == SlotKind::mouse_hit) {
                    p.mouse = interior_point(rng_, aoi);
                    p.gaze = whitespace_near(stim_, p.mouse, last_gaze_);
                    anchor_ = p.mouse;
                } else {
                    p.gaze = interior_point_away(rng_, aoi, last_gaze_);
                    p.mouse = whitespace_near(stim_, p.gaze, {-1e6, -1e6});
                    anchor_ = p.gaze;
                }
                p.offset = centered_offset(stim_, anchor_);
            }
            push(std::move(p));
        }
        return {time_of(start), time_of(cursor_)};
    }

    std::size_t cursor() const { return cursor_; }
    const std::vector<Phase>& phases() const { return phases_; }

    void render(Session& session) const {
        const std::size_t total = cursor_ + 1;  // closing sample at the final boundary
        session.gaze.reserve(total);
        session.mouse.reserve(total);
        double offset = phases_.empty() ? 0.0 : phases_.front().offset;
        session.scroll.push_back({0, 0.0, offset});
        ViewportPoint cursor_vp{0, 0};
        std::size_t phase_index = 0;
        Rng jitter = rng_;  // copy: jitter draws must not perturb layout draws
        for (std::size_t n = 0; n < total; ++n) {
            while (phase_index + 1 < phases_.size() && phases_[phase_index].n1 <= n) ++phase_index;
            const Phase& ph = phases_[phase_index];
            const TimeMs t = time_of(n);
            bool hold_cursor = false;
            if (n == ph.n0 && ph.offset != offset) {
                if (spec_.scroll_pattern == ScrollPattern::stepped && ph.n1 - ph.n0 > kScrollSteps + kMinSlotSamples / 2) {
                    const double from = offset;
                    for (std::size_t k = 1; k <= kScrollSteps; ++k) {
                        const double o = std::round(from + (ph.offset - from) * static_cast<double>(k) / kScrollSteps);
                        session.scroll.push_back({time_of(n + k - 1), 0.0, o});
                    }
                } else {
                    session.scroll.push_back({t, 0.0, ph.offset});
                }
                offset = ph.offset;
            }
            const double current = session.scroll.size() > 0 ? current_offset(session.scroll, t) : offset;
            if (spec_.scroll_pattern == ScrollPattern::stepped && n >= ph.n0 && n < ph.n0 + kScrollSteps &&
                phase_index > 0 && phases_[phase_index - 1].offset != ph.offset &&
                ph.n1 - ph.n0 > kScrollSteps + kMinSlotSamples / 2) {
                hold_cursor = true;
            }
            const double jx = uniform_int(jitter, -4, 4) / 4.0;
            const double jy = uniform_int(jitter, -4, 4) / 4.0;
            session.gaze.push_back({t, ph.gaze.x + jx, ph.gaze.y - current + jy, true});
            if (!hold_cursor) cursor_vp = {ph.mouse.x, ph.mouse.y - current};
            session.mouse.push_back({t, cursor_vp.x, cursor_vp.y});
        }
    }

private:
    static double current_offset(const std::vector<ScrollState>& scroll, TimeMs t) {
        double o = scroll.front().offset_y;
        for (auto it = scroll.rbegin(); it != scroll.rend(); ++it) {
            if (it->t <= t) return it->offset_y;
        }
        return o;
    }

    void push(Phase p) {
        cursor_ = p.n1;
        offset_ = p.offset;
        last_gaze_ = p.gaze;
        phases_.push_back(std::move(p));
    }

    const SynthSpec& spec_;
    const Stimulus& stim_;
    Rng& rng_;
    std::vector<Phase> phases_;
    std::size_t cursor_ = 0;
    double offset_ = 0.0;
    PagePoint anchor_{kViewportWidth / 2, 200.0};
    PagePoint last_gaze_{-1e6, -1e6};
};

std::vector<std::size_t> sample_indices(Rng& rng, std::vector<std::size_t> pool, std::size_t k) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(k, pool.size()));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

std::string_view to_string(ScrollPattern p) noexcept { return p == ScrollPattern::jump ? "jump" : "stepped"; }

void SynthSpec::validate() const {
    auto fail = [](const std::string& msg) { throw ValidationError("synth spec: " + msg); };
    if (subjects < 1) fail("subjects must be >= 1");
    if (stimuli < 1) fail("stimuli must be >= 1");
    if (aois_per_page < 2) fail("aois_per_page must be >= 2");
    if (statements_per_subject < stimuli) fail("statements_per_subject must be >= stimuli");
    if (mentions_per_statement < 1) fail("mentions_per_statement must be >= 1");
    if (mentions_per_statement > aois_per_page + overlapping_aois) fail("mentions_per_statement exceeds the AOI count");
    if (distractors_per_statement < 0) fail("distractors_per_statement must be >= 0");
    if (mentions_per_statement + distractors_per_statement > aois_per_page + overlapping_aois) {
        fail("mentions plus distractors exceed the AOI count");
    }
    for (double r : {target_gaze_hit_rate, target_mouse_hit_rate}) {
        if (!(r >= 0.0 && r <= 100.0)) fail("target hit rates must lie in [0, 100]");
    }
    if (!(per_subject_jitter >= 0.0)) fail("per_subject_jitter must be >= 0");
    const auto& m = sentiment_mix;
    if (m.positive < 0 || m.negative < 0 || m.neutral < 0) fail("sentiment proportions must be >= 0");
    if (std::fabs(m.positive + m.negative + m.neutral - 1.0) > 1e-6) fail("sentiment proportions must sum to 1");
    if (statement_duration_ms <= 0) fail("statement_duration_ms must be > 0");
    if (statement_gap_ms < 100) fail("statement_gap_ms must be >= 100");
    if (general_statements_per_subject < 0 || interviewer_segments_per_session < 0 || overlapping_aois < 0) {
        fail("counts must be >= 0");
    }
    if (interviewer_segments_per_session > 0 && statement_gap_ms < 300) fail("interviewer segments need gaps >= 300 ms");
    if (!(sample_rate_hz >= 10.0 && sample_rate_hz <= 1000.0)) fail("sample_rate_hz must lie in [10, 1000]");
}

SynthSpec parse_synth_spec(std::string_view json_text, std::string_view source) {
    ojson j;
    try {
        j = ojson::parse(json_text);
    } catch (const ojson::parse_error& e) {
        throw ParseError(std::string(source), 0, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(std::string(source), 0, "synth spec must be a JSON object");
    SynthSpec s;
    const std::set<std::string> known{"seed", "subjects", "stimuli", "aois_per_page", "statements_per_subject",
                                      "mentions_per_statement", "target_gaze_hit_rate", "target_mouse_hit_rate",
                                      "per_subject_jitter", "statement_duration_ms", "statement_gap_ms",
                                      "sentiment_mix", "distractors_per_statement", "general_statements_per_subject",
                                      "interviewer_segments_per_session", "overlapping_aois", "scroll_pattern",
                                      "sample_rate_hz"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ParseError(std::string(source), 0, "unknown synth spec key '" + key + "'");
    }
    try {
        auto get = [&](const char* key, auto& out) {
            if (j.contains(key)) out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
        };
        get("seed", s.seed);
        get("subjects", s.subjects);
        get("stimuli", s.stimuli);
        get("aois_per_page", s.aois_per_page);
        get("statements_per_subject", s.statements_per_subject);
        get("mentions_per_statement", s.mentions_per_statement);
        get("target_gaze_hit_rate", s.target_gaze_hit_rate);
        get("target_mouse_hit_rate", s.target_mouse_hit_rate);
        get("per_subject_jitter", s.per_subject_jitter);
        get("statement_duration_ms", s.statement_duration_ms);
        get("statement_gap_ms", s.statement_gap_ms);
        get("distractors_per_statement", s.distractors_per_statement);
        get("general_statements_per_subject", s.general_statements_per_subject);
        get("interviewer_segments_per_session", s.interviewer_segments_per_session);
        get("overlapping_aois", s.overlapping_aois);
        get("sample_rate_hz", s.sample_rate_hz);
        if (j.contains("sentiment_mix")) {
            const auto& m = j.at("sentiment_mix");
            s.sentiment_mix = {m.at("positive").get<double>(), m.at("negative").get<double>(),
                               m.at("neutral").get<double>()};
        }
        if (j.contains("scroll_pattern")) {
            const auto p = j.at("scroll_pattern").get<std::string>();
            if (p == "jump") {
                s.scroll_pattern = ScrollPattern::jump;
            } else if (p == "stepped") {
                s.scroll_pattern = ScrollPattern::stepped;
            } else {
                throw ParseError(std::string(source), 0, "unknown scroll_pattern '" + p + "'");
            }
        }
    } catch (const ojson::exception& e) {
        throw ParseError(std::string(source), 0, std::string("bad synth spec field: ") + e.what());
    }
    s.validate();
    return s;
}

SynthStudy generate_study(const SynthSpec& spec) {
    spec.validate();
    SynthStudy study;
    study.spec = spec;
    const int stim_width = std::max(1, digits(spec.stimuli));
    for (int p = 0; p < spec.stimuli; ++p) study.stimuli.push_back(make_stimulus(spec, p, stim_width));

    const int subject_width = std::max(2, digits(spec.subjects));
    const auto per_stimulus = apportion(spec.statements_per_subject, std::vector<double>(static_cast<std::size_t>(spec.stimuli), 1.0));
    const auto general_per_stimulus =
        apportion(spec.general_statements_per_subject, std::vector<double>(static_cast<std::size_t>(spec.stimuli), 1.0));

    for (int s = 0; s < spec.subjects; ++s) {
        Rng rng = make_rng(spec.seed, 0x5B, static_cast<std::uint64_t>(s));
        const std::string subject_id = padded("s", s + 1, subject_width);
        const double gaze_target =
            std::clamp(spec.target_gaze_hit_rate + uniform_real(rng, -spec.per_subject_jitter, spec.per_subject_jitter), 0.0, 100.0);
        const double mouse_target =
            std::clamp(spec.target_mouse_hit_rate + uniform_real(rng, -spec.per_subject_jitter, spec.per_subject_jitter), 0.0, 100.0);

        // Sentiments for this subject's mention statements.
        const auto sentiment_counts = apportion(
            spec.statements_per_subject, {spec.sentiment_mix.positive, spec.sentiment_mix.negative, spec.sentiment_mix.neutral});
        std::vector<Sentiment> sentiments;
        for (int k = 0; k < sentiment_counts[0]; ++k) sentiments.push_back(Sentiment::positive);
        for (int k = 0; k < sentiment_counts[1]; ++k) sentiments.push_back(Sentiment::negative);
        for (int k = 0; k < sentiment_counts[2]; ++k) sentiments.push_back(Sentiment::neutral);
        std::shuffle(sentiments.begin(), sentiments.end(), rng);

        SubjectTruth subject_truth{subject_id};
        long long cumulative = 0;
        long long gaze_so_far = 0, mouse_so_far = 0;
        std::size_t sentiment_cursor = 0;

        for (int p = 0; p < spec.stimuli; ++p) {
            const Stimulus& stim = study.stimuli[static_cast<std::size_t>(p)];
            const std::size_t n_aois = stim.aois.size();
            std::vector<std::size_t> all(n_aois);
            std::iota(all.begin(), all.end(), 0);

            // Statement list with general statements interleaved at random positions.
            std::vector<bool> is_general(static_cast<std::size_t>(per_stimulus[static_cast<std::size_t>(p)]), false);
            for (int g = 0; g < general_per_stimulus[static_cast<std::size_t>(p)]; ++g) {
                const auto pos = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(is_general.size())));
                is_general.insert(is_general.begin() + static_cast<std::ptrdiff_t>(pos), true);
            }

            std::vector<Statement> statements;
            for (std::size_t k = 0; k < is_general.size(); ++k) {
                Statement st;
                st.id = padded("u", static_cast<int>(k), 4);
                st.general = is_general[k];
                if (st.general) {
                    st.sentiment = static_cast<Sentiment>(uniform_int(rng, 0, 2));
                    for (auto a : sample_indices(rng, all, static_cast<std::size_t>(uniform_int(rng, 1, 2)))) {
                        st.slots.push_back({SlotKind::distractor, a});
                    }
                    std::shuffle(st.slots.begin(), st.slots.end(), rng);
                    statements.push_back(std::move(st));
                    continue;
                }
                st.sentiment = sentiments[sentiment_cursor++];
                const auto mentions = sample_indices(rng, all, static_cast<std::size_t>(spec.mentions_per_statement));
                for (auto a : mentions) st.mentioned.insert(stim.aois[a].id);

                const long long m = spec.mentions_per_statement;
                const long long gaze_now = round_half_up(gaze_target * static_cast<double>(cumulative + m) / 100.0);
                const long long mouse_now = round_half_up(mouse_target * static_cast<double>(cumulative + m) / 100.0);
                const auto gaze_hits = static_cast<std::size_t>(gaze_now - gaze_so_far);
                const auto mouse_hits = static_cast<std::size_t>(mouse_now - mouse_so_far);
                cumulative += m;
                gaze_so_far = gaze_now;
                mouse_so_far = mouse_now;

                for (auto a : sample_indices(rng, mentions, gaze_hits)) st.slots.push_back({SlotKind::gaze_hit, a});
                for (auto a : sample_indices(rng, mentions, mouse_hits)) st.slots.push_back({SlotKind::mouse_hit, a});
                std::vector<std::size_t> unmentioned;
                for (auto a : all) {
                    if (!std::binary_search(mentions.begin(), mentions.end(), a)) unmentioned.push_back(a);
                }
                for (auto a : sample_indices(rng, unmentioned, static_cast<std::size_t>(spec.distractors_per_statement))) {
                    st.slots.push_back({SlotKind::distractor, a});
                }
                std::shuffle(st.slots.begin(), st.slots.end(), rng);
                statements.push_back(std::move(st));
            }

            // Timeline.
            SessionBuilder builder(spec, stim, rng);
            const std::size_t gap = builder.samples_for(spec.statement_gap_ms);
            std::vector<Interval> windows;
            std::vector<Interval> pauses;
            {
                const std::size_t n0 = builder.cursor();
                builder.silence(gap);
                pauses.push_back({builder.time_of(n0), builder.time_of(builder.cursor())});
            }
            for (const auto& st : statements) {
                windows.push_back(builder.statement(st, builder.samples_for(spec.statement_duration_ms)));
                const std::size_t n0 = builder.cursor();
                builder.silence(gap);
                pauses.push_back({builder.time_of(n0), builder.time_of(builder.cursor())});
            }

            SynthSession out;
            Session& session = out.session;
            session.subject_id = subject_id;
            session.stimulus_id = stim.id;
            builder.render(session);

            SessionFiles& files = out.files;
            files.subject_id = subject_id;
            files.stimulus_id = stim.id;
            files.tester_label = "tester";
            SessionTruth truth{subject_id, stim.id, {}, {}};

            for (std::size_t k = 0; k < statements.size(); ++k) {
                const auto& st = statements[k];
                Utterance u;
                u.id = st.id;
                u.speaker = "tester";
                u.start = windows[k].start;
                u.end = windows[k].end;
                u.sentiment = st.sentiment;
                u.mentioned_aois = st.mentioned;
                u.text = st.general ? "General remark " + std::to_string(k + 1) + "."
                                    : "Statement " + std::to_string(k + 1) + " about " +
                                          std::to_string(st.mentioned.size()) + " page areas.";
                session.utterances.push_back(u);
                files.transcript.push_back({u.id, u.start, u.end, u.text});
                files.speakers.push_back({u.start, u.end, "tester"});
                files.annotations[u.id] = {u.sentiment, u.mentioned_aois, false};
            }

            // Interviewer remarks in randomly chosen pauses.
            {
                std::vector<std::size_t> idx(pauses.size());
                std::iota(idx.begin(), idx.end(), 0);
                idx = sample_indices(rng, idx, static_cast<std::size_t>(spec.interviewer_segments_per_session));
                int counter = 0;
                for (auto i : idx) {
                    const Interval seg{pauses[i].start + 100, pauses[i].end - 100};
                    if (seg.length() <= 0) continue;
                    files.transcript.push_back({padded("i", counter++, 3), seg.start, seg.end, "Please go on."});
                    files.speakers.push_back({seg.start, seg.end, "interviewer"});
                }
                std::stable_sort(files.transcript.begin(), files.transcript.end(),
                                 [](const TranscriptSegment& a, const TranscriptSegment& b) { return a.start < b.start; });
                std::stable_sort(files.speakers.begin(), files.speakers.end(),
                                 [](const SpeakerTurn& a, const SpeakerTurn& b) { return a.start < b.start; });
            }

            // Ground truth straight from the phase plan.
            std::set<PlantedLink> planted;
            for (const auto& ph : builder.phases()) {
                PlantedFixation fx{ph.utterance_id, {builder.time_of(ph.n0), builder.time_of(ph.n1)}, ph.gaze,
                                   containing(stim, ph.gaze)};
                const Statement* st = nullptr;
                for (const auto& candidate : statements) {
                    if (candidate.id == ph.utterance_id) st = &candidate;
                }
                if (st && !st->general) {
                    for (const auto& id : fx.aoi_ids) planted.insert({ph.utterance_id, id, Modality::gaze});
                    for (const auto& id : containing(stim, ph.mouse)) planted.insert({ph.utterance_id, id, Modality::mouse});
                }
                truth.fixations.push_back(std::move(fx));
            }
            truth.links.assign(planted.begin(), planted.end());

            for (const auto& st : statements) {
                if (st.general) continue;
                subject_truth.mentioned += st.mentioned.size();
                for (const auto& aoi : st.mentioned) {
                    if (planted.contains({st.id, aoi, Modality::gaze})) ++subject_truth.gaze_hits;
                    if (planted.contains({st.id, aoi, Modality::mouse})) ++subject_truth.mouse_hits;
                }
            }

            study.truth.sessions.push_back(std::move(truth));
            study.sessions.push_back(std::move(out));
        }
        if (subject_truth.mentioned > 0) {
            subject_truth.gaze_rate =
                100.0 * static_cast<double>(subject_truth.gaze_hits) / static_cast<double>(subject_truth.mentioned);
            subject_truth.mouse_rate =
                100.0 * static_cast<double>(subject_truth.mouse_hits) / static_cast<double>(subject_truth.mentioned);
        }
        study.truth.subjects.push_back(subject_truth);
    }

    for (auto& s : study.sessions) {
        s.files.gaze = s.session.gaze;
        s.files.mouse = s.session.mouse;
        s.files.scroll = s.session.scroll;
    }
    return study;
}

std::string stimulus_wireframe_svg(const Stimulus& stim) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return std::string(buf);
    };
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(stim.page_width) + "\" height=\"" +
           num(stim.page_height) + "\" viewBox=\"0 0 " + num(stim.page_width) + " " + num(stim.page_height) + "\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"" + num(stim.page_width) + "\" height=\"" + num(stim.page_height) +
           "\" fill=\"#fafafa\"/>\n";
    for (const auto& a : stim.aois) {
        out += "  <rect x=\"" + num(a.rect.x) + "\" y=\"" + num(a.rect.y) + "\" width=\"" + num(a.rect.w) +
               "\" height=\"" + num(a.rect.h) + "\" fill=\"#e4e7eb\" stroke=\"#c3c8cf\"/>\n";
        out += "  <text x=\"" + num(a.rect.x + 8) + "\" y=\"" + num(a.rect.y + 22) +
               "\" font-family=\"sans-serif\" font-size=\"16\" fill=\"#555\">" + a.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string write_ground_truth_json(const GroundTruth& truth) {
    ojson doc;
    ojson subjects = ojson::array();
    for (const auto& s : truth.subjects) {
        subjects.push_back({{"subject_id", s.subject_id},
                            {"mentioned", s.mentioned},
                            {"gaze_hits", s.gaze_hits},
                            {"mouse_hits", s.mouse_hits},
                            {"gaze_rate", s.gaze_rate},
                            {"mouse_rate", s.mouse_rate}});
    }
    ojson sessions = ojson::array();
    for (const auto& s : truth.sessions) {
        ojson links = ojson::array();
        for (const auto& l : s.links) {
            links.push_back({{"utterance_id", l.utterance_id}, {"aoi_id", l.aoi_id}, {"modality", std::string(to_string(l.modality))}});
        }
        ojson fixations = ojson::array();
        for (const auto& f : s.fixations) {
            fixations.push_back({{"utterance_id", f.utterance_id},
                                 {"start", f.slot.start},
                                 {"end", f.slot.end},
                                 {"x", f.center.x},
                                 {"y", f.center.y},
                                 {"aoi_ids", f.aoi_ids}});
        }
        sessions.push_back({{"subject_id", s.subject_id},
                            {"stimulus_id", s.stimulus_id},
                            {"links", std::move(links)},
                            {"fixations", std::move(fixations)}});
    }
    doc["subjects"] = std::move(subjects);
    doc["sessions"] = std::move(sessions);
    return doc.dump(2) + '\n';
}

std::vector<fs::path> write_study(const SynthStudy& study, const fs::path& dir) {
    std::vector<fs::path> manifests;
    for (const auto& stim : study.stimuli) {
        const auto sdir = dir / "stimuli" / stim.id;
        write_text_file(sdir / "aois.json", write_aois_json(stim));
        write_text_file(sdir / "screenshot.svg", stimulus_wireframe_svg(stim));
    }
    for (const auto& s : study.sessions) {
        const auto sdir = dir / "sessions" / (s.session.subject_id + "_" + s.session.stimulus_id);
        const auto stim_dir = dir / "stimuli" / s.session.stimulus_id;
        manifests.push_back(write_session_files(sdir, s.files, stim_dir / "aois.json", stim_dir / "screenshot.svg"));
    }
    write_text_file(dir / "ground_truth.json", write_ground_truth_json(study.truth));
    std::string list;
    for (const auto& m : manifests) list += fs::relative(m, dir).generic_string() + "\n";
    write_text_file(dir / "manifests.txt", list);
    return manifests;
}

}  // namespace gazelink::synth
