#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazelink/bundle.hpp"
#include "gazelink/config.hpp"
#include "gazelink/linking.hpp"
#include "gazelink/model.hpp"

namespace gazelink {

enum class MapHue { positive, negative, neutral, mixed, no_feedback };

std::string_view to_string(MapHue h) noexcept;

/// Counted feedback for one AOI.
struct AoiFeedback {
    std::string aoi_id;
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t neutral = 0;
    std::size_t unlabeled = 0;

    std::size_t labeled() const noexcept { return positive + negative + neutral; }
    std::size_t total() const noexcept { return labeled() + unlabeled; }
    /// (pos - neg) / (pos + neg + neu); empty without labeled feedback.
    std::optional<double> score() const noexcept;
    bool operator==(const AoiFeedback&) const = default;
};

MapHue classify_feedback(const AoiFeedback& feedback, const SentimentMapStyle& style) noexcept;

/// Adds one session's utterances to `tally` (one entry per stimulus AOI, same order).
/// An utterance counts toward an AOI when it mentions it and carries the link the
/// evidence rule asks for.
void tally_feedback(std::vector<AoiFeedback>& tally, const Stimulus& stimulus, std::span<const Utterance> utterances,
                    std::span<const LinkRecord> links, MapEvidence evidence);

std::vector<AoiFeedback> aoi_feedback(const Stimulus& stimulus, std::span<const Utterance> utterances,
                                      std::span<const LinkRecord> links, MapEvidence evidence);

/// SVG 1.1 document sized to the page. Same inputs give the same bytes.
std::string render_sentiment_map(const Stimulus& stimulus, std::span<const AoiFeedback> feedback,
                                 const SentimentMapStyle& style);

std::string render_sentiment_map(const Stimulus& stimulus, std::span<const Utterance> utterances,
                                 std::span<const LinkRecord> links, const SentimentMapStyle& style);

/// Pools every bundle session recorded on `stimulus_id` using the bundle's own style.
/// `screenshot_href` overrides the stimulus screenshot reference when given.
/// Throws ValidationError for an unknown stimulus id.
std::string render_sentiment_map(const StudyBundle& bundle, std::string_view stimulus_id,
                                 std::optional<std::string> screenshot_href = std::nullopt);

}  // namespace gazelink
