#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace cmdp {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Inverse-CDF draw from a probability vector. Rounding mass at the tail is
/// assigned to the last index with positive probability.
std::size_t sample_categorical(std::span<const double> probs, Rng& rng);

/// Independent streams keyed by (seed, tag, t), so that e.g. changing the
/// learner does not perturb environment randomness.
Rng stream_rng(std::uint64_t seed, std::string_view tag, std::uint64_t t);

namespace streams {
inline constexpr std::string_view context = "context";
inline constexpr std::string_view transition = "transition";
inline constexpr std::string_view reward = "reward";
inline constexpr std::string_view baseline_policy = "baseline-policy";
}  // namespace streams

}  // namespace cmdp
