#include "cmdp/rng.hpp"

#include <stdexcept>

namespace cmdp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::size_t sample_categorical(std::span<const double> probs, Rng& rng) {
    if (probs.empty()) throw std::invalid_argument("sample_categorical: empty distribution");
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t last_positive = probs.size();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        last_positive = i;
        cumulative += probs[i];
        if (u < cumulative) return i;
    }
    if (last_positive == probs.size())
        throw std::invalid_argument("sample_categorical: no positive mass");
    return last_positive;
}

Rng stream_rng(std::uint64_t seed, std::string_view tag, std::uint64_t t) {
    std::uint64_t tag_hash = 1469598103934665603ULL;
    for (char ch : tag) {
        tag_hash ^= static_cast<unsigned char>(ch);
        tag_hash *= 1099511628211ULL;
    }
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(tag_hash) ^ splitmix64(t * 0xD1B54A32D192ED03ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return Rng(seq);
}

}  // namespace cmdp
