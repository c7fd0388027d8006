#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>

namespace sawrec {

/// SplitMix64 finalizer. Bijective 64-bit mixer used for both stream
/// derivation and output generation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a over the tag bytes, then mixed.
constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(h);
}

/// Sub-stream key: stream(master, purpose, index) =
///   mix64(mix64(master ^ tag_hash(purpose)) + mix64(index)).
constexpr std::uint64_t derive_stream(std::uint64_t master, std::string_view purpose,
                                      std::uint64_t index = 0) noexcept {
    return mix64(mix64(master ^ tag_hash(purpose)) + mix64(index ^ 0x5851F42D4C957F2DULL));
}

/// Counter-based generator: the i-th output is mix64(key + i * golden).
/// Any output can be reproduced from (key, i) alone.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
    CounterRng(std::uint64_t master, std::string_view purpose, std::uint64_t index = 0) noexcept
        : key_(derive_stream(master, purpose, index)) {}

    std::uint64_t next() noexcept {
        return mix64(key_ ^ mix64(counter_++ * 0x9E3779B97F4A7C15ULL));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), rejection-sampled to remove modulo bias.
    std::uint64_t uniform_index(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % bound;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal via Box-Muller (one output per call; the pair partner is discarded).
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace sawrec
