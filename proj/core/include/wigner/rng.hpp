#pragma once

#include <cstdint>

namespace wigner {

// SplitMix64: a counter-based 64-bit generator. Every stream is a pure
// function of its starting state, so per-entry streams derived from
// seed ^ hash(j,k) are order-independent and safe to sample in parallel.
struct SplitMix64 {
    std::uint64_t state = 0;

    constexpr explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform01_open_low() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }
};

constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

/// Stream for matrix entry (j,k): independent of sampling order.
constexpr SplitMix64 entry_stream(std::uint64_t seed, std::uint64_t j,
                                  std::uint64_t k) {
    return SplitMix64{seed ^ mix64((j << 32) | (k & 0xFFFFFFFFULL))};
}

/// Replayable per-replicate seed for sweep experiments.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n,
                                    std::uint64_t replicate) {
    return mix64(master ^ mix64(n * 0x9E3779B97F4A7C15ULL + replicate));
}

}  // namespace wigner
