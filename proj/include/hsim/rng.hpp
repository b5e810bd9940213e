#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hsim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of stream `stream` under `master`. Streams are decorrelated by two
/// rounds of splitmix64, so neighbouring indices give unrelated seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Rounds down or up with probability equal to the fractional part, so the
/// expectation equals `x`.
inline long stochastic_round(double x, Rng& rng) {
    const double base = std::floor(x);
    const double frac = x - base;
    return static_cast<long>(base) + (frac > 0.0 && bernoulli(rng, frac) ? 1 : 0);
}

}  // namespace hsim
