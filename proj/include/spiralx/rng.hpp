#ifndef SPIRALX_RNG_HPP
#define SPIRALX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace spiralx {

// std::mt19937 is fully specified by the standard, but the distribution
// adapters are not, so every distribution here is hand-rolled. Outputs are
// therefore bit-identical across standard libraries and platforms.

using Rng = std::mt19937;

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint32_t uniform_below(Rng& rng, std::uint32_t n) {
    if (n == 0) return 0;
    const std::uint32_t limit = UINT32_MAX - UINT32_MAX % n;
    std::uint32_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Uniform real in [0, 1) with 32 bits of resolution.
inline double uniform01(Rng& rng) {
    return rng() * (1.0 / 4294967296.0);
}

/// Uniform real in [lo, hi).
inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller. One value per call; the sibling value is
/// discarded to keep the stream position independent of call pairing.
inline double gaussian(Rng& rng) {
    double u1;
    do {
        u1 = uniform01(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double gaussian(Rng& rng, double mean, double stddev) {
    return mean + stddev * gaussian(rng);
}

/// Splits a master seed into independent per-item seeds (SplitMix64 step).
inline std::uint32_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<std::uint32_t>(z ^ (z >> 32));
}

} // namespace spiralx

#endif
