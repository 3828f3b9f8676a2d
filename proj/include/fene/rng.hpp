// SPDX-License-Identifier: Apache-2.0
#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. SC'11).
// Every draw is a pure function of (seed, phase, step, particle, draw), so
// ensembles can be advanced by any number of workers, retries can consume
// extra draws per particle, and two runs can share noise exactly.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fene::rng {

enum class Phase : std::uint32_t {
    simulate = 0, // unconstrained physical steps, keyed by global step index
    lift = 1,     // constrained steps, keyed by a running lift-step counter
    init = 2,     // ensemble initialization (equilibrium / uniform draws)
};

namespace detail {

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    constexpr std::uint32_t kWeylB = 0xBB67AE85u;
    constexpr std::uint32_t kMulA = 0xD2511F53u;
    constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mul_hi_lo(kMulA, ctr[0], hi0, lo0);
        mul_hi_lo(kMulB, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// 53-bit uniform in [0,1)
inline double to_unit(std::uint64_t v) { return static_cast<double>(v >> 11) * 0x1.0p-53; }

// 53-bit uniform in (0,1], safe under log
inline double to_unit_pos(std::uint64_t v) {
    return (static_cast<double>(v >> 11) + 1.0) * 0x1.0p-53;
}

inline std::array<std::uint32_t, 4> block(std::uint64_t seed, Phase phase, std::uint32_t step,
                                          std::uint32_t particle, std::uint32_t draw) {
    return philox4x32({draw, particle, step, static_cast<std::uint32_t>(phase)},
                      {static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32)});
}

} // namespace detail

inline double uniform(std::uint64_t seed, Phase phase, std::uint32_t step,
                      std::uint32_t particle, std::uint32_t draw) {
    const auto r = detail::block(seed, phase, step, particle, draw);
    return detail::to_unit(detail::join64(r[0], r[1]));
}

// One standard normal per counter via Box-Muller (second output discarded).
inline double normal(std::uint64_t seed, Phase phase, std::uint32_t step,
                     std::uint32_t particle, std::uint32_t draw) {
    const auto r = detail::block(seed, phase, step, particle, draw);
    const double u1 = detail::to_unit_pos(detail::join64(r[0], r[1]));
    const double u2 = detail::to_unit(detail::join64(r[2], r[3]));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Gamma(alpha) for alpha >= 1 (Marsaglia-Tsang); consumes draws in pairs
// starting at *draw and advances it past the accepted attempt.
inline double gamma(std::uint64_t seed, Phase phase, std::uint32_t step, std::uint32_t particle,
                    std::uint32_t& draw, double alpha) {
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = normal(seed, phase, step, particle, draw++);
        const double u = uniform(seed, phase, step, particle, draw++);
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

} // namespace fene::rng
