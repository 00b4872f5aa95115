#ifndef COPULASIM_RNG_HPP
#define COPULASIM_RNG_HPP

#include <cstdint>

#include "copulasim/normal.hpp"

namespace copulasim {

// Counter-based random streams. Every draw is a pure function of
// (seed, stream tag, a, b), so results never depend on evaluation order,
// thread scheduling, or how work is split across workers.

enum class Stream : std::uint64_t {
    ProbAssign = 1,
    Arrange = 2,
    PairSampling = 3,
    OutcomeFactor = 4,
    OutcomeGlobal = 5,
    OutcomeNoise = 6,
    SimGlobal = 7,
    SimFactor = 8,
    SimNoise = 9,
    SimIndependent = 10,
    PortfolioDraw = 11,
    CorrPairs = 12,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t rng_bits(std::uint64_t seed, Stream tag, std::uint64_t a,
                              std::uint64_t b) {
    std::uint64_t h = detail::mix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = detail::mix64(h ^ static_cast<std::uint64_t>(tag) * 0xff51afd7ed558ccdULL);
    h = detail::mix64(h ^ a * 0xc4ceb9fe1a85ec53ULL);
    h = detail::mix64(h ^ b * 0x2545f4914f6cdd1dULL);
    return h;
}

/// Uniform draw in the open interval (0,1).
inline double rng_uniform(std::uint64_t seed, Stream tag, std::uint64_t a,
                          std::uint64_t b) {
    std::uint64_t bits = rng_bits(seed, tag, a, b);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw via the inverse CDF (stateless, no rejection).
inline double rng_normal(std::uint64_t seed, Stream tag, std::uint64_t a,
                         std::uint64_t b) {
    return std_normal_quantile(Probability(rng_uniform(seed, tag, a, b)));
}

/// Uniform integer in [0, n).
inline std::uint64_t rng_below(std::uint64_t seed, Stream tag, std::uint64_t a,
                               std::uint64_t b, std::uint64_t n) {
    // 128-bit multiply keeps the mapping unbiased enough for n << 2^64.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng_bits(seed, tag, a, b)) * n) >> 64);
}

}  // namespace copulasim

#endif
