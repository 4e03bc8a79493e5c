#pragma once

#include <cstdint>

#include "scenopt/detail/numeric.hpp"

namespace scenopt {

/**
 * Counter-based pseudo-random generator: every draw is a pure function of
 * (seed, stream, counter), so independent streams can be handed to parallel
 * workers and any draw can be reproduced from its coordinates alone.
 *
 * The mixing function is the splitmix64 finalizer applied to the keyed
 * counter; output order within a stream is fixed.
 */
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0x517cc1b727220a95ULL)) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform draw on the open interval (0,1).
    double next_double() {
        return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform draw on (lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Normal draw via the inverse CDF (one uniform per normal).
    double next_normal(double mu, double sigma) {
        return mu + sigma * detail::normal_quantile(next_double());
    }

    /// Integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream id from a (purpose, index) pair, for deriving per-trial streams.
inline std::uint64_t rng_stream(std::uint64_t purpose, std::uint64_t index) {
    return (purpose << 40) ^ index;
}

} // namespace scenopt
