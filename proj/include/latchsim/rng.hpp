#pragma once

#include <cstdint>

namespace latchsim {

/// Deterministic splitmix64 generator. Used everywhere instead of the
/// standard-library distributions so that trajectories are bit-identical
/// across platforms and library versions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Box-Muller with a cached spare.
    double gaussian(double mean = 0.0, double stddev = 1.0);

    /// Mixes a stream salt into a seed so sub-streams are independent.
    static uint64_t derive(uint64_t seed, uint64_t salt);

private:
    uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace latchsim
