#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace heisenet {

/// Deterministic random stream with explicit substream derivation.
///
/// The engine is std::mt19937_64 (its output sequence is fully specified by
/// the standard). Uniform and normal variates are derived from raw 64-bit
/// words here rather than through std::*_distribution, whose output is
/// implementation-defined and would break reproducibility guarantees.
/// Parallel work items get independent streams via Rng::stream, which mixes
/// the base seed with stream ids through splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent substream for (seed, id0, id1, id2).
    static Rng stream(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1 = 0,
                      std::uint64_t id2 = 0) {
        std::uint64_t s = seed;
        s = splitmix64(s ^ (0x9e3779b97f4a7c15ull + id0));
        s = splitmix64(s ^ (0xbf58476d1ce4e5b9ull + id1));
        s = splitmix64(s ^ (0x94d049bb133111ebull + id2));
        return Rng(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Centred normal variate; the interface takes a variance, never a
    /// standard deviation.
    double normal_from_variance(double variance) {
        double sd = std::sqrt(variance);
        if (has_spare_) {
            has_spare_ = false;
            return sd * spare_;
        }
        // Box-Muller; u1 in (0, 1] so the log is finite.
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = uniform01();
        double radius = std::sqrt(-2.0 * std::log(u1));
        spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return sd * radius * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace heisenet
