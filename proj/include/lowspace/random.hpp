#pragma once

#include <cstdint>
#include <random>

namespace lowspace {

/// Seeded generator with a platform-independent integer mapping, so corpora
/// and reports are reproducible from the seed alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform-ish value in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    bool coin() { return engine_() & 1u; }
    /// Value in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

} // namespace lowspace
