#pragma once

#include <cstdint>
#include <random>

namespace poitour {

/// Seeded generator with platform-independent derived distributions.
/// std::uniform_*_distribution output is implementation-defined, so the
/// mappings below are spelled out to keep models reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling removes modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace poitour
