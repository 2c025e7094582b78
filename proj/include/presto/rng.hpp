#pragma once

#include <cstdint>
#include <random>

namespace presto {

/// Deterministic uniform generator on top of std::mt19937_64. The standard
/// distributions are implementation-defined, so draws are derived from raw
/// bits directly to keep outputs identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (small ranges only; modulo bias negligible
  /// for the ranges used here and, more importantly, deterministic).
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(bits() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace presto
