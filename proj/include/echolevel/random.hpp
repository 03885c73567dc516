#pragma once

#include <cstdint>
#include <random>

namespace echolevel {

/// Mixes a base seed with a stream index into an independent child seed
/// (splitmix64 finalizer). Used for per-tree, per-row and per-iteration
/// streams so results never depend on evaluation order.
uint64_t derive_seed(uint64_t base, uint64_t stream);

/// Seeded random source. The integer and real draws are implemented on top of
/// the raw engine output instead of <random> distributions, whose algorithms
/// differ between standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform integer in the closed range [lo, hi].
  uint64_t uniform_int(uint64_t lo, uint64_t hi);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal draw (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace echolevel
