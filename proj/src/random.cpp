#include "echolevel/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace echolevel {

uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t Rng::uniform_int(uint64_t lo, uint64_t hi) {
  if (hi <= lo) return lo;
  const uint64_t span = hi - lo;
  if (span == std::numeric_limits<uint64_t>::max()) return engine_();
  const uint64_t range = span + 1;
  // 2^64 mod range; draws below it fall in the partial bucket.
  const uint64_t threshold = (0 - range) % range;
  uint64_t draw = engine_();
  while (draw < threshold) draw = engine_();
  return lo + draw % range;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace echolevel
