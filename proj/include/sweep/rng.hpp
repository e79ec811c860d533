#pragma once

#include <cstdint>

namespace sweep {

/// SplitMix64 (Steele, Lea & Flood's mixer, the java.util.SplittableRandom
/// finalizer). Chosen because the algorithm is three fixed 64-bit operations,
/// so instances reproduce bit-for-bit on any platform or language:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
///   z = (z ^ z>>27) * 0x94D049BB133111EB; return z ^ z>>31
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 significant bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

}  // namespace sweep
