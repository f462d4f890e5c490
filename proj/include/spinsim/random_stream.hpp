#pragma once

#include <cstdint>
#include <limits>

namespace spinsim {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it can feed
/// <random> distributions, but the library itself only uses uniform01().
///
/// Per-round substreams are keyed by (seed, round index) through for_round();
/// the state of round i never depends on how rounds are split across workers.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  static RandomStream for_round(std::uint64_t seed, std::uint64_t round_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Finalizer used to derive substream keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace spinsim
