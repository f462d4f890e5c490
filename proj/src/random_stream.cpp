#include "spinsim/random_stream.hpp"

namespace spinsim {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 33)) * 0xFF51AFD7ED558CCDULL;
  x = (x ^ (x >> 33)) * 0xC4CEB9FE1A85EC53ULL;
  return x ^ (x >> 33);
}

RandomStream RandomStream::for_round(std::uint64_t seed, std::uint64_t round_index) {
  // Two rounds of mixing so that neighbouring seeds and indices decorrelate.
  return RandomStream(mix64(mix64(seed) ^ (round_index * 0xD1B54A32D192ED03ULL + 1)));
}

}  // namespace spinsim
