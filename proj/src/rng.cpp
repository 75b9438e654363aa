#include "idpdb/rng.hpp"

#include <limits>

namespace idpdb {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

CounterRng CounterRng::substream(std::uint64_t seed, std::string_view label) {
  return CounterRng(mix64(mix64(seed) ^ fnv1a64(label)));
}

std::uint64_t CounterRng::next_u64() {
  // Two rounds keep consecutive counters decorrelated for nearby keys.
  const std::uint64_t c = counter_++;
  return mix64(mix64(key_ + 0x9e3779b97f4a7c15ULL * (c + 1)) ^ key_);
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

}  // namespace idpdb
