#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace evoplc {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-slot streams from a
// master seed so that evaluation order never influences results.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng derive_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Rng{mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b)};
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

inline bool coin(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution{p}(rng);
}

}  // namespace evoplc
