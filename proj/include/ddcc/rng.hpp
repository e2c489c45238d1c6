#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ddcc {

struct Solution;

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent substream seeds, never
/// as a generator on its own.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return mix64(base ^ mix64(tag));
}

/// Seed that depends on both a base seed and the pick vector, so the same
/// solution always sees the same random stream within one run.
std::uint64_t solution_seed(std::uint64_t base, const Solution& solution);

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace ddcc
