#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace viewpair {

using Rng = std::mt19937_64;

// Counter-based stream derivation: a master seed plus a tuple of tags maps to
// an independent 64-bit seed. Adding new tag tuples never perturbs existing
// streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t));
  return h;
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  return Rng(derive_seed(seed, tags));
}

// Stream tags.
namespace stream {
inline constexpr std::uint64_t kWorld = 0x11;
inline constexpr std::uint64_t kWeights = 0x22;
inline constexpr std::uint64_t kQuality = 0x33;
inline constexpr std::uint64_t kObservation = 0x44;
inline constexpr std::uint64_t kPath = 0x55;
inline constexpr std::uint64_t kAmbiguity = 0x66;
}  // namespace stream

}  // namespace viewpair
