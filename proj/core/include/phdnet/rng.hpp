#pragma once

#include <cstdint>
#include <random>

namespace phdnet {

// Deterministic seed derivation. Every stochastic substream (one node's sensing
// at one step, one filter's resampling, ...) gets its own engine seeded from a
// chain of splitmix64 mixes, so results do not depend on scheduling or on which
// other substreams were consumed.
namespace rng {

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Substream ids. Filter-specific phases are disjoint so that enabling or
// disabling one filter never shifts another filter's random numbers.
enum class Phase : std::uint64_t {
  kSense = 1,
  kMsResample = 2,
  kMsRoughen = 3,
  kMsBirth = 4,
  kDiffResample = 5,
  kDiffRoughen = 6,
  kDiffBirth = 7,
  kLocalResample = 8,
  kLocalRoughen = 9,
  kLocalBirth = 10,
};

inline std::uint64_t run_seed(std::uint64_t master, std::uint64_t run_index) {
  return mix(master, run_index);
}

inline std::uint64_t stream_seed(std::uint64_t run_seed, Phase phase, int step, int node) {
  std::uint64_t s = mix(run_seed, static_cast<std::uint64_t>(phase));
  s = mix(s, static_cast<std::uint64_t>(step));
  return mix(s, static_cast<std::uint64_t>(node));
}

inline std::mt19937_64 engine(std::uint64_t run_seed, Phase phase, int step, int node) {
  return std::mt19937_64(stream_seed(run_seed, phase, step, node));
}

}  // namespace rng
}  // namespace phdnet
