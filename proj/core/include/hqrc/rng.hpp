#pragma once

#include <cstdint>
#include <random>

namespace hqrc {

/// The single generator used by every stochastic operation.
using Rng = std::mt19937_64;

/// Independent sub-streams derived from one experiment seed.
enum class Stream : std::uint64_t {
  Weights = 1,
  RandomBlocks = 2,
  Shots = 3,
  CoherentNoise = 4,
};

/// splitmix64 finalizer; decorrelates (seed, stream) pairs.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return Rng(mix_seed(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace hqrc
