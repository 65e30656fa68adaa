#pragma once

#include <cstdint>
#include <random>

namespace beliefnet {

// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One RNG stream per (run seed, stream index). Trials, chains and curves each
// draw from their own stream so that parallel or reordered execution cannot
// change the results.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 1)));
}

}  // namespace beliefnet
