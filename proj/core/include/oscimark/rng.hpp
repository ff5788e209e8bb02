#pragma once

#include <cstdint>
#include <random>

namespace oscimark {

// splitmix64 step; used both as a generator finalizer and to derive
// independent child seeds from (master seed, task index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x517cc1b727220a95ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(splitmix64(seed));
}

}  // namespace oscimark
