#pragma once

#include <cstdint>
#include <random>

namespace gcut {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replicate stream `index` under master seed `master`.
//
// Counter scheme: stream k is seeded with the (k+1)-th output of a
// splitmix64 generator started at `master`, i.e.
//   splitmix64(master + k * gamma)
// with gamma = 0x9E3779B97F4A7C15. Streams depend only on (master, k), so any
// assignment of replicates to workers reproduces the serial result.
inline constexpr std::uint64_t stream_seed(std::uint64_t master,
                                           std::uint64_t index) noexcept {
  return splitmix64(master + index * kGoldenGamma);
}

inline Engine make_engine(std::uint64_t master, std::uint64_t index = 0) {
  return Engine(stream_seed(master, index));
}

}  // namespace gcut
