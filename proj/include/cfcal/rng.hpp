#pragma once

#include <cstdint>
#include <random>

namespace cfcal::rng {

// std::mt19937_64 output is fixed by the standard; the distributions are not.
// These helpers keep every draw reproducible across standard libraries.
using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream for (seed, a, b), e.g. (seed, generation, individual).
inline Engine stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b + 0x632BE59BD9B4E019ULL));
  return Engine{h};
}

/// Uniform in [0, 1).
inline double unit(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

inline double uniform(Engine& eng, double lo, double hi) { return lo + (hi - lo) * unit(eng); }

/// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
inline std::uint64_t index(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = eng();
  while (x >= limit) x = eng();
  return x % n;
}

inline bool bernoulli(Engine& eng, double p) { return unit(eng) < p; }

}  // namespace cfcal::rng
