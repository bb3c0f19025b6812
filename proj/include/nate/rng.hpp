#pragma once

// Seeded randomness helpers.  The engine is std::mt19937_64 (its output
// sequence is pinned by the standard); draws, shuffles, and normals are
// spelled out here rather than using <random> distributions, whose results
// vary between standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace nate {

using RngEngine = std::mt19937_64;

inline uint64_t rng_below(RngEngine& rng, uint64_t n) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

inline double rng_unit(RngEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; one value per call.
inline double rng_normal(RngEngine& rng) {
  double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = rng_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <typename T>
void rng_shuffle(std::vector<T>& v, RngEngine& rng) {
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng_below(rng, i)]);
}

// Stable derivation of per-job seeds from a master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace nate
