#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qdec {

// Reproducibility contract: every random draw in this library comes from a
// std::mt19937_64 (bit-exact output is fixed by the C++ standard) whose seed
// is derived with the SplitMix64 finalizer below, and raw 64-bit outputs are
// converted to doubles manually. std::uniform_real_distribution and
// std::shuffle are implementation-defined and must not be used.

/// SplitMix64 finalizer (Steele, Lea & Flood). Mixes a seed and a stream
/// index into a well-spread 64-bit value.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x51ed2701ULL));
}

inline std::mt19937_64 make_engine(uint64_t seed, uint64_t stream = 0) {
  return std::mt19937_64(derive_seed(seed, stream));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Multiply-shift bounded draw; the bias for
/// n << 2^64 is far below anything observable here.
inline uint64_t uniform_below(std::mt19937_64& eng, uint64_t n) {
  return static_cast<uint64_t>((static_cast<__uint128_t>(eng()) * n) >> 64);
}

/// Deterministic Fisher-Yates shuffle (std::shuffle is not portable).
template <class T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace qdec
