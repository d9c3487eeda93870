// rng.hpp — counter-based SplitMix64 stream: the value at index k is a pure
// function of (seed, k), so parallel consumers can draw disjoint index ranges
// and any execution schedule reproduces the same numbers.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qoct {

namespace detail {
inline std::uint64_t sm64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// k-th 64-bit word of the stream for `seed`.
inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t k) {
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
  return detail::sm64_mix(detail::sm64_mix(seed) + (k + 1) * golden);
}

// Uniform on [0, 1) from the top 53 bits of word k.
inline double rng_uniform(std::uint64_t seed, std::uint64_t k) {
  return static_cast<double>(rng_word(seed, k) >> 11) * 0x1.0p-53;
}

// Standard normal by Box-Muller on the uniform words (2k, 2k+1);
// log1p(-u) keeps the radius finite since u < 1.
inline double rng_normal(std::uint64_t seed, std::uint64_t k) {
  const double u1 = rng_uniform(seed, 2 * k);
  const double u2 = rng_uniform(seed, 2 * k + 1);
  const double r  = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qoct
