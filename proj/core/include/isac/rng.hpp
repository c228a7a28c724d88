// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "isac/common.hpp"

namespace isac {

using Rng = std::mt19937_64;

/// splitmix64 step; used to derive decorrelated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based substream seed: mixes (master, a, b) through splitmix64 so
/// that every (snr_index, trial_index) pair owns an independent stream and
/// results do not depend on worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  std::uint64_t m0 = splitmix64(s);
  s = m0 ^ (a * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull);
  std::uint64_t m1 = splitmix64(s);
  s = m1 ^ (b * 0xDA942042E4DD58B5ull + 0x9E6C63D0A5E3A1BBull);
  return splitmix64(s);
}

inline Rng make_trial_rng(std::uint64_t master, std::uint64_t snr_index,
                          std::uint64_t trial_index) {
  return Rng(derive_seed(master, snr_index, trial_index));
}

/// Uniform double in [0, 1) built from the top 53 engine bits (bit-portable).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Circularly-symmetric complex Gaussian CN(0, variance) via Box-Muller.
inline Complex complex_gaussian(Rng& rng, double variance) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  double radius = std::sqrt(-std::log1p(-u1));  // Rayleigh, unit complex variance
  double scale = std::sqrt(variance);
  return Complex(scale * radius * std::cos(kTwoPi * u2),
                 scale * radius * std::sin(kTwoPi * u2));
}

/// One uniformly random bit.
inline std::uint8_t random_bit(Rng& rng) { return static_cast<std::uint8_t>(rng() >> 63); }

}  // namespace isac
