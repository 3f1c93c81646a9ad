#pragma once

// Portable deterministic sampling helpers. The standard distributions are
// implementation-defined, so results would differ between standard libraries;
// these only depend on mt19937_64, whose output sequence is fixed.

#include <cmath>
#include <cstdint>
#include <random>

namespace sparsepbn::detail {

/// Uniform integer in [0, n) by rejection (unbiased).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
  std::uint64_t r = 0;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

/// Uniform double in (0, 1).
inline double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Exp(1) draw.
inline double exponential(std::mt19937_64& rng) {
  return -std::log(uniform_open(rng));
}

}  // namespace sparsepbn::detail
