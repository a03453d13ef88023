#pragma once

#include <cmath>
#include <cstdint>

namespace matsketch {

namespace detail {

// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
// Domain separator so derived child seeds never alias raw hash outputs.
inline constexpr std::uint64_t kDeriveSalt = 0xD6E8FEB86659FD93ULL;

}  // namespace detail

// Keyed 64-bit PRF: the i-th output of a splitmix64 stream seeded at `seed`.
inline std::uint64_t prf64(std::uint64_t seed, std::uint64_t index) {
  return detail::mix64(seed + (index + 1) * detail::kGolden);
}

// Deterministic uniform hash h(i) in the open interval (0,1).
//
// Uses the top 53 bits shifted into [1, 2^53], divided by 2^53 + 1, so the
// result is never 0 or 1 and carries full double resolution.
struct SeededHash {
  std::uint64_t seed = 0;

  double unit(std::uint64_t index) const {
    const std::uint64_t bits = (prf64(seed, index) >> 11) + 1;
    return static_cast<double>(bits) / 9007199254740993.0;  // 2^53 + 1
  }
};

inline double hash_unit(const SeededHash& h, std::uint64_t index) { return h.unit(index); }

// Independent child stream for tag `t`; children of distinct tags (or of
// distinct parents) behave as unrelated seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return detail::mix64((seed ^ detail::kDeriveSalt) + (tag + 1) * detail::kGolden);
}

// One standard-normal pair per counter via Box-Muller on units at
// (2c, 2c+1). u1 > 0 strictly, so the log is always finite.
inline void normal_pair(const SeededHash& h, std::uint64_t counter, double& n0, double& n1) {
  const double u1 = h.unit(2 * counter);
  const double u2 = h.unit(2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 6.283185307179586476925286766559 * u2;
  n0 = r * std::cos(t);
  n1 = r * std::sin(t);
}

inline double rademacher(const SeededHash& h, std::uint64_t index) {
  return (prf64(h.seed, index) >> 63) ? 1.0 : -1.0;
}

}  // namespace matsketch
