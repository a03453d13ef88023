#pragma once

// Helpers shared by the unit tests. Test-side randomness deliberately uses
// std::mt19937_64, independent of the library's PRF.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "matsketch/matrix.hpp"

namespace test_support {

// Dense n x d with standard-normal entries; optionally zero out rows/entries.
inline std::vector<double> random_dense(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                        double keep_prob = 1.0) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  std::vector<double> v(n * d, 0.0);
  for (auto& x : v)
    if (keep_prob >= 1.0 || unif(rng) < keep_prob) x = normal(rng);
  return v;
}

inline matsketch::SparseMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                             double keep_prob = 1.0) {
  const auto v = random_dense(rng, n, d, keep_prob);
  return matsketch::SparseMatrix::from_dense(n, d, v);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Streaming mean / variance accumulator.
struct Welford {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d1 = x - mean;
    mean += d1 / static_cast<double>(n);
    m2 += d1 * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_error() const { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

}  // namespace test_support
