#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/matrix.hpp"
#include "matsketch/prf.hpp"

namespace matsketch {

// Synthetic product instance: standard-normal entries, an exact-count subset
// of positions scaled up as outliers, an exact-count subset kept nonzero.
struct SynthSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t m = 0;
  double sparsity = 1.0;
  double outlier_frac = 0.1;
  double outlier_scale = 10.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::uint64_t kRoleA = 0x524F4C41ULL;
inline constexpr std::uint64_t kRoleB = 0x524F4C42ULL;
inline constexpr std::uint64_t kValuesStream = 0x56414C53ULL;
inline constexpr std::uint64_t kOutlierStream = 0x4F55544CULL;
inline constexpr std::uint64_t kKeepStream = 0x53505253ULL;
inline constexpr std::uint64_t kCoefStream = 0x58545255ULL;
inline constexpr std::uint64_t kNoiseStream = 0x4E4F4953ULL;

// Marks an exact-count uniform subset via a partial Fisher-Yates pass.
inline std::vector<std::uint8_t> exact_subset_mask(std::size_t total, std::size_t count,
                                                   std::uint64_t seed) {
  std::vector<std::uint32_t> idx(total);
  for (std::size_t i = 0; i < total; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint8_t> mask(total, 0);
  for (std::size_t step = 0; step < count; ++step) {
    const std::size_t j = step + static_cast<std::size_t>(prf64(seed, step) % (total - step));
    std::swap(idx[step], idx[j]);
    mask[idx[step]] = 1;
  }
  return mask;
}

// One n_rows x n_cols draw. outlier_mask, when requested, flags the scaled
// positions over the full dense grid (before sparsification).
inline SparseMatrix gen_dense_matrix(std::size_t n_rows, std::size_t n_cols, double sparsity,
                                     double outlier_frac, double outlier_scale, std::uint64_t seed,
                                     std::vector<std::uint8_t>* outlier_mask_out = nullptr) {
  if (n_rows == 0 || n_cols == 0) throw parameter_error("matrix dimensions must be positive");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw parameter_error("sparsity must be in (0, 1]");
  if (!(outlier_frac >= 0.0 && outlier_frac <= 1.0))
    throw parameter_error("outlier_frac must be in [0, 1]");
  if (!(outlier_scale >= 1.0)) throw parameter_error("outlier_scale must be at least 1");

  const std::size_t total = n_rows * n_cols;
  const auto count_of = [total](double frac) {
    return static_cast<std::size_t>(std::llround(frac * static_cast<double>(total)));
  };

  const SeededHash values{derive_seed(seed, kValuesStream)};
  const std::vector<std::uint8_t> outlier =
      exact_subset_mask(total, count_of(outlier_frac), derive_seed(seed, kOutlierStream));
  const std::vector<std::uint8_t> keep =
      sparsity == 1.0 ? std::vector<std::uint8_t>(total, 1)
                      : exact_subset_mask(total, count_of(sparsity), derive_seed(seed, kKeepStream));

  std::vector<std::vector<Entry>> rows(n_rows);
  double n0 = 0.0, n1 = 0.0;
  for (std::size_t i = 0; i < n_rows; ++i) {
    auto& row = rows[i];
    for (std::size_t j = 0; j < n_cols; ++j) {
      const std::size_t p = i * n_cols + j;
      if (!keep[p]) continue;
      normal_pair(values, p, n0, n1);
      double v = n0;
      if (outlier[p]) v *= outlier_scale;
      row.push_back(Entry{static_cast<std::uint32_t>(j), v});
    }
  }
  if (outlier_mask_out) *outlier_mask_out = outlier;
  return SparseMatrix(n_rows, n_cols, std::move(rows));
}

}  // namespace detail

// A (n x d) and B (n x m) drawn independently under the same protocol.
inline std::pair<SparseMatrix, SparseMatrix> gen_synthetic(const SynthSpec& spec) {
  SparseMatrix a = detail::gen_dense_matrix(spec.n, spec.d, spec.sparsity, spec.outlier_frac,
                                            spec.outlier_scale,
                                            derive_seed(spec.seed, detail::kRoleA));
  SparseMatrix b = detail::gen_dense_matrix(spec.n, spec.m, spec.sparsity, spec.outlier_frac,
                                            spec.outlier_scale,
                                            derive_seed(spec.seed, detail::kRoleB));
  return {std::move(a), std::move(b)};
}

struct RegressionInstance {
  SparseMatrix a;       // n x d
  SparseMatrix b;       // n x 1, b = A x_true + noise
  std::vector<double> x_true;
  double noise_sigma = 0.0;
};

inline RegressionInstance gen_regression_instance(std::size_t n, std::size_t d, double sparsity,
                                                  double noise_sigma, std::uint64_t seed) {
  if (n <= d) throw parameter_error("regression instance requires n > d");
  if (!(noise_sigma >= 0.0)) throw parameter_error("noise_sigma must be non-negative");

  RegressionInstance inst;
  inst.noise_sigma = noise_sigma;
  inst.a = detail::gen_dense_matrix(n, d, sparsity, 0.1, 10.0, derive_seed(seed, detail::kRoleA));

  const SeededHash coef{derive_seed(seed, detail::kCoefStream)};
  const SeededHash noise{derive_seed(seed, detail::kNoiseStream)};
  inst.x_true.resize(d);
  double n0 = 0.0, n1 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    normal_pair(coef, j, n0, n1);
    inst.x_true[j] = n0;
  }

  std::vector<std::vector<Entry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (const auto& e : inst.a.row(i)) v += e.value * inst.x_true[e.col];
    if (noise_sigma > 0.0) {
      normal_pair(noise, i, n0, n1);
      v += noise_sigma * n0;
    }
    if (v != 0.0) rows[i].push_back(Entry{0, v});
  }
  inst.b = SparseMatrix(n, 1, std::move(rows));
  return inst;
}

// ||W - A^T B||_F / (||A||_F ||B||_F) given the precomputed exact product and
// norm product (hot path for sweeps).
inline double product_error(const DenseMatrix& w, const DenseMatrix& exact, double norm_product) {
  if (w.n_rows() != exact.n_rows() || w.n_cols() != exact.n_cols())
    throw dimension_error("product_error: shape mismatch");
  double s = 0.0;
  const auto wd = w.data();
  const auto ed = exact.data();
  for (std::size_t i = 0; i < wd.size(); ++i) {
    const double diff = wd[i] - ed[i];
    s += diff * diff;
  }
  return std::sqrt(s) / norm_product;
}

inline double product_error(const DenseMatrix& w, const SparseMatrix& a, const SparseMatrix& b) {
  return product_error(w, exact_product(a, b),
                       std::sqrt(frob_sq_norm(a)) * std::sqrt(frob_sq_norm(b)));
}

}  // namespace matsketch
