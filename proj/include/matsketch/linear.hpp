#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/matrix.hpp"
#include "matsketch/prf.hpp"

namespace matsketch {

enum class ProjectionKind : std::uint8_t { Gaussian = 0, Sign = 1, CountSketch = 2 };

// Linear sketch Pi * A with a k x n projection Pi drawn deterministically from
// (seed, kind). Two sketches with matching (kind, k, seed) share Pi, so
// (Pi A)^T (Pi B) estimates A^T B.
struct LinearSketch {
  ProjectionKind kind = ProjectionKind::Gaussian;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t n_rows = 0;  // rows of the source matrix
  DenseMatrix data;        // k x n_cols(A)
};

namespace detail {

inline constexpr std::uint64_t kBucketStream = 0x434B4254ULL;  // countsketch buckets
inline constexpr std::uint64_t kSignStream = 0x434B5347ULL;    // countsketch signs

// Column i of Pi (the coefficients applied to source row i), for the dense
// projection kinds. Entries scaled by 1/sqrt(k).
inline void projection_column(ProjectionKind kind, std::uint64_t seed, std::size_t k,
                              std::uint64_t i, std::vector<double>& out) {
  out.resize(k);
  const SeededHash h{derive_seed(seed, i)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  if (kind == ProjectionKind::Gaussian) {
    double n0 = 0.0, n1 = 0.0;
    for (std::size_t r = 0; r < k; r += 2) {
      normal_pair(h, r / 2, n0, n1);
      out[r] = n0 * scale;
      if (r + 1 < k) out[r + 1] = n1 * scale;
    }
  } else {
    for (std::size_t r = 0; r < k; ++r) out[r] = rademacher(h, r) * scale;
  }
}

}  // namespace detail

// CountSketch application with explicit bucket / sign maps: source row i is
// added to output row bucket[i] with sign[i]. Exposed so tests can force a
// chosen map (e.g. the identity permutation at k = n_rows).
inline DenseMatrix countsketch_apply(const SparseMatrix& a, std::span<const std::size_t> bucket,
                                     std::span<const double> sign, std::size_t k) {
  if (bucket.size() != a.n_rows() || sign.size() != a.n_rows())
    throw dimension_error("countsketch_apply: map length must equal n_rows");
  DenseMatrix out(k, a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const auto row = a.row(i);
    if (row.empty()) continue;
    if (bucket[i] >= k) throw parameter_error("countsketch_apply: bucket out of range");
    double* dst = out.row_data(bucket[i]);
    const double s = sign[i];
    for (const auto& e : row) dst[e.col] += s * e.value;
  }
  return out;
}

inline LinearSketch linear_sketch(const SparseMatrix& a, std::size_t k, std::uint64_t seed,
                                  ProjectionKind kind) {
  if (k == 0) throw parameter_error("k must be positive");

  LinearSketch s;
  s.kind = kind;
  s.k = k;
  s.seed = seed;
  s.n_rows = a.n_rows();

  if (kind == ProjectionKind::CountSketch) {
    // One bucket and one sign per source row; O(nnz) streaming pass.
    std::vector<std::size_t> bucket(a.n_rows());
    std::vector<double> sign(a.n_rows());
    const SeededHash hs{derive_seed(seed, detail::kSignStream)};
    const std::uint64_t bseed = derive_seed(seed, detail::kBucketStream);
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
      bucket[i] = static_cast<std::size_t>(prf64(bseed, i) % k);
      sign[i] = rademacher(hs, i);
    }
    s.data = countsketch_apply(a, bucket, sign, k);
    return s;
  }

  // Dense kinds: accumulate (Pi A)^T column-by-column of Pi so the inner
  // loops stay unit-stride, then transpose once.
  DenseMatrix acc(a.n_cols(), k);
  std::vector<double> pi;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const auto row = a.row(i);
    if (row.empty()) continue;
    detail::projection_column(kind, seed, k, i, pi);
    for (const auto& e : row) {
      double* dst = acc.row_data(e.col);
      const double v = e.value;
      for (std::size_t r = 0; r < k; ++r) dst[r] += v * pi[r];
    }
  }
  s.data = DenseMatrix(k, a.n_cols());
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < a.n_cols(); ++j) s.data(r, j) = acc(j, r);
  return s;
}

// (Pi A)^T (Pi B); both sketches must come from the same projection.
inline DenseMatrix linear_estimate(const LinearSketch& a, const LinearSketch& b) {
  if (a.seed != b.seed) throw coordination_error("linear_estimate: seeds differ");
  if (a.kind != b.kind) throw coordination_error("linear_estimate: projection kinds differ");
  if (a.k != b.k) throw coordination_error("linear_estimate: sketch depths differ");
  if (a.n_rows != b.n_rows) throw dimension_error("linear_estimate: source row counts differ");

  const std::size_t d = a.data.n_cols();
  const std::size_t m = b.data.n_cols();
  DenseMatrix w(d, m);
  for (std::size_t r = 0; r < a.k; ++r) {
    const double* ra = a.data.row_data(r);
    const double* rb = b.data.row_data(r);
    for (std::size_t x = 0; x < d; ++x) {
      double* out = w.row_data(x);
      const double v = ra[x];
      if (v == 0.0) continue;
      for (std::size_t y = 0; y < m; ++y) out[y] += v * rb[y];
    }
  }
  return w;
}

inline std::size_t linear_items(const LinearSketch& s) { return s.k * s.data.n_cols(); }

}  // namespace matsketch
