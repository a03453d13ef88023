#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/linalg.hpp"
#include "matsketch/matrix.hpp"
#include "matsketch/sampling.hpp"

namespace matsketch {

// Statistical leverage of every row plus the numerical rank of A. Scores of
// nonzero rows are strictly positive and sum to rank(A).
struct LeverageScores {
  std::vector<double> scores;
  std::size_t rank = 0;
};

// l_i = A_i (A^T A)^+ A_i^T, evaluated through the Gram eigendecomposition as
// sum_j (A_i v_j)^2 / lambda_j, which keeps every score non-negative.
inline LeverageScores leverage_scores(const SparseMatrix& a, double rel_cutoff = kPinvRelCutoff) {
  const DenseMatrix gram = exact_product(a, a);
  const SymEig e = sym_eig(gram);
  const std::size_t d = a.n_cols();

  double lmax = 0.0;
  for (double l : e.values) lmax = std::max(lmax, l);

  LeverageScores out;
  out.scores.assign(a.n_rows(), 0.0);
  if (lmax <= 0.0) return out;

  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < d; ++j)
    if (e.values[j] > rel_cutoff * lmax) live.push_back(j);
  out.rank = live.size();

  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const auto row = a.row(i);
    if (row.empty()) continue;
    double li = 0.0;
    for (std::size_t j : live) {
      double dot = 0.0;
      for (const auto& en : row) dot += en.value * e.vectors(en.col, j);
      li += dot * dot / e.values[j];
    }
    out.scores[i] = li;
  }
  return out;
}

enum class GramMode : std::uint8_t { Exact = 0, SingleSketch = 1 };

// Everything needed to solve min_x ||Ax - b|| from samples: a leverage-score
// priority sample of A, the scores of the sampled rows, and either the exact
// Gram A^T A or a Gram assembled from the same sample (rows scaled by
// 1/sqrt(p_i) so S^T S A^T A is unbiased).
struct RegressionSketch {
  SampleSketch sample;
  std::vector<double> sampled_scores;
  GramMode gram_mode = GramMode::Exact;
  DenseMatrix gram;                // Exact: d x d; SingleSketch: z x d scaled rows
  std::vector<double> row_scales;  // SingleSketch only: 1/sqrt(p_i) per sampled row
};

inline RegressionSketch sketch_matrix_for_regression(const SparseMatrix& a, std::size_t k,
                                                     std::uint64_t seed, GramMode mode,
                                                     const LeverageScores* precomputed = nullptr) {
  const LeverageScores lev = precomputed ? *precomputed : leverage_scores(a);
  if (lev.scores.size() != a.n_rows())
    throw dimension_error("leverage score vector length must equal n_rows");

  RegressionSketch rs;
  rs.sample = priority_sample(a, k, seed, lev.scores);
  rs.gram_mode = mode;
  rs.sampled_scores.reserve(rs.sample.indices.size());
  for (std::uint64_t i : rs.sample.indices) rs.sampled_scores.push_back(lev.scores[i]);

  if (mode == GramMode::Exact) {
    rs.gram = exact_product(a, a);
    return rs;
  }

  const std::size_t z = rs.sample.indices.size();
  rs.gram = DenseMatrix(z, a.n_cols());
  rs.row_scales.reserve(z);
  for (std::size_t r = 0; r < z; ++r) {
    const double p = std::min(1.0, rs.sampled_scores[r] * rs.sample.tau);
    const double scale = 1.0 / std::sqrt(p);
    rs.row_scales.push_back(scale);
    for (const auto& e : rs.sample.rows[r]) rs.gram(r, e.col) = scale * e.value;
  }
  return rs;
}

// Squared-entry priority sample of a right-hand side (single column).
inline SampleSketch sketch_vector_for_regression(const SparseMatrix& b, std::size_t k,
                                                 std::uint64_t seed) {
  if (b.n_cols() != 1) throw dimension_error("right-hand side must have exactly one column");
  return priority_sample(b, k, seed);
}

// x = G^+ W with W = sum over common sampled rows of A_i b_i / min(1,
// l_i tau_A, b_i^2 tau_b). Coordination: both sketches share the seed, the
// matrix side is leverage-weighted, the vector side squared-entry weighted.
inline std::vector<double> solve_regression(const RegressionSketch& ra, const SampleSketch& sb,
                                            double rel_cutoff = kPinvRelCutoff) {
  const SampleSketch& sa = ra.sample;
  if (sa.seed != sb.seed) throw coordination_error("solve_regression: seeds differ");
  if (sa.kind != sb.kind) throw coordination_error("solve_regression: sampler kinds differ");
  if (sa.weight_mode != WeightMode::Leverage)
    throw coordination_error("solve_regression: matrix sketch must be leverage-weighted");
  if (sb.weight_mode != WeightMode::SquaredRowNorm)
    throw coordination_error("solve_regression: vector sketch must be norm-weighted");
  if (sb.n_cols != 1) throw dimension_error("solve_regression: rhs sketch must be a column");
  if (sa.n_rows != sb.n_rows) throw dimension_error("solve_regression: source row counts differ");

  const std::size_t d = sa.n_cols;
  std::vector<double> w(d, 0.0);
  for (const auto& c : intersect(sa, sb)) {
    const double li = ra.sampled_scores[c.pos_a];
    const double bv = sb.rows[c.pos_b].front().value;
    const double denom = std::min({1.0, li * sa.tau, bv * bv * sb.tau});
    const double scale = bv / denom;
    for (const auto& e : sa.rows[c.pos_a]) w[e.col] += scale * e.value;
  }

  DenseMatrix g(d, d);
  if (ra.gram_mode == GramMode::Exact) {
    g = ra.gram;
  } else {
    for (std::size_t r = 0; r < ra.gram.n_rows(); ++r) {
      const double* row = ra.gram.row_data(r);
      for (std::size_t x = 0; x < d; ++x) {
        if (row[x] == 0.0) continue;
        double* out = g.row_data(x);
        for (std::size_t y = 0; y < d; ++y) out[y] += row[x] * row[y];
      }
    }
  }
  return pinv_apply(sym_eig(g), w, rel_cutoff);
}

// ||Ax - b||^2 for a single-column b.
inline double regression_residual(const SparseMatrix& a, const SparseMatrix& b,
                                  std::span<const double> x) {
  if (b.n_cols() != 1) throw dimension_error("right-hand side must have exactly one column");
  if (a.n_rows() != b.n_rows()) throw dimension_error("row counts differ");
  if (x.size() != a.n_cols()) throw dimension_error("solution length must equal n_cols");
  double s = 0.0;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    double ri = 0.0;
    for (const auto& e : a.row(i)) ri += e.value * x[e.col];
    const auto rb = b.row(i);
    if (!rb.empty()) ri -= rb.front().value;
    s += ri * ri;
  }
  return s;
}

// Reference solution x* = (A^T A)^+ A^T b.
inline std::vector<double> exact_least_squares(const SparseMatrix& a, const SparseMatrix& b,
                                               double rel_cutoff = kPinvRelCutoff) {
  if (b.n_cols() != 1) throw dimension_error("right-hand side must have exactly one column");
  if (a.n_rows() != b.n_rows()) throw dimension_error("row counts differ");
  const DenseMatrix rhs = exact_product(a, b);  // d x 1
  std::vector<double> y(a.n_cols());
  for (std::size_t j = 0; j < a.n_cols(); ++j) y[j] = rhs(j, 0);
  return pinv_apply(sym_eig(exact_product(a, a)), y, rel_cutoff);
}

}  // namespace matsketch
