#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/matrix.hpp"
#include "matsketch/prf.hpp"

namespace matsketch {

enum class SampleKind : std::uint8_t { Priority = 0, Threshold = 1 };

// What the sampling weights were: squared row norms for product estimation,
// externally supplied leverage scores for regression.
enum class WeightMode : std::uint8_t { SquaredRowNorm = 0, Leverage = 1 };

enum class ItemCounting : std::uint8_t { SparsePairs = 0, DenseRows = 1 };

// Coordinated row sample of one matrix. Two sketches taken with the same seed
// share the hash h(i), so their stored row sets overlap where both weights are
// large; that overlap is what the product estimator consumes.
//
// indices are strictly increasing; every stored row is nonzero; tau is the
// inclusion threshold (+inf when the sampler kept every candidate row).
struct SampleSketch {
  SampleKind kind = SampleKind::Priority;
  WeightMode weight_mode = WeightMode::SquaredRowNorm;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint64_t> indices;
  std::vector<std::vector<Entry>> rows;
  double tau = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::vector<Entry> copy_row(const SparseMatrix& a, std::size_t i) {
  const auto r = a.row(i);
  return std::vector<Entry>(r.begin(), r.end());
}

inline void check_weights(const SparseMatrix& a, std::span<const double> weights) {
  if (weights.empty()) return;
  if (weights.size() != a.n_rows()) throw dimension_error("weight vector length must equal n_rows");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw parameter_error("sampling weights must be non-negative");
    if (weights[i] == 0.0 && a.row_nnz(i) > 0)
      throw parameter_error("zero weight on a nonzero row");
  }
}

}  // namespace detail

// Priority sample: rank every nonzero row by h(i) / w_i and keep the k
// smallest; tau is the (k+1)-st smallest rank, or +inf when there are at most
// k candidates. Rank ties break toward the smaller index. Weights default to
// squared row norms; a full-length override (e.g. leverage scores) may be
// supplied.
inline SampleSketch priority_sample(const SparseMatrix& a, std::size_t k, std::uint64_t seed,
                                    std::span<const double> weights = {}) {
  if (k == 0) throw parameter_error("k must be positive");
  detail::check_weights(a, weights);

  const SeededHash h{seed};
  std::vector<std::pair<double, std::uint64_t>> ranks;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    if (a.row_nnz(i) == 0) continue;
    const double w = weights.empty() ? row_sq_norm(a, i) : weights[i];
    ranks.emplace_back(h.unit(i) / w, static_cast<std::uint64_t>(i));
  }

  SampleSketch s;
  s.kind = SampleKind::Priority;
  s.weight_mode = weights.empty() ? WeightMode::SquaredRowNorm : WeightMode::Leverage;
  s.k = k;
  s.seed = seed;
  s.n_rows = a.n_rows();
  s.n_cols = a.n_cols();

  if (ranks.size() > k) {
    // (k+1)-st smallest rank becomes tau; the k smaller ones are kept.
    std::nth_element(ranks.begin(), ranks.begin() + k, ranks.end());
    s.tau = ranks[k].first;
    ranks.resize(k);
    std::sort(ranks.begin(), ranks.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
  } else {
    std::sort(ranks.begin(), ranks.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
  }

  s.indices.reserve(ranks.size());
  s.rows.reserve(ranks.size());
  for (const auto& [rank, i] : ranks) {
    s.indices.push_back(i);
    s.rows.push_back(detail::copy_row(a, i));
  }
  return s;
}

// Threshold sample: tau = k / ||A||_F^2 fixed up front; row i is kept iff
// h(i) <= tau * ||A_i||^2. The sample size is random with mean at most k.
inline SampleSketch threshold_sample(const SparseMatrix& a, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw parameter_error("k must be positive");
  const double frob = frob_sq_norm(a);
  if (frob == 0.0) throw parameter_error("threshold_sample: matrix has no nonzero entries");

  SampleSketch s;
  s.kind = SampleKind::Threshold;
  s.weight_mode = WeightMode::SquaredRowNorm;
  s.k = k;
  s.seed = seed;
  s.n_rows = a.n_rows();
  s.n_cols = a.n_cols();
  s.tau = static_cast<double>(k) / frob;

  const SeededHash h{seed};
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const double w = row_sq_norm(a, i);
    if (w == 0.0) continue;
    if (h.unit(i) <= s.tau * w) {
      s.indices.push_back(i);
      s.rows.push_back(detail::copy_row(a, i));
    }
  }
  return s;
}

struct CommonRow {
  std::uint64_t index = 0;
  std::size_t pos_a = 0;
  std::size_t pos_b = 0;
};

// Merge-join of two sorted index lists.
inline std::vector<CommonRow> intersect(const SampleSketch& a, const SampleSketch& b) {
  std::vector<CommonRow> out;
  std::size_t ia = 0, ib = 0;
  while (ia < a.indices.size() && ib < b.indices.size()) {
    if (a.indices[ia] < b.indices[ib]) {
      ++ia;
    } else if (a.indices[ia] > b.indices[ib]) {
      ++ib;
    } else {
      out.push_back(CommonRow{a.indices[ia], ia, ib});
      ++ia;
      ++ib;
    }
  }
  return out;
}

namespace detail {

inline double sq_norm(std::span<const Entry> row) {
  double s = 0.0;
  for (const auto& e : row) s += e.value * e.value;
  return s;
}

}  // namespace detail

// Unbiased estimate of A^T B from two coordinated sketches: each common row's
// outer product is divided by its joint inclusion probability
// min(1, w_a * tau_a, w_b * tau_b).
inline DenseMatrix estimate_product(const SampleSketch& a, const SampleSketch& b) {
  if (a.seed != b.seed) throw coordination_error("estimate_product: seeds differ");
  if (a.kind != b.kind) throw coordination_error("estimate_product: sampler kinds differ");
  if (a.weight_mode != WeightMode::SquaredRowNorm || b.weight_mode != WeightMode::SquaredRowNorm)
    throw coordination_error("estimate_product: requires squared-row-norm weighted sketches");
  if (a.n_rows != b.n_rows) throw dimension_error("estimate_product: source row counts differ");

  DenseMatrix w(a.n_cols, b.n_cols);
  for (const auto& c : intersect(a, b)) {
    const auto& ra = a.rows[c.pos_a];
    const auto& rb = b.rows[c.pos_b];
    const double pa = detail::sq_norm(ra) * a.tau;
    const double pb = detail::sq_norm(rb) * b.tau;
    const double scale = 1.0 / std::min({1.0, pa, pb});
    for (const auto& ea : ra) {
      double* out = w.row_data(ea.col);
      const double va = ea.value * scale;
      for (const auto& eb : rb) out[eb.col] += va * eb.value;
    }
  }
  return w;
}

// Storage cost in items: every stored index, every tau, and either one item
// per stored (column, value) pair or n_cols items per row when the rows would
// be serialized densely.
inline std::size_t sketch_items(const SampleSketch& s, ItemCounting counting) {
  std::size_t items = s.indices.size() + 1;  // indices + tau
  if (counting == ItemCounting::SparsePairs) {
    for (const auto& r : s.rows) items += 2 * r.size();
  } else {
    items += s.indices.size() * s.n_cols;
  }
  return items;
}

// Calibration helper for budgeted experiments: the largest k whose realized
// sketch for this seed fits within items_cap, charging min(SparsePairs,
// DenseRows) for the rows plus optional per-row / fixed surcharges (leverage
// scores, Gram storage). Deterministic; does not build the sketch, but uses
// the samplers' own membership arithmetic so the realized sketch at the
// returned k never exceeds the cap.
//
// Returns 0 when even k = 1 does not fit.
inline std::size_t max_k_within_items(const SparseMatrix& a, SampleKind kind, std::uint64_t seed,
                                      std::size_t items_cap, std::span<const double> weights = {},
                                      std::size_t extra_per_row = 0, std::size_t extra_fixed = 0) {
  detail::check_weights(a, weights);
  const SeededHash h{seed};
  const double frob = frob_sq_norm(a);

  struct Cand {
    double rank;
    std::uint64_t index;
    double hv;
    double w;
    std::size_t nnz;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const std::size_t nz = a.row_nnz(i);
    if (nz == 0) continue;
    const double w = weights.empty() ? row_sq_norm(a, i) : weights[i];
    const double hv = h.unit(i);
    cands.push_back(Cand{hv / w, static_cast<std::uint64_t>(i), hv, w, nz});
  }
  // Join order: rank with index tie-break, matching the priority selection.
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    return x.rank != y.rank ? x.rank < y.rank : x.index < y.index;
  });

  const auto items_with = [&](std::size_t j, std::size_t pair_sum) {
    const std::size_t row_items = std::min(2 * pair_sum, j * a.n_cols());
    return 1 + j + row_items + j * extra_per_row + extra_fixed;
  };

  std::size_t pair_sum = 0;
  std::size_t best_j = 0;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    pair_sum += cands[j].nnz;
    if (items_with(j + 1, pair_sum) > items_cap) break;
    best_j = j + 1;
  }

  if (kind == SampleKind::Priority) {
    // Priority stores exactly min(k, candidates) rows in join order.
    return best_j;
  }

  // Threshold membership is h <= (k / ||A||_F^2) * w; joins(c, k) and the
  // realized item count below evaluate exactly that expression.
  const auto joins = [&](const Cand& c, std::size_t k) {
    return c.hv <= (static_cast<double>(k) / frob) * c.w;
  };
  const auto join_k = [&](const Cand& c) {
    std::size_t lo = 1, hi = 1;
    while (!joins(c, hi)) {
      lo = hi + 1;
      hi *= 2;
    }
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (joins(c, mid)) hi = mid;
      else lo = mid + 1;
    }
    return lo;
  };
  const auto realized_items = [&](std::size_t k) {
    std::size_t j = 0, pairs = 0;
    for (const auto& c : cands)
      if (joins(c, k)) {
        ++j;
        pairs += c.nnz;
      }
    return items_with(j, pairs);
  };

  std::size_t k = 0;
  if (best_j == cands.size()) {
    k = cands.empty() ? 1 : std::max<std::size_t>(1, join_k(cands.back()));
  } else {
    const std::size_t next = join_k(cands[best_j]);
    if (next <= 1) return 0;
    k = next - 1;
  }
  while (k > 0 && realized_items(k) > items_cap) --k;
  return k;
}

}  // namespace matsketch
