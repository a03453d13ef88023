#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/matrix.hpp"

namespace matsketch {

// Eigendecomposition S = V diag(values) V^T of a symmetric matrix;
// eigenvector j is column j of `vectors`.
struct SymEig {
  std::vector<double> values;
  DenseMatrix vectors;
};

// Cyclic Jacobi rotations; adequate for the small Gram matrices (d x d) this
// library inverts. Converges to machine precision in a handful of sweeps.
inline SymEig sym_eig(const DenseMatrix& s) {
  if (s.n_rows() != s.n_cols()) throw dimension_error("sym_eig: matrix must be square");
  const std::size_t d = s.n_rows();
  DenseMatrix a = s;
  DenseMatrix v(d, d);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (off <= 1e-30 * frob || off == 0.0) break;

    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t j = 0; j < d; ++j) {
          const double ajp = a(j, p), ajq = a(j, q);
          a(j, p) = c * ajp - sn * ajq;
          a(j, q) = sn * ajp + c * ajq;
        }
        for (std::size_t j = 0; j < d; ++j) {
          const double apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - sn * aqj;
          a(q, j) = sn * apj + c * aqj;
        }
        for (std::size_t j = 0; j < d; ++j) {
          const double vjp = v(j, p), vjq = v(j, q);
          v(j, p) = c * vjp - sn * vjq;
          v(j, q) = sn * vjp + c * vjq;
        }
      }
    }
  }

  SymEig e;
  e.values.resize(d);
  for (std::size_t i = 0; i < d; ++i) e.values[i] = a(i, i);
  e.vectors = std::move(v);
  return e;
}

// Default spectral cutoff: eigenvalues below max_eig * 1e-10 count as zero.
inline constexpr double kPinvRelCutoff = 1e-10;

inline std::size_t eig_rank(const SymEig& e, double rel_cutoff = kPinvRelCutoff) {
  double lmax = 0.0;
  for (double l : e.values) lmax = std::max(lmax, l);
  if (lmax <= 0.0) return 0;
  std::size_t r = 0;
  for (double l : e.values)
    if (l > rel_cutoff * lmax) ++r;
  return r;
}

// x = S^+ y from a precomputed eigendecomposition of PSD S.
inline std::vector<double> pinv_apply(const SymEig& e, std::span<const double> y,
                                      double rel_cutoff = kPinvRelCutoff) {
  const std::size_t d = e.values.size();
  if (y.size() != d) throw dimension_error("pinv_apply: vector length mismatch");
  double lmax = 0.0;
  for (double l : e.values) lmax = std::max(lmax, l);
  std::vector<double> x(d, 0.0);
  if (lmax <= 0.0) return x;
  for (std::size_t j = 0; j < d; ++j) {
    if (e.values[j] <= rel_cutoff * lmax) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < d; ++i) proj += e.vectors(i, j) * y[i];
    proj /= e.values[j];
    for (std::size_t i = 0; i < d; ++i) x[i] += proj * e.vectors(i, j);
  }
  return x;
}

// Moore-Penrose pseudoinverse of a PSD matrix.
inline DenseMatrix psd_pinv(const DenseMatrix& s, double rel_cutoff = kPinvRelCutoff,
                            std::size_t* rank_out = nullptr) {
  const SymEig e = sym_eig(s);
  const std::size_t d = e.values.size();
  double lmax = 0.0;
  for (double l : e.values) lmax = std::max(lmax, l);
  DenseMatrix p(d, d);
  std::size_t rank = 0;
  if (lmax > 0.0) {
    for (std::size_t j = 0; j < d; ++j) {
      if (e.values[j] <= rel_cutoff * lmax) continue;
      ++rank;
      const double inv = 1.0 / e.values[j];
      for (std::size_t i = 0; i < d; ++i) {
        const double vij = e.vectors(i, j) * inv;
        for (std::size_t l = 0; l < d; ++l) p(i, l) += vij * e.vectors(l, j);
      }
    }
  }
  if (rank_out) *rank_out = rank;
  return p;
}

}  // namespace matsketch
