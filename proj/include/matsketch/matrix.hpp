#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matsketch/errors.hpp"

namespace matsketch {

struct Entry {
  std::uint32_t col = 0;
  double value = 0.0;
};

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

// Row-major sparse matrix in CSR form. Invariants, enforced on construction:
// columns strictly increasing within a row, no stored zeros, all indices in
// range. Immutable after construction.
class SparseMatrix {
 public:
  SparseMatrix() : SparseMatrix(0, 0) {}

  SparseMatrix(std::size_t n_rows, std::size_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {
    check_cols_representable();
    offsets_.assign(n_rows + 1, 0);
  }

  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::vector<Entry>> rows)
      : n_rows_(n_rows), n_cols_(n_cols) {
    check_cols_representable();
    if (rows.size() != n_rows) throw dimension_error("row list does not match n_rows");
    offsets_.reserve(n_rows + 1);
    offsets_.push_back(0);
    for (auto& r : rows) {
      std::stable_sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
      std::size_t w = entries_.size();
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j].col >= n_cols_) throw dimension_error("column index out of range");
        if (entries_.size() > w && entries_.back().col == r[j].col)
          entries_.back().value += r[j].value;
        else
          entries_.push_back(r[j]);
      }
      // Drop explicit zeros, including duplicate pairs that cancel.
      std::size_t kept = w;
      for (std::size_t j = w; j < entries_.size(); ++j)
        if (entries_[j].value != 0.0) entries_[kept++] = entries_[j];
      entries_.resize(kept);
      offsets_.push_back(entries_.size());
    }
  }

  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::span<const Triplet> triplets) {
    std::vector<std::vector<Entry>> rows(n_rows);
    for (const auto& t : triplets) {
      if (t.row >= n_rows) throw dimension_error("row index out of range");
      if (t.col >= n_cols) throw dimension_error("column index out of range");
      rows[t.row].push_back(Entry{static_cast<std::uint32_t>(t.col), t.value});
    }
    return SparseMatrix(n_rows, n_cols, std::move(rows));
  }

  // values is row-major n_rows x n_cols; zeros are not stored.
  static SparseMatrix from_dense(std::size_t n_rows, std::size_t n_cols,
                                 std::span<const double> values) {
    if (values.size() != n_rows * n_cols) throw dimension_error("dense buffer size mismatch");
    std::vector<std::vector<Entry>> rows(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_cols; ++j) {
        const double v = values[i * n_cols + j];
        if (v != 0.0) rows[i].push_back(Entry{static_cast<std::uint32_t>(j), v});
      }
    return SparseMatrix(n_rows, n_cols, std::move(rows));
  }

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }
  std::size_t nnz() const { return entries_.size(); }

  std::span<const Entry> row(std::size_t i) const {
    if (i >= n_rows_) throw dimension_error("row index out of range");
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  std::size_t row_nnz(std::size_t i) const { return row(i).size(); }

 private:
  void check_cols_representable() const {
    if (n_cols_ > 0xFFFFFFFFull) throw parameter_error("n_cols exceeds 2^32 - 1");
  }

  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() : DenseMatrix(0, 0) {}
  DenseMatrix(std::size_t n_rows, std::size_t n_cols)
      : n_rows_(n_rows), n_cols_(n_cols), v_(n_rows * n_cols, 0.0) {}

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }

  double& operator()(std::size_t i, std::size_t j) { return v_[i * n_cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * n_cols_ + j]; }

  double* row_data(std::size_t i) { return v_.data() + i * n_cols_; }
  const double* row_data(std::size_t i) const { return v_.data() + i * n_cols_; }

  std::span<const double> data() const { return v_; }
  std::span<double> data() { return v_; }

  bool operator==(const DenseMatrix& o) const {
    return n_rows_ == o.n_rows_ && n_cols_ == o.n_cols_ && v_ == o.v_;
  }

 private:
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<double> v_;
};

inline double row_sq_norm(const SparseMatrix& a, std::size_t i) {
  double s = 0.0;
  for (const auto& e : a.row(i)) s += e.value * e.value;
  return s;
}

inline double frob_sq_norm(const SparseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n_rows(); ++i) s += row_sq_norm(a, i);
  return s;
}

inline double frob_sq_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

// A^T B as a dense n_cols(A) x n_cols(B) matrix; the exact reference that
// sketched estimates approximate.
inline DenseMatrix exact_product(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.n_rows() != b.n_rows()) throw dimension_error("exact_product: row counts differ");
  DenseMatrix w(a.n_cols(), b.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    for (const auto& ea : ra) {
      double* out = w.row_data(ea.col);
      for (const auto& eb : rb) out[eb.col] += ea.value * eb.value;
    }
  }
  return w;
}

inline DenseMatrix to_dense(const SparseMatrix& a) {
  DenseMatrix d(a.n_rows(), a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i)
    for (const auto& e : a.row(i)) d(i, e.col) = e.value;
  return d;
}

}  // namespace matsketch
