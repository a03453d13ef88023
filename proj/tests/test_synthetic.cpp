#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "matsketch/regression.hpp"
#include "matsketch/synthetic.hpp"
#include "test_support.hpp"

using namespace matsketch;

TEST_CASE("generation is deterministic for a fixed parameter set") {
  SynthSpec spec;
  spec.n = 50;
  spec.d = 8;
  spec.m = 6;
  spec.sparsity = 0.3;
  spec.seed = 321;
  const auto [a1, b1] = gen_synthetic(spec);
  const auto [a2, b2] = gen_synthetic(spec);
  CHECK(to_dense(a1) == to_dense(a2));
  CHECK(to_dense(b1) == to_dense(b2));
  spec.seed = 322;
  const auto [a3, b3] = gen_synthetic(spec);
  CHECK_FALSE(to_dense(a1) == to_dense(a3));
}

TEST_CASE("sparsity keeps an exact count of nonzero positions") {
  SynthSpec spec;
  spec.n = 100;
  spec.d = 40;
  spec.m = 25;
  spec.sparsity = 0.1;
  spec.seed = 17;
  const auto [a, b] = gen_synthetic(spec);
  CHECK(a.nnz() == 400);   // round(0.1 * 100 * 40)
  CHECK(b.nnz() == 250);   // round(0.1 * 100 * 25)
  CHECK(a.n_rows() == 100);
  CHECK(a.n_cols() == 40);
  CHECK(b.n_cols() == 25);
}

TEST_CASE("flagged outlier positions are about ten times larger at the 90th percentile") {
  std::vector<std::uint8_t> mask;
  const SparseMatrix a =
      detail::gen_dense_matrix(500, 40, 1.0, 0.1, 10.0, derive_seed(4242, detail::kRoleA), &mask);
  std::vector<double> flagged, unflagged;
  const DenseMatrix dense = to_dense(a);
  for (std::size_t p = 0; p < 500 * 40; ++p) {
    const double v = std::abs(dense.data()[p]);
    (mask[p] ? flagged : unflagged).push_back(v);
  }
  REQUIRE(flagged.size() == 2000);  // exact count
  const auto q90 = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(0.9 * v.size())];
  };
  const double ratio = q90(flagged) / q90(unflagged);
  CHECK(ratio > 8.0);
  CHECK(ratio < 12.0);
}

TEST_CASE("regression instance satisfies b = A x_true exactly when noise free") {
  const RegressionInstance inst = gen_regression_instance(40, 6, 0.5, 0.0, 99);
  for (std::size_t i = 0; i < 40; ++i) {
    double v = 0.0;
    for (const auto& e : inst.a.row(i)) v += e.value * inst.x_true[e.col];
    const auto rb = inst.b.row(i);
    const double bv = rb.empty() ? 0.0 : rb.front().value;
    CHECK(bv == v);
  }
}

TEST_CASE("least-squares residual carries the expected share of noise energy") {
  const std::size_t n = 2000, d = 10;
  const double sigma = 2.0;
  double ratio_sum = 0.0;
  const int reps = 3;
  for (int rep = 0; rep < reps; ++rep) {
    const RegressionInstance inst = gen_regression_instance(n, d, 0.3, sigma, 5000 + rep);
    const std::vector<double> x_star = exact_least_squares(inst.a, inst.b);
    const double resid = regression_residual(inst.a, inst.b, x_star);
    const double expected = static_cast<double>(n - d) * sigma * sigma;
    ratio_sum += resid / expected;
  }
  CHECK(ratio_sum / reps > 0.8);
  CHECK(ratio_sum / reps < 1.2);
}

TEST_CASE("product_error is zero for the exact product and scales as expected") {
  SynthSpec spec;
  spec.n = 30;
  spec.d = 5;
  spec.m = 4;
  spec.seed = 8;
  const auto [a, b] = gen_synthetic(spec);
  const DenseMatrix exact = exact_product(a, b);
  CHECK(product_error(exact, a, b) == 0.0);

  DenseMatrix off = exact;
  off(0, 0) += 3.0;
  const double norm_product = std::sqrt(frob_sq_norm(a)) * std::sqrt(frob_sq_norm(b));
  CHECK(product_error(off, a, b) == doctest::Approx(3.0 / norm_product).epsilon(1e-12));
}

TEST_CASE("generator validates its parameters") {
  SynthSpec spec;
  spec.n = 10;
  spec.d = 5;
  spec.m = 5;
  spec.sparsity = 0.0;
  CHECK_THROWS_AS(gen_synthetic(spec), parameter_error);
  spec.sparsity = 1.5;
  CHECK_THROWS_AS(gen_synthetic(spec), parameter_error);
  spec.sparsity = 1.0;
  spec.outlier_scale = 0.5;
  CHECK_THROWS_AS(gen_synthetic(spec), parameter_error);

  CHECK_THROWS_AS(gen_regression_instance(5, 5, 1.0, 1.0, 0), parameter_error);
  CHECK_THROWS_AS(gen_regression_instance(10, 5, 1.0, -1.0, 0), parameter_error);
}
