#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "matsketch/linalg.hpp"
#include "test_support.hpp"

using namespace matsketch;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd m(a.n_rows(), a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i)
    for (std::size_t j = 0; j < a.n_cols(); ++j) m(i, j) = a(i, j);
  return m;
}

// Random PSD matrix R^T R with optional rank deficiency.
DenseMatrix random_psd(std::mt19937_64& rng, std::size_t d, std::size_t inner) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd r(inner, d);
  for (std::size_t i = 0; i < inner; ++i)
    for (std::size_t j = 0; j < d; ++j) r(i, j) = normal(rng);
  const Eigen::MatrixXd s = r.transpose() * r;
  DenseMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = s(i, j);
  return out;
}

}  // namespace

TEST_CASE("sym_eig matches Eigen eigenvalues and reconstructs the input") {
  std::mt19937_64 rng(4321);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 2 + rep % 11;
    const DenseMatrix s = random_psd(rng, d, d + 2);
    const SymEig e = sym_eig(s);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(s));
    std::vector<double> mine = e.values;
    std::sort(mine.begin(), mine.end());
    const double scale = std::max(1.0, std::abs(ref.eigenvalues()(d - 1)));
    for (std::size_t j = 0; j < d; ++j)
      CHECK(mine[j] == doctest::Approx(ref.eigenvalues()(j)).epsilon(1e-9).scale(scale));

    // V diag(values) V^T == S
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        double v = 0.0;
        for (std::size_t l = 0; l < d; ++l)
          v += e.vectors(i, l) * e.values[l] * e.vectors(j, l);
        CHECK(v == doctest::Approx(s(i, j)).epsilon(1e-9).scale(scale));
      }
  }
}

TEST_CASE("psd_pinv matches Eigen and detects rank") {
  std::mt19937_64 rng(8765);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 3 + rep % 8;
    const std::size_t inner = rep % 3 == 0 ? d - 2 : d + 3;  // some rank-deficient
    const DenseMatrix s = random_psd(rng, d, inner);

    std::size_t rank = 0;
    const DenseMatrix p = psd_pinv(s, kPinvRelCutoff, &rank);
    CHECK(rank == std::min(inner, d));

    const Eigen::MatrixXd es = to_eigen(s);
    const Eigen::MatrixXd ref = es.completeOrthogonalDecomposition().pseudoInverse();
    const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        CHECK(p(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-7).scale(scale));

    // Moore-Penrose identity S S^+ S = S.
    const Eigen::MatrixXd ep = to_eigen(p);
    const Eigen::MatrixXd sps = es * ep * es;
    const double sscale = std::max(1.0, es.cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        CHECK(sps(i, j) == doctest::Approx(es(i, j)).epsilon(1e-8).scale(sscale));
  }
}

TEST_CASE("pinv_apply equals explicit pseudoinverse application") {
  std::mt19937_64 rng(1357);
  const std::size_t d = 7;
  const DenseMatrix s = random_psd(rng, d, d - 1);
  const SymEig e = sym_eig(s);
  std::normal_distribution<double> normal;
  std::vector<double> y(d);
  for (auto& v : y) v = normal(rng);

  const std::vector<double> x = pinv_apply(e, y);
  const DenseMatrix p = psd_pinv(s);
  for (std::size_t i = 0; i < d; ++i) {
    double expect = 0.0;
    for (std::size_t j = 0; j < d; ++j) expect += p(i, j) * y[j];
    CHECK(x[i] == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("sym_eig rejects non-square input and zero matrices invert to zero") {
  CHECK_THROWS_AS(sym_eig(DenseMatrix(2, 3)), dimension_error);
  std::size_t rank = 99;
  const DenseMatrix p = psd_pinv(DenseMatrix(4, 4), kPinvRelCutoff, &rank);
  CHECK(rank == 0);
  for (double v : p.data()) CHECK(v == 0.0);
}
