#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "matsketch/io.hpp"
#include "matsketch/synthetic.hpp"
#include "test_support.hpp"

using namespace matsketch;

namespace {

bool same_sparse(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols() || a.nnz() != b.nnz()) return false;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    const auto ra = a.row(i), rb = b.row(i);
    if (ra.size() != rb.size()) return false;
    for (std::size_t j = 0; j < ra.size(); ++j)
      if (ra[j].col != rb[j].col || ra[j].value != rb[j].value) return false;
  }
  return true;
}

bool same_sample(const SampleSketch& a, const SampleSketch& b) {
  const auto tau_equal = std::bit_cast<std::uint64_t>(a.tau) == std::bit_cast<std::uint64_t>(b.tau);
  return a.kind == b.kind && a.weight_mode == b.weight_mode && a.k == b.k && a.seed == b.seed &&
         a.n_rows == b.n_rows && a.n_cols == b.n_cols && tau_equal && a.indices == b.indices &&
         [&] {
           for (std::size_t r = 0; r < a.rows.size(); ++r) {
             if (a.rows[r].size() != b.rows[r].size()) return false;
             for (std::size_t e = 0; e < a.rows[r].size(); ++e)
               if (a.rows[r][e].col != b.rows[r][e].col ||
                   a.rows[r][e].value != b.rows[r][e].value)
                 return false;
           }
           return true;
         }();
}

}  // namespace

TEST_CASE("matrix market round trip preserves every entry bit-exactly") {
  std::mt19937_64 rng(1212);
  const SparseMatrix a = test_support::random_matrix(rng, 17, 9, 0.4);
  std::ostringstream os;
  save_matrix_market(os, a);
  std::istringstream is(os.str());
  const SparseMatrix back = load_matrix_market(is, "test");
  CHECK(same_sparse(a, back));
}

TEST_CASE("matrix market sums duplicates and drops explicit zeros") {
  const std::string text =
      "%%MatrixMarket matrix coordinate real general\n"
      "% a comment line\n"
      "3 3 4\n"
      "1 1 2.5\n"
      "1 1 -1.0\n"
      "2 3 0\n"
      "3 2 7\n";
  std::istringstream is(text);
  const SparseMatrix a = load_matrix_market(is, "inline");
  CHECK(a.n_rows() == 3);
  CHECK(a.nnz() == 2);
  CHECK(a.row(0)[0].value == 1.5);
  CHECK(a.row(1).empty());
  CHECK(a.row(2)[0].col == 1);
}

TEST_CASE("matrix market rejects malformed input with positional diagnostics") {
  const auto load = [](const std::string& text) {
    std::istringstream is(text);
    return load_matrix_market(is, "bad");
  };
  CHECK_THROWS_AS(load("%%MatrixMarket matrix array real general\n1 1\n1.0\n"), io_error);
  CHECK_THROWS_AS(load("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
                  io_error);
  CHECK_THROWS_AS(load("%%MatrixMarket matrix coordinate real general\n2 2 1\n0 1 1.0\n"),
                  io_error);
  CHECK_THROWS_AS(load("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"),
                  io_error);
  CHECK_THROWS_AS(load("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n"),
                  io_error);
  CHECK_THROWS_AS(load(""), io_error);
}

TEST_CASE("dense csv round trip and validation") {
  std::mt19937_64 rng(3434);
  const SparseMatrix a = test_support::random_matrix(rng, 6, 4, 0.7);
  std::ostringstream os;
  save_dense_csv(os, to_dense(a));
  std::istringstream is(os.str());
  const SparseMatrix back = load_dense_csv(is, "test");
  CHECK(same_sparse(a, back));

  std::istringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(load_dense_csv(ragged, "ragged"), io_error);
  std::istringstream junk("1,x\n");
  CHECK_THROWS_AS(load_dense_csv(junk, "junk"), io_error);
  std::istringstream empty("");
  CHECK_THROWS_AS(load_dense_csv(empty, "empty"), io_error);
}

TEST_CASE("sample sketches round trip bit-exactly, including tau = +inf") {
  std::mt19937_64 rng(5656);
  const SparseMatrix a = test_support::random_matrix(rng, 20, 5, 0.6);

  const SampleSketch finite = threshold_sample(a, 4, 88);
  CHECK(std::isfinite(finite.tau));
  std::stringstream buf1;
  save_sketch(buf1, finite);
  const AnySketch r1 = load_sketch(buf1, "buf");
  REQUIRE(std::holds_alternative<SampleSketch>(r1));
  CHECK(same_sample(finite, std::get<SampleSketch>(r1)));

  const SampleSketch saturated = priority_sample(a, 50, 88);
  CHECK(saturated.tau == std::numeric_limits<double>::infinity());
  std::stringstream buf2;
  save_sketch(buf2, saturated);
  const AnySketch r2 = load_sketch(buf2, "buf");
  CHECK(same_sample(saturated, std::get<SampleSketch>(r2)));
}

TEST_CASE("linear and regression sketches round trip") {
  std::mt19937_64 rng(7878);
  const SparseMatrix a = test_support::random_matrix(rng, 18, 4, 0.7);

  const LinearSketch lin = linear_sketch(a, 7, 3, ProjectionKind::Sign);
  std::stringstream buf;
  save_sketch(buf, lin);
  const AnySketch rl = load_sketch(buf, "buf");
  REQUIRE(std::holds_alternative<LinearSketch>(rl));
  const auto& lin2 = std::get<LinearSketch>(rl);
  CHECK(lin2.kind == lin.kind);
  CHECK(lin2.k == lin.k);
  CHECK(lin2.seed == lin.seed);
  CHECK(lin2.n_rows == lin.n_rows);
  CHECK(lin2.data == lin.data);

  for (const GramMode mode : {GramMode::Exact, GramMode::SingleSketch}) {
    const RegressionSketch reg = sketch_matrix_for_regression(a, 6, 5, mode);
    std::stringstream buf2;
    save_sketch(buf2, reg);
    const AnySketch rr = load_sketch(buf2, "buf");
    REQUIRE(std::holds_alternative<RegressionSketch>(rr));
    const auto& reg2 = std::get<RegressionSketch>(rr);
    CHECK(reg2.gram_mode == reg.gram_mode);
    CHECK(same_sample(reg.sample, reg2.sample));
    CHECK(reg2.sampled_scores == reg.sampled_scores);
    CHECK(reg2.gram == reg.gram);
    CHECK(reg2.row_scales == reg.row_scales);
  }
}

TEST_CASE("sketch loader rejects bad magic, version, and truncation") {
  std::mt19937_64 rng(9090);
  const SparseMatrix a = test_support::random_matrix(rng, 8, 3, 0.8);
  std::stringstream buf;
  save_sketch(buf, priority_sample(a, 3, 1));
  const std::string bytes = buf.str();

  std::stringstream bad_magic(std::string("NOTMAGIC") + bytes.substr(8));
  CHECK_THROWS_AS(load_sketch(bad_magic, "m"), io_error);

  std::string vbytes = bytes;
  vbytes[8] = 9;  // version
  std::stringstream bad_version(vbytes);
  CHECK_THROWS_AS(load_sketch(bad_version, "v"), io_error);

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(load_sketch(truncated, "t"), io_error);

  std::stringstream tiny(std::string("MS"));
  CHECK_THROWS_AS(load_sketch(tiny, "tiny"), io_error);
}

TEST_CASE("missing files raise io errors") {
  CHECK_THROWS_AS(load_matrix("/nonexistent/path.mtx", MatrixFormat::MatrixMarket), io_error);
  CHECK_THROWS_AS(load_sketch_file("/nonexistent/path.sk"), io_error);
}
