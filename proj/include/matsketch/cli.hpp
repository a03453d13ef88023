#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "matsketch/errors.hpp"
#include "matsketch/io.hpp"
#include "matsketch/linear.hpp"
#include "matsketch/regression.hpp"
#include "matsketch/sampling.hpp"
#include "matsketch/sweep.hpp"
#include "matsketch/synthetic.hpp"

namespace matsketch {

namespace detail {

inline MatrixFormat resolve_format(const std::string& path, const std::string& flag) {
  if (flag == "mm") return MatrixFormat::MatrixMarket;
  if (flag == "csv") return MatrixFormat::DenseCsv;
  const std::size_t dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "mtx" || ext == "mm") return MatrixFormat::MatrixMarket;
  if (ext == "csv") return MatrixFormat::DenseCsv;
  throw parameter_error(path + ": cannot infer matrix format; pass --format mm|csv");
}

inline void save_vector_csv(const std::string& path, std::span<const double> x) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error(path + ": cannot open for writing");
  for (double v : x) os << format_double(v) << '\n';
  if (!os) throw io_error(path + ": write failed");
}

inline void save_dense_csv_file(const std::string& path, const DenseMatrix& w) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error(path + ": cannot open for writing");
  save_dense_csv(os, w);
  if (!os) throw io_error(path + ": write failed");
}

inline SweepConfig parse_bench_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error(path + ": cannot open for reading");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error(path + ": " + e.what());
  }
  if (!j.is_object()) throw io_error(path + ": config must be a JSON object");

  static const std::vector<std::string> known = {
      "task",       "n",       "d",       "m",           "sparsity", "outlier_frac",
      "outlier_scale", "data_seed", "noise_sigma", "methods",  "budgets",
      "trials",     "seed",    "measure_time", "metric"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw parameter_error(path + ": unknown config key '" + key + "'");
  }

  SweepConfig cfg;
  try {
    const std::string task = j.value("task", std::string("product"));
    if (task == "product") cfg.task = SweepTask::Product;
    else if (task == "regression") cfg.task = SweepTask::Regression;
    else throw parameter_error(path + ": unknown task '" + task + "'");

    cfg.synth.n = j.value("n", std::size_t{10000});
    cfg.synth.d = j.value("d", std::size_t{100});
    cfg.synth.m = j.value("m", std::size_t{100});
    cfg.synth.sparsity = j.value("sparsity", 1.0);
    cfg.synth.outlier_frac = j.value("outlier_frac", 0.1);
    cfg.synth.outlier_scale = j.value("outlier_scale", 10.0);
    cfg.synth.seed = j.value("data_seed", std::uint64_t{0});
    cfg.noise_sigma = j.value("noise_sigma", 1.0);
    if (!j.contains("methods")) throw parameter_error(path + ": missing 'methods'");
    cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (!j.contains("budgets")) throw parameter_error(path + ": missing 'budgets'");
    cfg.budgets = j.at("budgets").get<std::vector<std::size_t>>();
    cfg.trials = j.value("trials", std::size_t{10});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.measure_time = j.value("measure_time", false);
    const std::string metric = j.value("metric", std::string("additive"));
    if (metric == "additive") cfg.metric = RegressionMetric::Additive;
    else if (metric == "coefficient") cfg.metric = RegressionMetric::Coefficient;
    else throw parameter_error(path + ": unknown metric '" + metric + "'");
  } catch (const nlohmann::json::exception& e) {
    throw parameter_error(path + ": " + e.what());
  }
  return cfg;
}

}  // namespace detail

// Entry point shared by the binary and the tests; args exclude the program
// name. Exit codes: 0 success, 2 usage/parameter, 3 coordination, 4 I/O.
inline int cli_dispatch(std::vector<std::string> args) {
  CLI::App app{"coordinated sampling and linear sketching for matrix products"};
  app.name("matsketch");
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  std::string gen_task = "product";
  SynthSpec spec;
  spec.n = 10000;
  spec.d = 100;
  spec.m = 100;
  double noise_sigma = 1.0;
  std::string out_a, out_b, out_x, gen_format = "mm";
  gen->add_option("--task", gen_task)->check(CLI::IsMember({"product", "regression"}));
  gen->add_option("--n", spec.n, "rows");
  gen->add_option("--d", spec.d, "columns of A");
  gen->add_option("--m", spec.m, "columns of B (product task)");
  gen->add_option("--sparsity", spec.sparsity, "fraction of nonzero positions");
  gen->add_option("--outlier-frac", spec.outlier_frac);
  gen->add_option("--outlier-scale", spec.outlier_scale);
  gen->add_option("--noise-sigma", noise_sigma, "rhs noise (regression task)");
  gen->add_option("--seed", spec.seed);
  gen->add_option("--out-a", out_a)->required();
  gen->add_option("--out-b", out_b)->required();
  gen->add_option("--out-x", out_x, "write the true coefficients (regression task)");
  gen->add_option("--format", gen_format)->check(CLI::IsMember({"mm", "csv"}));
  gen->callback([&] {
    const MatrixFormat fmt =
        gen_format == "mm" ? MatrixFormat::MatrixMarket : MatrixFormat::DenseCsv;
    if (gen_task == "product") {
      const auto [a, b] = gen_synthetic(spec);
      save_matrix(out_a, a, fmt);
      save_matrix(out_b, b, fmt);
    } else {
      const RegressionInstance inst =
          gen_regression_instance(spec.n, spec.d, spec.sparsity, noise_sigma, spec.seed);
      save_matrix(out_a, inst.a, fmt);
      save_matrix(out_b, inst.b, fmt);
      if (!out_x.empty()) detail::save_vector_csv(out_x, inst.x_true);
    }
  });

  // --- sketch ------------------------------------------------------------
  auto* sk = app.add_subcommand("sketch", "sketch a matrix into a sketch file");
  std::string sk_in, sk_out, sk_method, sk_gram = "exact", sk_format = "auto";
  std::size_t sk_k = 0;
  std::uint64_t sk_seed = 0;
  sk->add_option("input", sk_in)->required();
  sk->add_option("output", sk_out)->required();
  sk->add_option("--method", sk_method)
      ->required()
      ->check(CLI::IsMember({"priority", "threshold", "gaussian", "sign", "countsketch",
                             "regression"}));
  sk->add_option("--k", sk_k)->required();
  sk->add_option("--seed", sk_seed);
  sk->add_option("--gram", sk_gram)->check(CLI::IsMember({"exact", "single"}));
  sk->add_option("--format", sk_format)->check(CLI::IsMember({"auto", "mm", "csv"}));
  sk->callback([&] {
    const SparseMatrix a = load_matrix(sk_in, detail::resolve_format(sk_in, sk_format));
    AnySketch sketch;
    if (sk_method == "priority") {
      sketch = priority_sample(a, sk_k, sk_seed);
    } else if (sk_method == "threshold") {
      sketch = threshold_sample(a, sk_k, sk_seed);
    } else if (sk_method == "regression") {
      const GramMode mode = sk_gram == "exact" ? GramMode::Exact : GramMode::SingleSketch;
      sketch = sketch_matrix_for_regression(a, sk_k, sk_seed, mode);
    } else {
      const ProjectionKind kind = sk_method == "gaussian" ? ProjectionKind::Gaussian
                                  : sk_method == "sign"   ? ProjectionKind::Sign
                                                          : ProjectionKind::CountSketch;
      sketch = linear_sketch(a, sk_k, sk_seed, kind);
    }
    save_sketch_file(sk_out, sketch);
  });

  // --- estimate ----------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "estimate A^T B from two sketch files");
  std::string est_a, est_b, est_out, truth_a, truth_b, truth_format = "auto";
  est->add_option("sketch_a", est_a)->required();
  est->add_option("sketch_b", est_b)->required();
  est->add_option("--out", est_out)->required();
  est->add_option("--truth-a", truth_a, "exact A for an error report");
  est->add_option("--truth-b", truth_b, "exact B for an error report");
  est->add_option("--truth-format", truth_format)->check(CLI::IsMember({"auto", "mm", "csv"}));
  est->callback([&] {
    const AnySketch sa = load_sketch_file(est_a);
    const AnySketch sb = load_sketch_file(est_b);
    DenseMatrix w;
    if (std::holds_alternative<SampleSketch>(sa) && std::holds_alternative<SampleSketch>(sb)) {
      w = estimate_product(std::get<SampleSketch>(sa), std::get<SampleSketch>(sb));
    } else if (std::holds_alternative<LinearSketch>(sa) &&
               std::holds_alternative<LinearSketch>(sb)) {
      w = linear_estimate(std::get<LinearSketch>(sa), std::get<LinearSketch>(sb));
    } else {
      throw coordination_error("estimate: sketch classes differ");
    }
    detail::save_dense_csv_file(est_out, w);
    if (truth_a.empty() != truth_b.empty())
      throw parameter_error("estimate: --truth-a and --truth-b must be given together");
    if (!truth_a.empty()) {
      const SparseMatrix a = load_matrix(truth_a, detail::resolve_format(truth_a, truth_format));
      const SparseMatrix b = load_matrix(truth_b, detail::resolve_format(truth_b, truth_format));
      std::cout << "product_error=" << format_double(product_error(w, a, b)) << "\n";
    }
  });

  // --- regress -----------------------------------------------------------
  auto* reg = app.add_subcommand("regress", "solve least squares from sketch files");
  std::string reg_a, reg_b, reg_out, reg_matrix, reg_rhs, reg_format = "auto";
  reg->add_option("sketch_a", reg_a)->required();
  reg->add_option("sketch_b", reg_b)->required();
  reg->add_option("--out", reg_out)->required();
  reg->add_option("--matrix", reg_matrix, "exact A for an error report");
  reg->add_option("--rhs", reg_rhs, "exact b for an error report");
  reg->add_option("--format", reg_format)->check(CLI::IsMember({"auto", "mm", "csv"}));
  reg->callback([&] {
    const AnySketch sa = load_sketch_file(reg_a);
    const AnySketch sb = load_sketch_file(reg_b);
    if (!std::holds_alternative<RegressionSketch>(sa))
      throw coordination_error("regress: first sketch must come from --method regression");
    if (!std::holds_alternative<SampleSketch>(sb))
      throw coordination_error("regress: second sketch must be a sampling sketch of b");
    const std::vector<double> x =
        solve_regression(std::get<RegressionSketch>(sa), std::get<SampleSketch>(sb));
    detail::save_vector_csv(reg_out, x);
    if (reg_matrix.empty() != reg_rhs.empty())
      throw parameter_error("regress: --matrix and --rhs must be given together");
    if (!reg_matrix.empty()) {
      const SparseMatrix a = load_matrix(reg_matrix, detail::resolve_format(reg_matrix, reg_format));
      const SparseMatrix b = load_matrix(reg_rhs, detail::resolve_format(reg_rhs, reg_format));
      const double resid = regression_residual(a, b, x);
      const std::vector<double> x_star = exact_least_squares(a, b);
      const double r_star = regression_residual(a, b, x_star);
      const double b_sq = frob_sq_norm(b);
      double coef = 0.0;
      for (std::size_t i = 0; i < a.n_rows(); ++i) {
        double ri = 0.0;
        for (const auto& e : a.row(i)) ri += e.value * (x[e.col] - x_star[e.col]);
        coef += ri * ri;
      }
      std::cout << "residual_sq=" << format_double(resid) << "\n";
      std::cout << "optimal_residual_sq=" << format_double(r_star) << "\n";
      std::cout << "additive_error=" << format_double((resid - r_star) / b_sq) << "\n";
      std::cout << "coefficient_error=" << format_double(std::sqrt(coef / b_sq)) << "\n";
    }
  });

  // --- bench -------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run a budget sweep from a JSON config");
  std::string bench_config, bench_out;
  bench->add_option("config", bench_config)->required();
  bench->add_option("--out", bench_out)->required();
  bench->callback([&] {
    const SweepConfig cfg = detail::parse_bench_config(bench_config);
    const std::vector<ExperimentRecord> records = run_sweep(cfg);
    std::ofstream os(bench_out, std::ios::binary);
    if (!os) throw io_error(bench_out + ": cannot open for writing");
    write_records_csv(os, records);
    if (!os) throw io_error(bench_out + ": write failed");
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dimension_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const coordination_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace matsketch
