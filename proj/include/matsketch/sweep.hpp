#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "matsketch/errors.hpp"
#include "matsketch/format.hpp"
#include "matsketch/linear.hpp"
#include "matsketch/matrix.hpp"
#include "matsketch/prf.hpp"
#include "matsketch/regression.hpp"
#include "matsketch/sampling.hpp"
#include "matsketch/synthetic.hpp"

namespace matsketch {

enum class SweepTask : std::uint8_t { Product = 0, Regression = 1 };

enum class RegressionMetric : std::uint8_t {
  Additive = 0,     // (||A x~ - b||^2 - ||A x* - b||^2) / ||b||^2
  Coefficient = 1,  // ||A (x~ - x*)||_2 / ||b||_2
};

// One budget sweep over methods and trials on a single synthetic instance.
// Everything is derived from fixed seeds, so two runs of the same config
// produce identical records. wall_time_s is only populated when measure_time
// is set; it is the one intentionally non-reproducible column.
struct SweepConfig {
  SweepTask task = SweepTask::Product;
  SynthSpec synth;           // synth.seed draws the data; n/d/sparsity reused for regression
  double noise_sigma = 1.0;  // regression task only
  std::vector<std::string> methods;
  std::vector<std::size_t> budgets;
  std::size_t trials = 10;
  std::uint64_t seed = 0;  // base seed; trial t sketches with a derived child
  bool measure_time = false;
  RegressionMetric metric = RegressionMetric::Additive;
};

struct ExperimentRecord {
  std::string method;
  std::size_t budget_items = 0;
  std::size_t trial = 0;
  double error = 0.0;
  double wall_time_s = 0.0;
};

namespace detail {

inline constexpr std::uint64_t kTrialStream = 0x54524941ULL;

// Methods may use up to 5% over the nominal budget; every realized sketch is
// kept within this cap.
inline std::size_t items_cap(std::size_t budget) { return budget + budget / 20; }

inline std::uint64_t trial_seed(std::uint64_t base, std::size_t t) {
  return derive_seed(derive_seed(base, kTrialStream), t);
}

struct MethodSpec {
  bool sampling = false;
  SampleKind sample_kind = SampleKind::Priority;
  ProjectionKind linear_kind = ProjectionKind::Gaussian;
  bool regression = false;
  GramMode gram = GramMode::Exact;
};

inline MethodSpec parse_method(const std::string& name, SweepTask task) {
  MethodSpec m;
  if (name == "priority") {
    m.sampling = true;
    m.sample_kind = SampleKind::Priority;
  } else if (name == "threshold") {
    m.sampling = true;
    m.sample_kind = SampleKind::Threshold;
  } else if (name == "gaussian") {
    m.linear_kind = ProjectionKind::Gaussian;
  } else if (name == "sign") {
    m.linear_kind = ProjectionKind::Sign;
  } else if (name == "countsketch") {
    m.linear_kind = ProjectionKind::CountSketch;
  } else if (name == "regression-exact") {
    m.regression = true;
    m.gram = GramMode::Exact;
  } else if (name == "regression-single") {
    m.regression = true;
    m.gram = GramMode::SingleSketch;
  } else {
    throw parameter_error("unknown method '" + name + "'");
  }
  const bool wants_regression = task == SweepTask::Regression;
  if (m.regression != wants_regression)
    throw parameter_error("method '" + name + "' does not apply to this task");
  return m;
}

class StopWatch {
 public:
  explicit StopWatch(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  double seconds() const {
    if (!enabled_) return 0.0;
    const auto dt = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double>(dt).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

inline void validate_common(const SweepConfig& cfg) {
  if (cfg.methods.empty()) throw parameter_error("no methods given");
  if (cfg.budgets.empty()) throw parameter_error("no budgets given");
  if (cfg.trials == 0) throw parameter_error("trials must be positive");
  for (std::size_t b : cfg.budgets)
    if (b == 0) throw parameter_error("budgets must be positive");
}

inline std::vector<ExperimentRecord> run_product_sweep(const SweepConfig& cfg) {
  auto [a, b] = gen_synthetic(cfg.synth);
  const DenseMatrix exact = exact_product(a, b);
  const double norm_product = std::sqrt(frob_sq_norm(a)) * std::sqrt(frob_sq_norm(b));
  if (norm_product == 0.0) throw parameter_error("degenerate instance: zero matrix");

  std::vector<ExperimentRecord> records;
  for (const auto& name : cfg.methods) {
    const MethodSpec method = parse_method(name, cfg.task);
    for (std::size_t budget : cfg.budgets) {
      const std::size_t cap = items_cap(budget);
      std::size_t k = 0;
      if (method.sampling) {
        // One k per (method, budget): the largest that keeps every trial's
        // realized sketch of both matrices within the cap.
        k = std::numeric_limits<std::size_t>::max();
        for (std::size_t t = 0; t < cfg.trials; ++t) {
          const std::uint64_t ts = trial_seed(cfg.seed, t);
          k = std::min(k, max_k_within_items(a, method.sample_kind, ts, cap));
          k = std::min(k, max_k_within_items(b, method.sample_kind, ts, cap));
        }
      } else {
        k = cap / std::max(a.n_cols(), b.n_cols());
      }
      if (k == 0) throw parameter_error("budget " + format_size(budget) + " too small");

      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t ts = trial_seed(cfg.seed, t);
        const StopWatch watch(cfg.measure_time);
        DenseMatrix w;
        if (method.sampling) {
          const auto sa = method.sample_kind == SampleKind::Priority
                              ? priority_sample(a, k, ts)
                              : threshold_sample(a, k, ts);
          const auto sb = method.sample_kind == SampleKind::Priority
                              ? priority_sample(b, k, ts)
                              : threshold_sample(b, k, ts);
          w = estimate_product(sa, sb);
        } else {
          const auto sa = linear_sketch(a, k, ts, method.linear_kind);
          const auto sb = linear_sketch(b, k, ts, method.linear_kind);
          w = linear_estimate(sa, sb);
        }
        const double err = product_error(w, exact, norm_product);
        records.push_back(ExperimentRecord{name, budget, t, err, watch.seconds()});
      }
    }
  }
  return records;
}

inline std::vector<ExperimentRecord> run_regression_sweep(const SweepConfig& cfg) {
  const RegressionInstance inst = gen_regression_instance(
      cfg.synth.n, cfg.synth.d, cfg.synth.sparsity, cfg.noise_sigma, cfg.synth.seed);
  const LeverageScores lev = leverage_scores(inst.a);
  const std::vector<double> x_star = exact_least_squares(inst.a, inst.b);
  const double r_star = regression_residual(inst.a, inst.b, x_star);
  const double b_sq = frob_sq_norm(inst.b);
  if (b_sq == 0.0) throw parameter_error("degenerate instance: zero right-hand side");
  const std::size_t d = inst.a.n_cols();

  std::vector<ExperimentRecord> records;
  for (const auto& name : cfg.methods) {
    const MethodSpec method = parse_method(name, cfg.task);
    for (std::size_t budget : cfg.budgets) {
      const std::size_t cap = items_cap(budget);
      // The budget covers the whole compressed state: sampled rows of A, one
      // leverage score per row, the rhs sample (2 items per kept row + tau),
      // and the Gram (d^2 exact, or d + 1 more per sampled row).
      const std::size_t extra_per_row = 1 + 2 + (method.gram == GramMode::SingleSketch ? d + 1 : 0);
      const std::size_t extra_fixed = 1 + (method.gram == GramMode::Exact ? d * d : 0);
      std::size_t k = std::numeric_limits<std::size_t>::max();
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t ts = trial_seed(cfg.seed, t);
        k = std::min(k, max_k_within_items(inst.a, SampleKind::Priority, ts, cap, lev.scores,
                                           extra_per_row, extra_fixed));
      }
      if (k == 0) throw parameter_error("budget " + format_size(budget) + " too small");

      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t ts = trial_seed(cfg.seed, t);
        const StopWatch watch(cfg.measure_time);
        const RegressionSketch ra =
            sketch_matrix_for_regression(inst.a, k, ts, method.gram, &lev);
        const SampleSketch sb = sketch_vector_for_regression(inst.b, k, ts);
        const std::vector<double> x = solve_regression(ra, sb);
        double err = 0.0;
        if (cfg.metric == RegressionMetric::Additive) {
          err = (regression_residual(inst.a, inst.b, x) - r_star) / b_sq;
        } else {
          double s = 0.0;
          for (std::size_t i = 0; i < inst.a.n_rows(); ++i) {
            double ri = 0.0;
            for (const auto& e : inst.a.row(i)) ri += e.value * (x[e.col] - x_star[e.col]);
            s += ri * ri;
          }
          err = std::sqrt(s) / std::sqrt(b_sq);
        }
        records.push_back(ExperimentRecord{name, budget, t, err, watch.seconds()});
      }
    }
  }
  return records;
}

}  // namespace detail

inline std::vector<ExperimentRecord> run_sweep(const SweepConfig& cfg) {
  detail::validate_common(cfg);
  std::vector<ExperimentRecord> records = cfg.task == SweepTask::Product
                                              ? detail::run_product_sweep(cfg)
                                              : detail::run_regression_sweep(cfg);
  std::sort(records.begin(), records.end(), [](const ExperimentRecord& x, const ExperimentRecord& y) {
    return std::tie(x.method, x.budget_items, x.trial) < std::tie(y.method, y.budget_items, y.trial);
  });
  return records;
}

inline void write_records_csv(std::ostream& os, std::span<const ExperimentRecord> records) {
  os << "method,budget_items,trial,error,wall_time_s\n";
  for (const auto& r : records) {
    os << r.method << ',' << format_size(r.budget_items) << ',' << format_size(r.trial) << ','
       << format_double(r.error) << ',' << format_double(r.wall_time_s) << '\n';
  }
}

}  // namespace matsketch
