#pragma once

#include "lrspgd/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lrspgd {

/// Random rank-r matrix in factored form: Gaussian-QR orthonormal factors,
/// sigma_i = scale * (r - i) for i = 0..r-1 (descending). Works at any
/// scale; no dense buffer involved.
FactoredMatrix random_factored(Index m, Index n, Index rank, double scale,
                               std::uint64_t seed);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::string kind = "factored_least_squares";  // or "multivariate_regression"
  Index m = 0;
  Index n = 0;
  Index target_rank = 1;
  double target_scale = 1.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

struct SolverSpec {
  double lambda = 0.0;
  std::string domain_kind = "unbounded";  // or "frobenius_ball"
  double radius = 0.0;
  std::string schedule_kind = "constant_over_sqrt_t";  // or "inverse_mu_t"
  double schedule_value = 1.0;
  int iterations = 0;  // T
  int sketch_width = 5;
  std::string distribution = "rademacher";
  Index rank_budget = 0;  // 0 = min(m, n)
  int trace_every = 10;
};

struct SweepSpec {
  std::vector<std::uint64_t> seeds = {0};
  std::vector<double> lambda_grid;  // empty = just solver.lambda
  std::vector<int> t_grid;          // empty = just solver.iterations
};

struct ExperimentConfig {
  ProblemSpec problem;
  SolverSpec solver;
  SweepSpec sweep;
  std::string out_dir = "out";

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct RunSummary {
  std::uint64_t seed;
  double lambda;
  int iterations;
  double final_objective;
  Index final_rank;
  double final_dist;  // NaN without a reference
  double wall_ms;
  std::string trace_file;
};

struct ExperimentResult {
  std::vector<RunSummary> runs;
  double dist_sq_loglog_slope;  // NaN unless a T grid and reference exist
  std::size_t peak_alloc_bytes;
  std::string summary_file;
};

/// Runs the full sweep described by the config: one CSV trace per
/// (seed, grid point), a JSON summary, all artifacts under config.out_dir.
/// Sweep points run on a bounded worker pool.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct CheckResult {
  bool pass;
  std::string report;  // one line per property, measured value vs tolerance
};

/// Verification suites exposed by the CLI. Names: "prox-oracle",
/// "isotropy", "kkt", "incsvd-reconstruction".
struct CheckOptions {
  std::uint64_t seed = 12345;
  int trials = 100;
  // isotropy
  std::string distribution = "rademacher";
  Index n = 8;
  int k = 8;
  int samples = 100000;
  // kkt
  bool active_only = true;
  // incsvd
  int chains = 100;
  int updates = 50;
};

CheckResult run_check(const std::string& name, const CheckOptions& options);

}  // namespace lrspgd
