#include "lrspgd/experiment.hpp"

#include "lrspgd/alloc_tracker.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace lrspgd {

namespace fs = std::filesystem;
using json = nlohmann::json;

FactoredMatrix random_factored(Index m, Index n, Index rank, double scale,
                               std::uint64_t seed) {
  if (rank < 0 || rank > std::min(m, n)) {
    throw std::invalid_argument("random_factored: rank out of range");
  }
  if (rank == 0) return FactoredMatrix::zeros(m, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto orthonormal = [&](Index rows) {
    Matrix g(rows, rank);
    for (Index j = 0; j < rank; ++j) {
      for (Index i = 0; i < rows; ++i) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    return Matrix(qr.householderQ() * Matrix::Identity(rows, rank));
  };
  Matrix u = orthonormal(m);
  Matrix v = orthonormal(n);
  Vector sigma(rank);
  for (Index i = 0; i < rank; ++i) {
    sigma[i] = scale * static_cast<double>(rank - i);
  }
  return FactoredMatrix(m, n, std::move(u), std::move(sigma), std::move(v));
}

namespace {

// ---- config ----------------------------------------------------------

template <typename T>
T require(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) {
    throw ConfigError(std::string("config: missing key '") + key + "' in " +
                      where);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "' in " +
                      where + ": " + e.what());
  }
}

template <typename T>
T optional_key(const json& j, const char* key, T fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "' in " +
                      where + ": " + e.what());
  }
}

void validate(const ExperimentConfig& c) {
  const auto& p = c.problem;
  if (p.kind != "factored_least_squares" &&
      p.kind != "multivariate_regression") {
    throw ConfigError("config: unknown problem.kind '" + p.kind + "'");
  }
  if (p.m < 1 || p.n < 1) throw ConfigError("config: problem dims must be >= 1");
  if (p.target_rank < 0 || p.target_rank > std::min(p.m, p.n)) {
    throw ConfigError("config: problem.target_rank out of range");
  }
  if (p.noise < 0.0) throw ConfigError("config: problem.noise must be >= 0");

  const auto& s = c.solver;
  if (s.lambda < 0.0) throw ConfigError("config: solver.lambda must be >= 0");
  if (s.domain_kind != "unbounded" && s.domain_kind != "frobenius_ball") {
    throw ConfigError("config: unknown solver.domain '" + s.domain_kind + "'");
  }
  if (s.domain_kind == "frobenius_ball" && !(s.radius > 0.0)) {
    throw ConfigError("config: solver.radius must be > 0 for frobenius_ball");
  }
  if (s.schedule_kind != "constant_over_sqrt_t" &&
      s.schedule_kind != "inverse_mu_t") {
    throw ConfigError("config: unknown solver.schedule '" + s.schedule_kind +
                      "'");
  }
  if (!(s.schedule_value > 0.0)) {
    throw ConfigError("config: solver.schedule_value must be > 0");
  }
  if (s.iterations < 0) throw ConfigError("config: solver.T must be >= 0");
  if (s.sketch_width < 1) throw ConfigError("config: solver.k must be >= 1");
  if (s.trace_every < 1) throw ConfigError("config: solver.trace_every >= 1");
  parse_distribution(s.distribution);  // throws on bad name
  if (s.rank_budget < 0 || s.rank_budget > std::min(p.m, p.n)) {
    throw ConfigError("config: solver.rank_budget out of range");
  }
  if (c.sweep.seeds.empty()) throw ConfigError("config: sweep.seeds is empty");
  for (double l : c.sweep.lambda_grid) {
    if (l < 0.0) throw ConfigError("config: sweep.lambda_grid entries >= 0");
  }
  for (int t : c.sweep.t_grid) {
    if (t < 0) throw ConfigError("config: sweep.T_grid entries >= 0");
  }
}

json to_json(const ExperimentConfig& c) {
  return json{
      {"problem",
       {{"kind", c.problem.kind},
        {"m", c.problem.m},
        {"n", c.problem.n},
        {"target_rank", c.problem.target_rank},
        {"target_scale", c.problem.target_scale},
        {"noise", c.problem.noise},
        {"seed", c.problem.seed}}},
      {"solver",
       {{"lambda", c.solver.lambda},
        {"domain", c.solver.domain_kind},
        {"radius", c.solver.radius},
        {"schedule", c.solver.schedule_kind},
        {"schedule_value", c.solver.schedule_value},
        {"T", c.solver.iterations},
        {"k", c.solver.sketch_width},
        {"distribution", c.solver.distribution},
        {"rank_budget", c.solver.rank_budget},
        {"trace_every", c.solver.trace_every}}},
      {"sweep",
       {{"seeds", c.sweep.seeds},
        {"lambda_grid", c.sweep.lambda_grid},
        {"T_grid", c.sweep.t_grid}}},
      {"out_dir", c.out_dir}};
}

// ---- problems and runs ------------------------------------------------

std::unique_ptr<Problem> make_problem(const ExperimentConfig& c) {
  FactoredMatrix target =
      random_factored(c.problem.m, c.problem.n, c.problem.target_rank,
                      c.problem.target_scale, c.problem.seed);
  if (c.problem.kind == "factored_least_squares") {
    return std::make_unique<FactoredLeastSquares>(
        std::move(target), c.solver.sketch_width,
        parse_distribution(c.solver.distribution));
  }
  return std::make_unique<MultivariateRegression>(std::move(target),
                                                  c.problem.noise);
}

DomainSpec make_domain(const SolverSpec& s) {
  return s.domain_kind == "frobenius_ball"
             ? DomainSpec::frobenius_ball(s.radius)
             : DomainSpec::unbounded();
}

// For least squares the regularized optimum is the prox of the target.
std::optional<FactoredMatrix> closed_form_reference(const Problem& problem,
                                                    double lambda,
                                                    const DomainSpec& domain) {
  if (const auto* ls = dynamic_cast<const FactoredLeastSquares*>(&problem)) {
    return prox_nuclear(ls->target(), lambda, 1.0, domain);
  }
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const json& resolved,
                     std::uint64_t seed, double lambda, int iterations,
                     const std::vector<TraceRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace file: " + path);
  out << "# lrspgd trace; reproduce with the config below\n";
  out << "# config: " << resolved.dump() << "\n";
  out << "# seed: " << seed << " lambda: " << format_double(lambda)
      << " T: " << iterations << "\n";
  out << "t,eta,objective,rank,grad_sq_norm,dist_to_ref\n";
  for (const auto& r : trace) {
    out << r.t << ',' << format_double(r.eta) << ','
        << format_double(r.objective) << ',' << r.rank << ','
        << format_double(r.grad_sq_norm) << ','
        << format_double(r.dist_to_ref) << '\n';
  }
}

struct RunJob {
  std::uint64_t seed;
  double lambda;
  int iterations;
};

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  const json jp = require<json>(j, "problem", "config root");
  c.problem.kind = optional_key<std::string>(jp, "kind", c.problem.kind, "problem");
  c.problem.m = require<Index>(jp, "m", "problem");
  c.problem.n = require<Index>(jp, "n", "problem");
  c.problem.target_rank =
      optional_key<Index>(jp, "target_rank", 1, "problem");
  c.problem.target_scale =
      optional_key<double>(jp, "target_scale", 1.0, "problem");
  c.problem.noise = optional_key<double>(jp, "noise", 0.0, "problem");
  c.problem.seed = optional_key<std::uint64_t>(jp, "seed", 0, "problem");

  const json js = require<json>(j, "solver", "config root");
  c.solver.lambda = require<double>(js, "lambda", "solver");
  c.solver.domain_kind =
      optional_key<std::string>(js, "domain", "unbounded", "solver");
  c.solver.radius = optional_key<double>(js, "radius", 0.0, "solver");
  c.solver.schedule_kind = optional_key<std::string>(
      js, "schedule", "constant_over_sqrt_t", "solver");
  c.solver.schedule_value =
      optional_key<double>(js, "schedule_value", 1.0, "solver");
  c.solver.iterations = require<int>(js, "T", "solver");
  c.solver.sketch_width = optional_key<int>(js, "k", 5, "solver");
  c.solver.distribution =
      optional_key<std::string>(js, "distribution", "rademacher", "solver");
  c.solver.rank_budget = optional_key<Index>(js, "rank_budget", 0, "solver");
  c.solver.trace_every = optional_key<int>(js, "trace_every", 10, "solver");

  if (j.contains("sweep")) {
    const json jw = j.at("sweep");
    c.sweep.seeds = optional_key<std::vector<std::uint64_t>>(
        jw, "seeds", c.sweep.seeds, "sweep");
    c.sweep.lambda_grid = optional_key<std::vector<double>>(
        jw, "lambda_grid", {}, "sweep");
    c.sweep.t_grid = optional_key<std::vector<int>>(jw, "T_grid", {}, "sweep");
  }
  c.out_dir = optional_key<std::string>(j, "out_dir", "out", "config root");

  validate(c);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  return to_json(*this).dump(2);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  // Fail before any work if outputs are not writable.
  fs::create_directories(config.out_dir);
  {
    const std::string probe = config.out_dir + "/.write_probe";
    std::ofstream test(probe);
    if (!test) throw ConfigError("output dir not writable: " + config.out_dir);
    test.close();
    fs::remove(probe);
  }

  std::vector<double> lambdas = config.sweep.lambda_grid;
  if (lambdas.empty()) lambdas = {config.solver.lambda};
  std::vector<int> horizons = config.sweep.t_grid;
  if (horizons.empty()) horizons = {config.solver.iterations};

  std::vector<RunJob> jobs;
  for (std::uint64_t seed : config.sweep.seeds) {
    for (double lambda : lambdas) {
      for (int t : horizons) jobs.push_back(RunJob{seed, lambda, t});
    }
  }

  const json resolved = to_json(config);
  auto problem = make_problem(config);
  const DomainSpec domain = make_domain(config.solver);
  const Index rank_budget =
      config.solver.rank_budget > 0
          ? config.solver.rank_budget
          : std::min(config.problem.m, config.problem.n);

  alloc_tracker::reset();

  std::vector<RunSummary> runs(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const RunJob& job = jobs[i];
      try {
        SolverConfig sc;
        sc.lambda = job.lambda;
        sc.domain = domain;
        sc.schedule =
            config.solver.schedule_kind == "inverse_mu_t"
                ? StepSchedule::inverse_mu_t(config.solver.schedule_value,
                                             job.iterations)
                : StepSchedule::constant_over_sqrt_t(
                      config.solver.schedule_value, job.iterations);
        sc.sketch_width = config.solver.sketch_width;
        sc.rank_budget = rank_budget;
        sc.seed = job.seed;
        sc.trace_every = config.solver.trace_every;
        sc.reference = closed_form_reference(*problem, job.lambda, domain);

        const auto start = std::chrono::steady_clock::now();
        SolveResult result = spgd_solve(*problem, sc);
        const auto stop = std::chrono::steady_clock::now();

        char name[128];
        std::snprintf(name, sizeof(name), "trace_s%llu_lam%g_T%d.csv",
                      static_cast<unsigned long long>(job.seed), job.lambda,
                      job.iterations);
        const std::string path = config.out_dir + "/" + name;
        write_trace_csv(path, resolved, job.seed, job.lambda, job.iterations,
                        result.trace);

        RunSummary s;
        s.seed = job.seed;
        s.lambda = job.lambda;
        s.iterations = job.iterations;
        s.final_objective =
            result.trace.empty() ? 0.0 : result.trace.back().objective;
        s.final_rank = result.final.rank();
        s.final_dist =
            result.trace.empty() ? std::nan("") : result.trace.back().dist_to_ref;
        s.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        s.trace_file = path;
        runs[i] = std::move(s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(jobs.size(), hw);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  // Rate regression: mean squared final distance against T, when a T grid
  // and a closed-form reference are both available.
  double slope = std::nan("");
  if (horizons.size() >= 2 && !runs.empty() &&
      std::isfinite(runs.front().final_dist)) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int t : horizons) {
      if (t < 1) continue;
      double mean_sq = 0.0;
      int n_runs = 0;
      for (const auto& r : runs) {
        if (r.iterations == t && std::isfinite(r.final_dist)) {
          mean_sq += r.final_dist * r.final_dist;
          ++n_runs;
        }
      }
      if (n_runs == 0 || mean_sq <= 0.0) continue;
      mean_sq /= n_runs;
      const double x = std::log(static_cast<double>(t));
      const double y = std::log(mean_sq);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++count;
    }
    if (count >= 2) {
      slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }
  }

  ExperimentResult result;
  result.runs = std::move(runs);
  result.dist_sq_loglog_slope = slope;
  result.peak_alloc_bytes = alloc_tracker::peak_single();
  result.summary_file = config.out_dir + "/summary.json";

  json jruns = json::array();
  for (const auto& r : result.runs) {
    jruns.push_back({{"seed", r.seed},
                     {"lambda", r.lambda},
                     {"T", r.iterations},
                     {"final_objective", r.final_objective},
                     {"final_rank", r.final_rank},
                     {"final_dist", std::isfinite(r.final_dist)
                                        ? json(r.final_dist)
                                        : json(nullptr)},
                     {"wall_ms", r.wall_ms},
                     {"trace_file", r.trace_file}});
  }
  json summary{{"config", resolved},
               {"runs", jruns},
               {"peak_alloc_bytes", result.peak_alloc_bytes},
               {"alloc_tracking_active", alloc_tracker::hooks_linked()}};
  if (std::isfinite(slope)) summary["dist_sq_loglog_slope"] = slope;

  std::ofstream out(result.summary_file);
  if (!out) throw ConfigError("cannot write summary: " + result.summary_file);
  out << summary.dump(2) << "\n";
  return result;
}

// ---- verification suites ----------------------------------------------

namespace {

// Dense brute-force prox: full SVD, shrink, project. Independent of the
// factored code path.
Matrix dense_prox_oracle(const Eigen::Ref<const Matrix>& y, double threshold,
                         const DomainSpec& domain) {
  Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues();
  for (Index i = 0; i < s.size(); ++i) s[i] = std::max(0.0, s[i] - threshold);
  Matrix x = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  if (domain.kind == DomainSpec::Kind::FrobeniusBall) {
    const double norm = x.norm();
    if (norm > domain.radius) x *= domain.radius / norm;
  }
  return x;
}

Matrix random_dense(Index m, Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix d(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) d(i, j) = gauss(rng);
  }
  return d;
}

CheckResult check_prox_oracle(const CheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  double max_dev = 0.0;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const Matrix d = random_dense(20, 15, rng);
    const FactoredMatrix f = FactoredMatrix::from_dense(d);
    for (int setting = 0; setting < 10; ++setting) {
      const double lambda = unit(rng) * 2.0;
      const double eta = unit(rng);
      DomainSpec domain = DomainSpec::unbounded();
      if (setting % 2 == 1) {
        // Alternate radii around the shrunk norm to hit both branches.
        const double shrunk =
            svs(f, lambda * eta).frobenius_norm();
        const double radius =
            (setting % 4 == 1) ? std::max(1e-3, 0.5 * shrunk) : 2.0 * shrunk + 1.0;
        domain = DomainSpec::frobenius_ball(radius);
      }
      const Matrix got = prox_nuclear(f, lambda, eta, domain).to_dense();
      const Matrix want = dense_prox_oracle(d, lambda * eta, domain);
      const double denom = std::max(1.0, want.norm());
      max_dev = std::max(max_dev, (got - want).norm() / denom);
    }
  }
  const bool pass = max_dev <= 1e-9;
  std::ostringstream os;
  os << "prox-oracle: max relative deviation " << max_dev
     << " (tolerance 1e-09) over " << opt.trials << " instances x 10 settings: "
     << (pass ? "pass" : "FAIL") << "\n";
  return CheckResult{pass, os.str()};
}

CheckResult check_isotropy_suite(const CheckOptions& opt) {
  const Distribution dist = parse_distribution(opt.distribution);
  const double dev =
      check_isotropy(dist, opt.n, opt.k, opt.samples, opt.seed);
  const double tol = isotropy_tolerance(dist, opt.n, opt.k, opt.samples);
  const bool pass = dev <= tol;
  std::ostringstream os;
  os << "isotropy[" << opt.distribution << " n=" << opt.n << " k=" << opt.k
     << " samples=" << opt.samples << "]: max deviation " << dev
     << " (tolerance " << tol << "): " << (pass ? "pass" : "FAIL") << "\n";
  return CheckResult{pass, os.str()};
}

CheckResult check_kkt(const CheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  double max_boundary = 0.0;
  double max_rel_gap = 0.0;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const FactoredMatrix f = FactoredMatrix::from_dense(random_dense(12, 9, rng));
    const double lambda = 0.3 * unit(rng);
    const double shrunk = svs(f, lambda).frobenius_norm();
    if (shrunk <= 0.0) continue;
    const double radius = opt.active_only ? unit(rng) * shrunk
                                          : (1.0 + unit(rng)) * shrunk;
    const KktReport rep = kkt_dual_check(f, lambda, radius);
    if (rep.mu_star > 0.0) {
      max_boundary = std::max(
          max_boundary, std::abs(rep.scale * rep.shrunk_norm - radius));
    }
    const double primal_scale =
        1.0 + 0.5 * f.frobenius_norm() * f.frobenius_norm();
    max_rel_gap =
        std::max(max_rel_gap, std::abs(rep.primal_dual_gap) / primal_scale);
  }
  const bool pass = max_boundary <= 1e-12 && max_rel_gap <= 1e-9;
  std::ostringstream os;
  os << "kkt: max |scale*||D[Y]||_F - R| = " << max_boundary
     << " (tolerance 1e-12); max relative primal-dual gap = " << max_rel_gap
     << " (tolerance 1e-09): " << (pass ? "pass" : "FAIL") << "\n";
  return CheckResult{pass, os.str()};
}

CheckResult check_incsvd(const CheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> rank_pick(0, 8);
  std::uniform_int_distribution<int> width_pick(1, 4);
  std::uniform_real_distribution<double> scale_pick(-2.0, 2.0);
  double max_rel = 0.0;
  double max_orth = 0.0;
  for (int chain = 0; chain < opt.chains; ++chain) {
    const Index m = 30, n = 25;
    const int r = rank_pick(rng);
    const Matrix start =
        r == 0 ? Matrix::Zero(m, n)
               : Matrix(random_dense(m, r, rng) *
                        random_dense(n, r, rng).transpose());
    FactoredMatrix f = FactoredMatrix::from_dense(start);
    Matrix mirror = f.to_dense();
    for (int step = 0; step < opt.updates; ++step) {
      const int c = width_pick(rng);
      Matrix a = random_dense(m, c, rng);
      Matrix b = random_dense(n, c, rng);
      if (step % 7 == 3 && f.rank() > 0) {
        // Force the degenerate p = 0 branch: A inside span(U).
        a = f.u() * random_dense(f.rank(), c, rng);
      }
      if (step % 7 == 5 && f.rank() > 0) {
        b = f.v() * random_dense(f.rank(), c, rng);
      }
      const double scale = scale_pick(rng);
      f = incremental_update(f, LowRankGradient{a, b}, scale);
      mirror += scale * a * b.transpose();
    }
    const double denom = std::max(1.0, mirror.norm());
    max_rel = std::max(max_rel, (f.to_dense() - mirror).norm() / denom);
    if (f.rank() > 0) {
      const Matrix iu = f.u().transpose() * f.u() -
                        Matrix::Identity(f.rank(), f.rank());
      const Matrix iv = f.v().transpose() * f.v() -
                        Matrix::Identity(f.rank(), f.rank());
      max_orth = std::max({max_orth, iu.cwiseAbs().maxCoeff(),
                           iv.cwiseAbs().maxCoeff()});
    }
  }
  const bool pass = max_rel <= 1e-8 && max_orth <= 1e-9;
  std::ostringstream os;
  os << "incsvd-reconstruction: max relative error " << max_rel
     << " (tolerance 1e-08); max orthonormality drift " << max_orth
     << " (tolerance 1e-09) over " << opt.chains << " chains of "
     << opt.updates << " updates: " << (pass ? "pass" : "FAIL") << "\n";
  return CheckResult{pass, os.str()};
}

}  // namespace

CheckResult run_check(const std::string& name, const CheckOptions& options) {
  if (name == "prox-oracle") return check_prox_oracle(options);
  if (name == "isotropy") return check_isotropy_suite(options);
  if (name == "kkt") return check_kkt(options);
  if (name == "incsvd-reconstruction") return check_incsvd(options);
  throw ConfigError("unknown check: " + name +
                    " (expected prox-oracle | isotropy | kkt | "
                    "incsvd-reconstruction)");
}

}  // namespace lrspgd
