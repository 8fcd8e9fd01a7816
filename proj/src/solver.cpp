#include "lrspgd/solver.hpp"

#include <cmath>
#include <string>

namespace lrspgd {

StepSchedule StepSchedule::constant_over_sqrt_t(double c, int horizon) {
  if (!(c > 0.0)) throw std::invalid_argument("schedule: c must be positive");
  if (horizon < 0) throw std::invalid_argument("schedule: horizon must be >= 0");
  return StepSchedule{Kind::ConstantOverSqrtT, c, horizon};
}

StepSchedule StepSchedule::inverse_mu_t(double mu, int horizon) {
  if (!(mu > 0.0)) throw std::invalid_argument("schedule: mu must be positive");
  if (horizon < 0) throw std::invalid_argument("schedule: horizon must be >= 0");
  return StepSchedule{Kind::InverseMuT, mu, horizon};
}

double step_size(const StepSchedule& schedule, int t) {
  if (t < 1 || t > schedule.horizon) {
    throw std::out_of_range("step_size: t out of [1, T]");
  }
  if (schedule.kind == StepSchedule::Kind::ConstantOverSqrtT) {
    return schedule.value / std::sqrt(static_cast<double>(schedule.horizon));
  }
  return 1.0 / (schedule.value * static_cast<double>(t));
}

SolveResult spgd_solve(const Problem& problem, const SolverConfig& config) {
  const Index m = problem.rows();
  const Index n = problem.cols();
  if (config.lambda < 0.0) {
    throw std::invalid_argument("spgd_solve: lambda must be >= 0");
  }
  if (config.rank_budget < 1 || config.rank_budget > std::min(m, n)) {
    throw std::invalid_argument("spgd_solve: rank_budget must be in [1, min(m,n)]");
  }
  if (config.trace_every < 1) {
    throw std::invalid_argument("spgd_solve: trace_every must be >= 1");
  }

  const int horizon = config.schedule.horizon;
  FactoredMatrix w = FactoredMatrix::zeros(m, n);
  std::vector<TraceRecord> trace;

  for (int t = 1; t <= horizon; ++t) {
    const double eta = step_size(config.schedule, t);
    LowRankGradient grad =
        problem.stochastic_grad(w, split_seed(config.seed, t));
    const double grad_sq = grad.frobenius_sq();
    if (!std::isfinite(grad_sq)) {
      throw SolverError("spgd_solve: non-finite gradient at t=" +
                        std::to_string(t));
    }

    if ((t - 1) % config.trace_every == 0) {
      TraceRecord rec;
      rec.t = t;
      rec.eta = eta;
      rec.objective =
          problem.exact_objective(w) + config.lambda * w.nuclear_norm();
      rec.rank = w.rank();
      rec.grad_sq_norm = grad_sq;
      rec.dist_to_ref = config.reference
                            ? frobenius_distance(w, *config.reference)
                            : std::nan("");
      if (!std::isfinite(rec.objective)) {
        throw SolverError("spgd_solve: non-finite objective at t=" +
                          std::to_string(t));
      }
      trace.push_back(rec);
    }

    FactoredMatrix stepped = incremental_update(
        w, grad, -eta, config.trunc_tol, config.reorth_interval);
    w = prox_nuclear(stepped, config.lambda, eta, config.domain);

    if (w.rank() > config.rank_budget) {
      throw SolverError(
          "spgd_solve: iterate rank " + std::to_string(w.rank()) +
          " exceeds rank budget " + std::to_string(config.rank_budget) +
          " at t=" + std::to_string(t) + " (lambda too small for the budget?)");
    }
  }

  if (horizon >= 1) {
    TraceRecord rec;
    rec.t = horizon + 1;
    rec.eta = 0.0;
    rec.objective =
        problem.exact_objective(w) + config.lambda * w.nuclear_norm();
    rec.rank = w.rank();
    rec.grad_sq_norm = 0.0;
    rec.dist_to_ref = config.reference
                          ? frobenius_distance(w, *config.reference)
                          : std::nan("");
    if (!std::isfinite(rec.objective)) {
      throw SolverError("spgd_solve: non-finite final objective");
    }
    trace.push_back(rec);
  }

  return SolveResult{std::move(w), std::move(trace)};
}

Matrix dense_baseline_solve(const Problem& problem, double lambda,
                            const DomainSpec& domain, double step, double tol,
                            int max_iters) {
  const Index m = problem.rows();
  const Index n = problem.cols();
  if (static_cast<std::int64_t>(m) * n > kDenseCap) {
    throw std::length_error("dense_baseline_solve: exceeds the dense cap");
  }

  Matrix w = Matrix::Zero(m, n);
  for (int it = 0; it < max_iters; ++it) {
    Matrix stepped = w - step * problem.dense_gradient(w);
    FactoredMatrix next = prox_nuclear(FactoredMatrix::from_dense(stepped),
                                       lambda, step, domain);
    Matrix next_dense = next.to_dense();
    const double delta = (next_dense - w).norm();
    w = std::move(next_dense);
    if (delta <= tol) return w;
  }
  throw SolverError("dense_baseline_solve: no convergence within iteration cap");
}

}  // namespace lrspgd
