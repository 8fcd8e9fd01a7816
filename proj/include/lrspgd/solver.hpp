#pragma once

#include "lrspgd/incsvd.hpp"
#include "lrspgd/problems.hpp"
#include "lrspgd/prox.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace lrspgd {

/// eta_t = c / sqrt(T) (general convex) or eta_t = 1 / (mu t) (strongly
/// convex), over a fixed horizon T.
struct StepSchedule {
  enum class Kind { ConstantOverSqrtT, InverseMuT };

  Kind kind;
  double value;  // c or mu
  int horizon;   // T

  static StepSchedule constant_over_sqrt_t(double c, int horizon);
  static StepSchedule inverse_mu_t(double mu, int horizon);
};

/// eta_t for 1 <= t <= horizon; throws std::out_of_range otherwise.
double step_size(const StepSchedule& schedule, int t);

struct SolverConfig {
  double lambda = 0.0;
  DomainSpec domain = DomainSpec::unbounded();
  StepSchedule schedule = StepSchedule::constant_over_sqrt_t(1.0, 1);
  int sketch_width = 5;
  Index rank_budget = 0;  // must be set; <= min(m, n)
  std::uint64_t seed = 0;
  int trace_every = 10;
  double trunc_tol = 1e-12;
  int reorth_interval = kReorthInterval;
  /// When present, dist_to_ref is recorded against this matrix.
  std::optional<FactoredMatrix> reference;
};

struct TraceRecord {
  int t;                 // iteration (T+1 for the final record)
  double eta;            // step used at t (0 in the final record)
  double objective;      // F(W_t) = f(W_t) + lambda ||W_t||_*
  Index rank;            // rank of W_t
  double grad_sq_norm;   // ||Ghat_t||_F^2 (0 in the final record)
  double dist_to_ref;    // ||W_t - W*||_F, NaN without a reference
};

struct SolveResult {
  FactoredMatrix final;  // W_{T+1}, the last iterate (never an average)
  std::vector<TraceRecord> trace;
};

/// Numerical abort: rank budget exceeded or non-finite values encountered.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Algorithm: W_1 = 0; for t = 1..T take a sketched gradient step via the
/// incremental SVD, then apply the nuclear prox for the domain; return
/// W_{T+1}. Deterministic for a fixed seed; peak space
/// O((m+n)(rank_budget + k)).
SolveResult spgd_solve(const Problem& problem, const SolverConfig& config);

/// Desk-scale reference: full-gradient proximal iteration on dense matrices
/// until ||W_{k+1} - W_k||_F <= tol. Refuses above the dense cap.
Matrix dense_baseline_solve(const Problem& problem, double lambda,
                            const DomainSpec& domain, double step = 1.0,
                            double tol = 1e-10, int max_iters = 100000);

}  // namespace lrspgd
