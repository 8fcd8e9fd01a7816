#pragma once

#include "lrspgd/factored.hpp"

namespace lrspgd {

/// The feasible set: all of R^{m x n}, or the Frobenius ball of radius R.
struct DomainSpec {
  enum class Kind { Unbounded, FrobeniusBall };

  Kind kind = Kind::Unbounded;
  double radius = 0.0;

  static DomainSpec unbounded() { return DomainSpec{Kind::Unbounded, 0.0}; }
  static DomainSpec frobenius_ball(double r);
};

/// Singular value shrinkage: keep directions with sigma_i > lambda, subtract
/// lambda. Exact ties shrink to zero and are truncated. O(r); U, V columns
/// are selected, never recomputed.
FactoredMatrix svs(const FactoredMatrix& f, double lambda);

/// Metric projection onto the Frobenius ball: identity inside, otherwise
/// sigma scaled by R / ||F||_F.
FactoredMatrix project_frobenius(const FactoredMatrix& f, double radius);

/// argmin_{X in domain} 1/2 ||X - F||_F^2 + lambda*eta ||X||_*, with F
/// already in SVD form: shrink by lambda*eta, then project if ball-bounded.
FactoredMatrix prox_nuclear(const FactoredMatrix& f, double lambda, double eta,
                            const DomainSpec& domain);

/// Dual-side diagnostic for the ball-constrained prox.
struct KktReport {
  double mu_star;          // optimal dual variable, 0 iff constraint inactive
  double shrunk_norm;      // ||shrink_lambda(F)||_F
  double scale;            // 1 / (1 + 2 mu_star)
  double primal_dual_gap;  // primal objective of X* minus L(mu_star)
};

/// Solves the 1-D dual in closed form and evaluates both sides:
/// mu_star = (||shrink(F)||_F / R - 1) / 2 when the constraint is active.
KktReport kkt_dual_check(const FactoredMatrix& f, double lambda, double radius);

}  // namespace lrspgd
