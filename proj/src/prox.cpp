#include "lrspgd/prox.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrspgd {

DomainSpec DomainSpec::frobenius_ball(double r) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("DomainSpec: ball radius must be positive");
  }
  return DomainSpec{Kind::FrobeniusBall, r};
}

FactoredMatrix svs(const FactoredMatrix& f, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("svs: lambda must be >= 0");
  }
  if (lambda == 0.0) return f;

  // sigma is sorted descending, so survivors are a prefix.
  Index keep = 0;
  while (keep < f.rank() && f.sigma()[keep] > lambda) ++keep;
  if (keep == 0) return FactoredMatrix::zeros(f.rows(), f.cols());

  FactoredMatrix out(f.rows(), f.cols(), f.u().leftCols(keep),
                     f.sigma().head(keep).array() - lambda,
                     f.v().leftCols(keep));
  out.updates_since_reorth = f.updates_since_reorth;
  return out;
}

FactoredMatrix project_frobenius(const FactoredMatrix& f, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("project_frobenius: radius must be positive");
  }
  const double norm = f.frobenius_norm();
  if (norm <= radius) return f;

  FactoredMatrix out(f.rows(), f.cols(), f.u(),
                     f.sigma() * (radius / norm), f.v());
  out.updates_since_reorth = f.updates_since_reorth;
  return out;
}

FactoredMatrix prox_nuclear(const FactoredMatrix& f, double lambda, double eta,
                            const DomainSpec& domain) {
  if (lambda < 0.0) {
    throw std::invalid_argument("prox_nuclear: lambda must be >= 0");
  }
  if (!(eta > 0.0)) {
    throw std::invalid_argument("prox_nuclear: eta must be positive");
  }
  FactoredMatrix shrunk = svs(f, lambda * eta);
  if (domain.kind == DomainSpec::Kind::FrobeniusBall) {
    return project_frobenius(shrunk, domain.radius);
  }
  return shrunk;
}

KktReport kkt_dual_check(const FactoredMatrix& f, double lambda,
                         double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("kkt_dual_check: radius must be positive");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("kkt_dual_check: lambda must be >= 0");
  }

  // Shrunk spectrum, computed on sigma alone.
  double shrunk_sq = 0.0;
  double shrunk_nuc = 0.0;
  for (Index i = 0; i < f.rank(); ++i) {
    const double s = f.sigma()[i] - lambda;
    if (s > 0.0) {
      shrunk_sq += s * s;
      shrunk_nuc += s;
    }
  }
  const double shrunk_norm = std::sqrt(shrunk_sq);

  KktReport rep;
  rep.shrunk_norm = shrunk_norm;
  if (shrunk_norm <= radius) {
    rep.mu_star = 0.0;
    rep.scale = 1.0;
  } else {
    rep.mu_star = 0.5 * (shrunk_norm / radius - 1.0);
    rep.scale = 1.0 / (1.0 + 2.0 * rep.mu_star);
  }

  // Primal objective at X* = scale * shrink_lambda(F); shares F's columns,
  // so ||X* - F||_F^2 reduces to a sum over sigma.
  double dist_sq = 0.0;
  double xstar_nuc = 0.0;
  for (Index i = 0; i < f.rank(); ++i) {
    const double sig = f.sigma()[i];
    const double s = sig - lambda;
    if (s > 0.0) {
      const double d = rep.scale * s - sig;
      dist_sq += d * d;
      xstar_nuc += rep.scale * s;
    } else {
      dist_sq += sig * sig;
    }
  }
  const double primal = 0.5 * dist_sq + lambda * xstar_nuc;

  const double f_sq = f.frobenius_norm() * f.frobenius_norm();
  const double dual = -0.5 * rep.scale * shrunk_sq -
                      rep.mu_star * radius * radius + 0.5 * f_sq;
  rep.primal_dual_gap = primal - dual;
  return rep;
}

}  // namespace lrspgd
