#pragma once

#include "lrspgd/factored.hpp"
#include "lrspgd/probing.hpp"

#include <cstdint>
#include <memory>

namespace lrspgd {

/// A stochastic subgradient oracle for a convex f over m x n matrices.
///
/// Implementations never hand out a dense subgradient at scale: the
/// sketch-apply capability (apply_subgradient) evaluates G * Y directly so
/// probing-based sketches stay O((m+n) k). Instances are immutable after
/// construction; stochastic_grad is pure given its seed.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  /// A LowRankGradient whose expectation lies in the subdifferential of f
  /// at W. Deterministic for a fixed seed.
  virtual LowRankGradient stochastic_grad(const FactoredMatrix& w,
                                          std::uint64_t seed) const = 0;

  /// Exact f(W). Factored formulas where available; dense paths refuse
  /// above the dense cap.
  virtual double exact_objective(const FactoredMatrix& w) const = 0;

  /// Strong convexity modulus mu of f (0 = merely convex).
  virtual double strong_convexity_mu() const = 0;

  /// Rough estimate of sup E[||Ghat||_F^2]^{1/2}, for schedule selection.
  virtual double grad_bound() const = 0;

  /// G * Y for a subgradient G at W, without materializing G.
  virtual Matrix apply_subgradient(const FactoredMatrix& w,
                                   const Eigen::Ref<const Matrix>& y) const = 0;

  /// Dense full (sub)gradient at a dense W; desk-scale reference path only.
  virtual Matrix dense_gradient(const Eigen::Ref<const Matrix>& w) const = 0;
};

/// Ghat = (G Y) Y^T assembled through the problem's sketch-apply capability.
LowRankGradient sketch_subgradient(const Problem& problem,
                                   const FactoredMatrix& w,
                                   const ProbingMatrix& y);

/// f(W) = 1/2 ||W - M||_F^2 with a factored target M. mu = 1 and the
/// regularized optimum is the shrinkage of M in closed form, which makes
/// it the reference problem for rate tests.
class FactoredLeastSquares : public Problem {
 public:
  FactoredLeastSquares(FactoredMatrix target, int sketch_width,
                       Distribution distribution = Distribution::Rademacher);

  Index rows() const override { return target_.rows(); }
  Index cols() const override { return target_.cols(); }
  const FactoredMatrix& target() const { return target_; }

  LowRankGradient stochastic_grad(const FactoredMatrix& w,
                                  std::uint64_t seed) const override;
  double exact_objective(const FactoredMatrix& w) const override;
  double strong_convexity_mu() const override { return 1.0; }
  double grad_bound() const override;
  Matrix apply_subgradient(const FactoredMatrix& w,
                           const Eigen::Ref<const Matrix>& y) const override;
  Matrix dense_gradient(const Eigen::Ref<const Matrix>& w) const override;

 private:
  FactoredMatrix target_;
  int sketch_width_;
  Distribution distribution_;
};

/// f(W) = E_{x,eps} 1/2 ||x^T W - y||^2 with y = x^T Wbar + eps,
/// x ~ N(0, I_m), eps ~ N(0, noise^2 I_n). Each sample's gradient
/// x (x^T W - y)^T is exactly rank one, so no probing is involved.
class MultivariateRegression : public Problem {
 public:
  MultivariateRegression(FactoredMatrix ground_truth, double noise);

  Index rows() const override { return truth_.rows(); }
  Index cols() const override { return truth_.cols(); }
  const FactoredMatrix& ground_truth() const { return truth_; }

  LowRankGradient stochastic_grad(const FactoredMatrix& w,
                                  std::uint64_t seed) const override;
  double exact_objective(const FactoredMatrix& w) const override;
  double strong_convexity_mu() const override { return 1.0; }
  double grad_bound() const override;
  Matrix apply_subgradient(const FactoredMatrix& w,
                           const Eigen::Ref<const Matrix>& y) const override;
  Matrix dense_gradient(const Eigen::Ref<const Matrix>& w) const override;

 private:
  FactoredMatrix truth_;
  double noise_;
};

}  // namespace lrspgd
