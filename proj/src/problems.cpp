#include "lrspgd/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lrspgd {

LowRankGradient sketch_subgradient(const Problem& problem,
                                   const FactoredMatrix& w,
                                   const ProbingMatrix& y) {
  if (y.y.rows() != problem.cols()) {
    throw std::invalid_argument("sketch_subgradient: Y must have n rows");
  }
  return LowRankGradient{problem.apply_subgradient(w, y.y), y.y};
}

FactoredLeastSquares::FactoredLeastSquares(FactoredMatrix target,
                                           int sketch_width,
                                           Distribution distribution)
    : target_(std::move(target)),
      sketch_width_(sketch_width),
      distribution_(distribution) {
  if (sketch_width < 1) {
    throw std::invalid_argument("FactoredLeastSquares: sketch width >= 1");
  }
}

LowRankGradient FactoredLeastSquares::stochastic_grad(
    const FactoredMatrix& w, std::uint64_t seed) const {
  ProbingMatrix y = generate_probing(distribution_, cols(), sketch_width_, seed);
  return sketch_subgradient(*this, w, y);
}

double FactoredLeastSquares::exact_objective(const FactoredMatrix& w) const {
  // 1/2 (||W||_F^2 - 2 <W, M> + ||M||_F^2), all via small blocks.
  const double wn = w.frobenius_norm();
  const double mn = target_.frobenius_norm();
  return 0.5 * (wn * wn - 2.0 * inner_product(w, target_) + mn * mn);
}

double FactoredLeastSquares::grad_bound() const {
  // At W = 0 the subgradient is -M; sketching inflates the second moment
  // by roughly n/k. Crude but sufficient for schedule selection.
  return target_.frobenius_norm() *
         std::sqrt(1.0 + static_cast<double>(cols()) / sketch_width_);
}

Matrix FactoredLeastSquares::apply_subgradient(
    const FactoredMatrix& w, const Eigen::Ref<const Matrix>& y) const {
  // G = W - M, so G Y = W Y - M Y in factored arithmetic.
  return w.multiply_right(y) - target_.multiply_right(y);
}

Matrix FactoredLeastSquares::dense_gradient(
    const Eigen::Ref<const Matrix>& w) const {
  return w - target_.to_dense();
}

MultivariateRegression::MultivariateRegression(FactoredMatrix ground_truth,
                                               double noise)
    : truth_(std::move(ground_truth)), noise_(noise) {
  if (noise < 0.0) {
    throw std::invalid_argument("MultivariateRegression: noise must be >= 0");
  }
}

LowRankGradient MultivariateRegression::stochastic_grad(
    const FactoredMatrix& w, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix x(rows(), 1);
  for (Index i = 0; i < rows(); ++i) x(i, 0) = gauss(rng);

  // residual = W^T x - y = W^T x - (Wbar^T x + eps)
  Matrix residual = w.transpose_multiply_right(x) -
                    truth_.transpose_multiply_right(x);
  if (noise_ > 0.0) {
    for (Index i = 0; i < cols(); ++i) residual(i, 0) -= noise_ * gauss(rng);
  }
  return LowRankGradient{std::move(x), std::move(residual)};
}

double MultivariateRegression::exact_objective(const FactoredMatrix& w) const {
  const double d = frobenius_distance(w, truth_);
  return 0.5 * (d * d + static_cast<double>(cols()) * noise_ * noise_);
}

double MultivariateRegression::grad_bound() const {
  return std::sqrt(static_cast<double>(rows())) *
         (truth_.frobenius_norm() + noise_ * std::sqrt(double(cols())));
}

Matrix MultivariateRegression::apply_subgradient(
    const FactoredMatrix& w, const Eigen::Ref<const Matrix>& y) const {
  // Population gradient is W - Wbar (features are standard normal).
  return w.multiply_right(y) - truth_.multiply_right(y);
}

Matrix MultivariateRegression::dense_gradient(
    const Eigen::Ref<const Matrix>& w) const {
  return w - truth_.to_dense();
}

}  // namespace lrspgd
