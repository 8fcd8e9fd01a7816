#include "lrspgd/factored.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lrspgd {

namespace {

void check_dense_cap(Index m, Index n, const char* what) {
  if (static_cast<std::int64_t>(m) * static_cast<std::int64_t>(n) > kDenseCap) {
    throw std::length_error(std::string(what) + ": dense size " +
                            std::to_string(m) + "x" + std::to_string(n) +
                            " exceeds the dense-size cap");
  }
}

}  // namespace

FactoredMatrix::FactoredMatrix(Index m, Index n, Matrix u, Vector sigma,
                               Matrix v)
    : m_(m), n_(n), u_(std::move(u)), sigma_(std::move(sigma)), v_(std::move(v)) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("FactoredMatrix: dimensions must be >= 1");
  }
  const Index r = sigma_.size();
  if (u_.rows() != m_ || u_.cols() != r || v_.rows() != n_ || v_.cols() != r) {
    throw std::invalid_argument("FactoredMatrix: factor shapes inconsistent");
  }
  if (r > std::min(m_, n_)) {
    throw std::invalid_argument("FactoredMatrix: rank exceeds min(m, n)");
  }
  for (Index i = 0; i < r; ++i) {
    if (!(sigma_[i] > 0.0) || !std::isfinite(sigma_[i])) {
      throw std::invalid_argument(
          "FactoredMatrix: singular values must be finite and positive");
    }
    if (i > 0 && sigma_[i] > sigma_[i - 1]) {
      throw std::invalid_argument(
          "FactoredMatrix: singular values must be non-increasing");
    }
  }
}

FactoredMatrix FactoredMatrix::zeros(Index m, Index n) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("zeros: dimensions must be >= 1");
  }
  return FactoredMatrix(m, n, Matrix(m, 0), Vector(0), Matrix(n, 0));
}

FactoredMatrix FactoredMatrix::from_dense(const Eigen::Ref<const Matrix>& dense,
                                          double tol) {
  check_dense_cap(dense.rows(), dense.cols(), "from_dense");
  Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? tol * s[0] : 0.0;
  Index r = 0;
  while (r < s.size() && s[r] > cutoff && s[r] > 0.0) ++r;
  return FactoredMatrix(dense.rows(), dense.cols(),
                        svd.matrixU().leftCols(r), s.head(r),
                        svd.matrixV().leftCols(r));
}

Matrix FactoredMatrix::multiply_right(const Eigen::Ref<const Matrix>& y) const {
  if (y.rows() != n_) {
    throw std::invalid_argument("multiply_right: Y must have n rows");
  }
  if (rank() == 0) return Matrix::Zero(m_, y.cols());
  return u_ * (sigma_.asDiagonal() * (v_.transpose() * y));
}

Matrix FactoredMatrix::transpose_multiply_right(
    const Eigen::Ref<const Matrix>& x) const {
  if (x.rows() != m_) {
    throw std::invalid_argument("transpose_multiply_right: X must have m rows");
  }
  if (rank() == 0) return Matrix::Zero(n_, x.cols());
  return v_ * (sigma_.asDiagonal() * (u_.transpose() * x));
}

Matrix FactoredMatrix::to_dense() const {
  check_dense_cap(m_, n_, "to_dense");
  if (rank() == 0) return Matrix::Zero(m_, n_);
  return u_ * sigma_.asDiagonal() * v_.transpose();
}

void FactoredMatrix::validate() const {
  const Index r = rank();
  if (r == 0) return;
  const double du =
      (u_.transpose() * u_ - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  const double dv =
      (v_.transpose() * v_ - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (du > kOrthTol || dv > kOrthTol) {
    throw std::logic_error("FactoredMatrix: factor orthonormality violated (" +
                           std::to_string(std::max(du, dv)) + ")");
  }
}

double LowRankGradient::frobenius_sq() const {
  if (a.cols() == 0) return 0.0;
  const Matrix ata = a.transpose() * a;
  const Matrix btb = b.transpose() * b;
  return (ata.array() * btb.array()).sum();
}

double inner_product(const FactoredMatrix& f1, const FactoredMatrix& f2) {
  if (f1.rows() != f2.rows() || f1.cols() != f2.cols()) {
    throw std::invalid_argument("inner_product: dimension mismatch");
  }
  if (f1.rank() == 0 || f2.rank() == 0) return 0.0;
  const Matrix cu = f1.u().transpose() * f2.u();  // r1 x r2
  const Matrix cv = f1.v().transpose() * f2.v();
  double dot = 0.0;
  for (Index i = 0; i < f1.rank(); ++i) {
    for (Index j = 0; j < f2.rank(); ++j) {
      dot += f1.sigma()[i] * f2.sigma()[j] * cu(i, j) * cv(i, j);
    }
  }
  return dot;
}

double frobenius_distance(const FactoredMatrix& f1, const FactoredMatrix& f2) {
  const double sq = f1.frobenius_norm() * f1.frobenius_norm() +
                    f2.frobenius_norm() * f2.frobenius_norm() -
                    2.0 * inner_product(f1, f2);
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace lrspgd
