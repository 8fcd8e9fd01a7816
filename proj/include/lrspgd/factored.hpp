#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace lrspgd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Max-entry tolerance for column orthonormality of stored factors.
inline constexpr double kOrthTol = 1e-10;

/// Any operation that materializes an m-by-n buffer refuses above this
/// entry count. Everything else in the library is O((m+n)*rank) space.
inline constexpr std::int64_t kDenseCap = 4'000'000;

/// A matrix held as a thin SVD triple U * diag(sigma) * V^T.
///
/// Singular values are strictly positive and sorted non-increasing;
/// rank 0 (empty blocks) is the zero matrix. Values are immutable after
/// construction and safe to share across threads.
class FactoredMatrix {
 public:
  /// Builds from explicit factors. Throws std::invalid_argument if sigma
  /// is not strictly positive and non-increasing or if shapes disagree.
  /// Orthonormality of U, V is the caller's contract; validate() checks it.
  FactoredMatrix(Index m, Index n, Matrix u, Vector sigma, Matrix v);

  static FactoredMatrix zeros(Index m, Index n);

  /// Thin SVD of a dense matrix, dropping singular values <= tol * sigma_max.
  /// Test/bridge use only: refuses when m*n exceeds the dense cap.
  static FactoredMatrix from_dense(const Eigen::Ref<const Matrix>& dense,
                                   double tol = 1e-12);

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index rank() const { return sigma_.size(); }

  const Matrix& u() const { return u_; }
  const Vector& sigma() const { return sigma_; }
  const Matrix& v() const { return v_; }

  double nuclear_norm() const { return sigma_.sum(); }
  double frobenius_norm() const { return sigma_.norm(); }

  /// U * diag(sigma) * (V^T * Y); never allocates an m-by-n buffer.
  Matrix multiply_right(const Eigen::Ref<const Matrix>& y) const;

  /// V * diag(sigma) * (U^T * X), i.e. W^T * X.
  Matrix transpose_multiply_right(const Eigen::Ref<const Matrix>& x) const;

  /// Materializes U * diag(sigma) * V^T. Refuses above the dense cap.
  Matrix to_dense() const;

  /// Asserts all type invariants (orthonormality within kOrthTol, sigma
  /// ordering/positivity). Throws std::logic_error on violation.
  void validate() const;

  /// Updates applied since the factors were last re-orthonormalized.
  /// Maintained by incsvd; starts at 0.
  int updates_since_reorth = 0;

 private:
  Index m_;
  Index n_;
  Matrix u_;      // m x r
  Vector sigma_;  // r
  Matrix v_;      // n x r
};

/// A gradient sketch A * B^T that is never materialized.
struct LowRankGradient {
  Matrix a;  // m x c
  Matrix b;  // n x c

  Index width() const { return a.cols(); }

  /// ||A B^T||_F^2 = trace((A^T A)(B^T B)), via c-by-c blocks.
  double frobenius_sq() const;
};

/// <F1, F2> via small cross blocks; O((m+n) r1 r2).
double inner_product(const FactoredMatrix& f1, const FactoredMatrix& f2);

/// ||F1 - F2||_F without densifying (clamped at 0 against cancellation).
double frobenius_distance(const FactoredMatrix& f1, const FactoredMatrix& f2);

}  // namespace lrspgd
