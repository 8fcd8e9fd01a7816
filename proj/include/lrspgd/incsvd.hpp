#pragma once

#include "lrspgd/factored.hpp"

namespace lrspgd {

/// Core SVDs are computed densely; refuse beyond this side length, since a
/// core that large means the iterate rank has run away.
inline constexpr Index kCoreCap = 512;

/// Factors re-orthonormalized after this many successive updates by default.
inline constexpr int kReorthInterval = 256;

/// Orthonormal basis P of the column space of (I - U U^T) A together with
/// the coefficients R = P^T (I - U U^T) A.
struct ComplementBasis {
  Matrix p;  // m x p, orthonormal, U^T P = 0
  Matrix r;  // p x c
  /// U^T A, refined alongside the projection passes so that
  /// A = U * u_coeff + P * r holds to working precision.
  Matrix u_coeff;  // rank(U) x c
};

/// Two-pass Gram-Schmidt against U and the growing P. Residual columns with
/// norm <= tol * ||A||_F contribute no basis vector, so p may be < c or 0.
ComplementBasis orthogonal_complement_basis(const Eigen::Ref<const Matrix>& u,
                                            const Eigen::Ref<const Matrix>& a,
                                            double tol = 1e-12);

struct CoreSvd {
  Matrix u;
  Vector sigma;  // non-increasing, non-negative
  Matrix v;
};

/// Economy SVD of a small dense core. Throws if either side exceeds kCoreCap.
CoreSvd core_svd(const Eigen::Ref<const Matrix>& k);

/// The small blocks assembled while updating the thin SVD of X by A B^T.
struct UpdateDecomposition {
  Matrix p;    // m x p
  Matrix r_a;  // p x c
  Matrix q;    // n x q
  Matrix r_b;  // q x c
  Matrix k;    // (r+p) x (r+q) core
};

UpdateDecomposition build_update_decomposition(const FactoredMatrix& f,
                                               const Eigen::Ref<const Matrix>& a,
                                               const Eigen::Ref<const Matrix>& b,
                                               double tol = 1e-12);

/// Thin SVD of to_dense(F) + scale * A B^T, computed without any m-by-n
/// buffer: O((m+n)(r+c)^2 + (r+c)^3) time, O((m+n)(r+c)) space.
/// Singular values below trunc_tol * sigma_max are dropped. scale == 0
/// returns F unchanged.
FactoredMatrix incremental_update(const FactoredMatrix& f,
                                  const LowRankGradient& g, double scale,
                                  double trunc_tol = 1e-12,
                                  int reorth_interval = kReorthInterval);

/// Rebuilds F with freshly orthonormalized factors (thin QR on U and V,
/// SVD of the folded r-by-r core). Used to bound drift over long runs.
FactoredMatrix reorthonormalized(const FactoredMatrix& f);

}  // namespace lrspgd
