#include "lrspgd/incsvd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lrspgd {

ComplementBasis orthogonal_complement_basis(const Eigen::Ref<const Matrix>& u,
                                            const Eigen::Ref<const Matrix>& a,
                                            double tol) {
  const Index m = a.rows();
  const Index c = a.cols();
  const Index r = u.cols();
  if (u.rows() != m) {
    throw std::invalid_argument("orthogonal_complement_basis: U/A row mismatch");
  }

  Matrix u_coeff = Matrix::Zero(r, c);
  Matrix res = a;
  // Two projection passes against U; the correction folds back into u_coeff
  // so that U*u_coeff + res == A to working precision.
  for (int pass = 0; pass < 2 && r > 0; ++pass) {
    Matrix proj = u.transpose() * res;
    u_coeff += proj;
    res.noalias() -= u * proj;
  }

  const double col_cutoff = tol * a.norm();

  Matrix p(m, c);
  Matrix coeff = Matrix::Zero(c, c);  // rows for accepted basis vectors
  Index np = 0;
  for (Index j = 0; j < c; ++j) {
    Vector v = res.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      if (np > 0) {
        Vector proj = p.leftCols(np).transpose() * v;
        coeff.col(j).head(np) += proj;
        v.noalias() -= p.leftCols(np) * proj;
      }
      if (r > 0) {
        Vector uproj = u.transpose() * v;
        u_coeff.col(j) += uproj;
        v.noalias() -= u * uproj;
      }
    }
    const double norm = v.norm();
    if (norm > col_cutoff && norm > 0.0) {
      p.col(np) = v / norm;
      coeff(np, j) = norm;
      ++np;
    }
  }

  ComplementBasis out;
  out.p = p.leftCols(np);
  out.r = coeff.topRows(np);
  out.u_coeff = std::move(u_coeff);
  return out;
}

CoreSvd core_svd(const Eigen::Ref<const Matrix>& k) {
  if (k.rows() > kCoreCap || k.cols() > kCoreCap) {
    throw std::runtime_error("core_svd: core " + std::to_string(k.rows()) +
                             "x" + std::to_string(k.cols()) +
                             " exceeds the small-core cap (runaway rank?)");
  }
  if (k.size() == 0) {
    return CoreSvd{Matrix(k.rows(), 0), Vector(0), Matrix(k.cols(), 0)};
  }
  Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return CoreSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

UpdateDecomposition build_update_decomposition(const FactoredMatrix& f,
                                               const Eigen::Ref<const Matrix>& a,
                                               const Eigen::Ref<const Matrix>& b,
                                               double tol) {
  if (a.rows() != f.rows() || b.rows() != f.cols() || a.cols() != b.cols()) {
    throw std::invalid_argument("build_update_decomposition: shape mismatch");
  }
  ComplementBasis ca = orthogonal_complement_basis(f.u(), a, tol);
  ComplementBasis cb = orthogonal_complement_basis(f.v(), b, tol);

  const Index r = f.rank();
  const Index np = ca.p.cols();
  const Index nq = cb.p.cols();
  const Index c = a.cols();

  Matrix left(r + np, c);
  left.topRows(r) = ca.u_coeff;
  left.bottomRows(np) = ca.r;
  Matrix right(r + nq, c);
  right.topRows(r) = cb.u_coeff;
  right.bottomRows(nq) = cb.r;

  Matrix k = Matrix::Zero(r + np, r + nq);
  k.topLeftCorner(r, r) = Matrix(f.sigma().asDiagonal());
  k.noalias() += left * right.transpose();

  return UpdateDecomposition{std::move(ca.p), std::move(ca.r),
                             std::move(cb.p), std::move(cb.r), std::move(k)};
}

FactoredMatrix incremental_update(const FactoredMatrix& f,
                                  const LowRankGradient& g, double scale,
                                  double trunc_tol, int reorth_interval) {
  if (g.a.rows() != f.rows() || g.b.rows() != f.cols() ||
      g.a.cols() != g.b.cols()) {
    throw std::invalid_argument("incremental_update: dimension mismatch");
  }
  if (!g.a.allFinite() || !g.b.allFinite()) {
    throw std::invalid_argument("incremental_update: non-finite gradient block");
  }
  if (scale == 0.0) return f;

  const Matrix a = scale * g.a;
  UpdateDecomposition dec = build_update_decomposition(f, a, g.b, trunc_tol);
  CoreSvd core = core_svd(dec.k);

  const Index total = core.sigma.size();
  const double cutoff = total > 0 ? trunc_tol * core.sigma[0] : 0.0;
  Index rank = 0;
  while (rank < total && core.sigma[rank] > cutoff && core.sigma[rank] > 0.0) {
    ++rank;
  }

  const Index r = f.rank();
  Matrix u_new(f.rows(), rank);
  if (rank > 0) {
    u_new.noalias() = f.u() * core.u.topRows(r).leftCols(rank);
    u_new.noalias() += dec.p * core.u.bottomRows(dec.p.cols()).leftCols(rank);
  }
  Matrix v_new(f.cols(), rank);
  if (rank > 0) {
    v_new.noalias() = f.v() * core.v.topRows(r).leftCols(rank);
    v_new.noalias() += dec.q * core.v.bottomRows(dec.q.cols()).leftCols(rank);
  }

  FactoredMatrix out(f.rows(), f.cols(), std::move(u_new),
                     core.sigma.head(rank), std::move(v_new));
  out.updates_since_reorth = f.updates_since_reorth + 1;
  if (reorth_interval > 0 && out.updates_since_reorth >= reorth_interval) {
    return reorthonormalized(out);
  }
  return out;
}

FactoredMatrix reorthonormalized(const FactoredMatrix& f) {
  const Index r = f.rank();
  if (r == 0) return FactoredMatrix::zeros(f.rows(), f.cols());

  Eigen::HouseholderQR<Matrix> qr_u(f.u());
  Matrix qu = qr_u.householderQ() * Matrix::Identity(f.rows(), r);
  Matrix ru = qr_u.matrixQR().topRows(r).triangularView<Eigen::Upper>();

  Eigen::HouseholderQR<Matrix> qr_v(f.v());
  Matrix qv = qr_v.householderQ() * Matrix::Identity(f.cols(), r);
  Matrix rv = qr_v.matrixQR().topRows(r).triangularView<Eigen::Upper>();

  Matrix core = ru * f.sigma().asDiagonal() * rv.transpose();
  CoreSvd svd = core_svd(core);

  const double cutoff = svd.sigma.size() > 0 ? 1e-15 * svd.sigma[0] : 0.0;
  Index rank = 0;
  while (rank < svd.sigma.size() && svd.sigma[rank] > cutoff) ++rank;

  return FactoredMatrix(f.rows(), f.cols(), qu * svd.u.leftCols(rank),
                        svd.sigma.head(rank), qv * svd.v.leftCols(rank));
}

}  // namespace lrspgd
