#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrspgd/incsvd.hpp"
#include "test_support.hpp"

using namespace lrspgd;
namespace ts = testsupport;

TEST_CASE("complement basis is empty when A lies in span(U)") {
  std::mt19937_64 rng(3);
  Matrix u = ts::dense_svd(ts::random_dense(10, 3, rng)).u;
  Matrix coeff = ts::random_dense(3, 2, rng);
  ComplementBasis cb = orthogonal_complement_basis(u, u * coeff);
  CHECK(cb.p.cols() == 0);
  CHECK(cb.r.rows() == 0);
  CHECK((cb.u_coeff - coeff).norm() <= 1e-12 * coeff.norm());
}

TEST_CASE("complement basis with empty U reduces to QR") {
  Matrix u(6, 0);
  Matrix a = Matrix::Zero(6, 2);
  a(0, 0) = 2.0;
  a(3, 1) = -3.0;
  ComplementBasis cb = orthogonal_complement_basis(u, a);
  CHECK(cb.p.cols() == 2);
  CHECK(ts::max_orth_dev(cb.p) <= 1e-14);
  CHECK(cb.r(0, 0) == doctest::Approx(2.0));
  CHECK(std::abs(cb.r(1, 1)) == doctest::Approx(3.0));
  CHECK((cb.p * cb.r - a).norm() <= 1e-14);
}

TEST_CASE("complement basis reconstructs A") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix u = ts::dense_svd(ts::random_dense(10, 3, rng)).u;
    Matrix a = ts::random_dense(10, 2, rng);
    ComplementBasis cb = orthogonal_complement_basis(u, a);
    CHECK((u * cb.u_coeff + cb.p * cb.r - a).norm() <= 1e-10 * a.norm());
    CHECK(ts::max_orth_dev(cb.p) <= 1e-12);
    if (cb.p.cols() > 0) {
      CHECK((u.transpose() * cb.p).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("update decomposition satisfies its defining identities") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    FactoredMatrix f =
        FactoredMatrix::from_dense(ts::random_low_rank(12, 10, 4, rng));
    Matrix a = ts::random_dense(12, 3, rng);
    Matrix b = ts::random_dense(10, 3, rng);
    UpdateDecomposition dec = build_update_decomposition(f, a, b);

    const Index r = f.rank();
    const Index p = dec.p.cols();
    const Index q = dec.q.cols();
    CHECK(p <= 3);
    CHECK(q <= 3);
    CHECK(ts::max_orth_dev(dec.p) <= 1e-10);
    CHECK(ts::max_orth_dev(dec.q) <= 1e-10);
    if (p > 0) CHECK((f.u().transpose() * dec.p).cwiseAbs().maxCoeff() <= 1e-10);
    if (q > 0) CHECK((f.v().transpose() * dec.q).cwiseAbs().maxCoeff() <= 1e-10);

    // K reconstructs [[Sigma,0],[0,0]] + [U^T A; R_A][V^T B; R_B]^T.
    Matrix expect = Matrix::Zero(r + p, r + q);
    expect.topLeftCorner(r, r) = Matrix(f.sigma().asDiagonal());
    Matrix left(r + p, 3);
    left.topRows(r) = f.u().transpose() * a;
    left.bottomRows(p) = dec.r_a;
    Matrix right(r + q, 3);
    right.topRows(r) = f.v().transpose() * b;
    right.bottomRows(q) = dec.r_b;
    expect += left * right.transpose();
    CHECK((dec.k - expect).cwiseAbs().maxCoeff() <= 1e-12 * expect.norm());
  }
}

TEST_CASE("core_svd on small matrices") {
  Matrix k = Matrix::Zero(2, 2);
  k(0, 0) = 5.0;
  k(1, 1) = 1.0;
  CoreSvd s = core_svd(k);
  CHECK(s.sigma[0] == doctest::Approx(5.0));
  CHECK(s.sigma[1] == doctest::Approx(1.0));

  CoreSvd empty = core_svd(Matrix(0, 0));
  CHECK(empty.sigma.size() == 0);

  std::mt19937_64 rng(1);
  Matrix r = ts::random_dense(7, 5, rng);
  CoreSvd rs = core_svd(r);
  CHECK((rs.u * rs.sigma.asDiagonal() * rs.v.transpose() - r).norm() <= 1e-12);
  CHECK(ts::max_orth_dev(rs.u) <= 1e-12);
  CHECK(ts::max_orth_dev(rs.v) <= 1e-12);

  CHECK_THROWS(core_svd(Matrix::Zero(kCoreCap + 1, 2)));
}

TEST_CASE("incremental_update basic cases") {
  std::mt19937_64 rng(2);
  // rank-0 plus a unit outer product, scaled by 2
  Vector a = Vector::Zero(6);
  a[1] = 1.0;
  Vector b = Vector::Zero(4);
  b[2] = 1.0;
  FactoredMatrix f = incremental_update(
      FactoredMatrix::zeros(6, 4), LowRankGradient{a, b}, 2.0);
  CHECK(f.rank() == 1);
  CHECK(f.sigma()[0] == doctest::Approx(2.0).epsilon(1e-14));

  // scale = 0 returns the input unchanged, bit-identical sigma
  FactoredMatrix g =
      FactoredMatrix::from_dense(ts::random_low_rank(6, 4, 2, rng));
  FactoredMatrix same = incremental_update(
      g, LowRankGradient{ts::random_dense(6, 1, rng), ts::random_dense(4, 1, rng)},
      0.0);
  CHECK(same.sigma() == g.sigma());

  CHECK_THROWS_AS(
      incremental_update(g, LowRankGradient{ts::random_dense(5, 1, rng),
                                            ts::random_dense(4, 1, rng)},
                         1.0),
      std::invalid_argument);

  Matrix bad = ts::random_dense(6, 1, rng);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(
      incremental_update(g, LowRankGradient{bad, ts::random_dense(4, 1, rng)},
                         1.0),
      std::invalid_argument);
}

TEST_CASE("incremental_update matches the dense SVD oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix base = ts::random_low_rank(15, 12, 3, rng);
    FactoredMatrix f = FactoredMatrix::from_dense(base);
    Matrix a = ts::random_dense(15, 2, rng);
    Matrix b = ts::random_dense(12, 2, rng);
    const double scale = 0.7;

    FactoredMatrix updated = incremental_update(f, LowRankGradient{a, b}, scale);
    Matrix dense_sum = base + scale * a * b.transpose();
    ts::DenseSvd oracle = ts::dense_svd(dense_sum);

    CHECK((updated.to_dense() - dense_sum).norm() <=
          1e-9 * (base.norm() + std::abs(scale) * a.norm() * b.norm()));
    Index nsv = std::min<Index>(updated.rank(), oracle.sigma.size());
    for (Index i = 0; i < nsv; ++i) {
      CHECK(updated.sigma()[i] == doctest::Approx(oracle.sigma[i]).epsilon(1e-9));
    }
    updated.validate();
  }
}

TEST_CASE("rank never exceeds r + c nor min(m, n)") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    FactoredMatrix f =
        FactoredMatrix::from_dense(ts::random_low_rank(8, 6, 5, rng));
    const Index r = f.rank();
    Matrix a = ts::random_dense(8, 3, rng);
    Matrix b = ts::random_dense(6, 3, rng);
    FactoredMatrix g = incremental_update(f, LowRankGradient{a, b}, 1.0);
    CHECK(g.rank() <= r + 3);
    CHECK(g.rank() <= 6);
  }
}

TEST_CASE("orthonormality survives 10^4 chained updates") {
  std::mt19937_64 rng(8);
  FactoredMatrix f = FactoredMatrix::zeros(10, 8);
  Matrix mirror = Matrix::Zero(10, 8);
  for (int step = 0; step < 10000; ++step) {
    Matrix a = ts::random_dense(10, 1, rng, 0.1);
    Matrix b = ts::random_dense(8, 1, rng, 0.1);
    f = incremental_update(f, LowRankGradient{a, b}, 1.0, 1e-12);
    mirror += a * b.transpose();
    if (step % 100 == 0 && f.rank() > 0) {
      CHECK(ts::max_orth_dev(f.u()) <= kOrthTol);
      CHECK(ts::max_orth_dev(f.v()) <= kOrthTol);
    }
  }
  CHECK(ts::max_orth_dev(f.u()) <= kOrthTol);
  CHECK(ts::max_orth_dev(f.v()) <= kOrthTol);
  CHECK((f.to_dense() - mirror).norm() <= 1e-7 * std::max(1.0, mirror.norm()));
}

TEST_CASE("reorthonormalized preserves the represented matrix") {
  std::mt19937_64 rng(10);
  FactoredMatrix f =
      FactoredMatrix::from_dense(ts::random_low_rank(9, 7, 4, rng));
  FactoredMatrix g = reorthonormalized(f);
  CHECK((f.to_dense() - g.to_dense()).norm() <= 1e-12 * f.to_dense().norm());
  CHECK(g.updates_since_reorth == 0);
}
