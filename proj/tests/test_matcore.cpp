#include <doctest.h>

#include <random>

#include "jointsim/matcore.hpp"

using namespace jointsim;

namespace {

CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  std::normal_distribution<double> dist;
  CMatrix A(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = Complex(dist(rng), dist(rng));
  return A;
}

// Independent oracle: power iteration on T^* T estimates ||T||^2.
double power_iteration_norm(const CMatrix& T, int iters = 2000) {
  const CMatrix G = T.adjoint() * T;
  CVector v = CVector::Ones(G.rows());
  v.normalize();
  double lambda = 0.0;
  for (int i = 0; i < iters; ++i) {
    CVector w = G * v;
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("op_norm basics") {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 0.5;
  D(1, 1) = Complex(0, -0.8);
  CHECK(op_norm(D) == doctest::Approx(0.8).epsilon(1e-12));

  CHECK(op_norm(CMatrix::Zero(3, 3)) == 0.0);

  CMatrix N(2, 2);
  N << 0, 2, 0, 0;
  CHECK(op_norm(N) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("op_norm matches a power-iteration oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix T = random_matrix(rng, 5, 5);
    CHECK(op_norm(T) == doctest::Approx(power_iteration_norm(T)).epsilon(1e-8));
  }
}

TEST_CASE("op_norm rejects non-finite input") {
  CMatrix T(1, 1);
  T(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(op_norm(T), InvalidInputError);
}

TEST_CASE("direct_sum") {
  CMatrix a(1, 1), b(1, 1);
  a << 2;
  b << 3;
  const CMatrix d = direct_sum({a, b});
  CHECK(d(0, 0) == Complex(2));
  CHECK(d(1, 1) == Complex(3));
  CHECK(d(0, 1) == Complex(0));

  CHECK(direct_sum({a}) == a);
  CHECK_THROWS_AS(direct_sum({}), InvalidInputError);

  // J_2(0) (+) [0.9]
  CMatrix j(2, 2);
  j << 0, 1, 0, 0;
  CMatrix s(1, 1);
  s << 0.9;
  const CMatrix t = direct_sum({j, s});
  CHECK(t.rows() == 3);
  CHECK(t(0, 1) == Complex(1));
  CHECK(t(2, 2) == Complex(0.9));
  CHECK(t(0, 0) == Complex(0));
  CHECK(t(1, 1) == Complex(0));
}

TEST_CASE("direct_sum norm is the max of block norms") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<CMatrix> blocks;
    double expect = 0.0;
    for (int b = 0; b < 3; ++b) {
      blocks.push_back(random_matrix(rng, 2 + b, 2 + b));
      expect = std::max(expect, op_norm(blocks.back()));
    }
    CHECK(op_norm(direct_sum(blocks)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("entrywise_norm_bounds") {
  CMatrix N(2, 2);
  N << 0, 2, 0, 0;
  auto [lo, hi] = entrywise_norm_bounds(N);
  CHECK(lo == 2.0);
  CHECK(hi == 8.0);

  auto [lo3, hi3] = entrywise_norm_bounds(CMatrix::Identity(3, 3));
  CHECK(lo3 == 1.0);
  CHECK(hi3 == 9.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix T = random_matrix(rng, 4, 4);
    auto [l, h] = entrywise_norm_bounds(T);
    const double nm = op_norm(T);
    CHECK(l <= nm + 1e-12);
    CHECK(nm <= h + 1e-12);
  }
}

TEST_CASE("svd reconstructs and is unitary") {
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 3;
  D(1, 1) = 1;
  auto r = svd(D);
  CHECK(r.S(0) == doctest::Approx(3.0));
  CHECK(r.S(1) == doctest::Approx(1.0));

  CMatrix N(2, 2);
  N << 0, 2, 0, 0;
  auto rn = svd(N);
  CHECK(rn.S(0) == doctest::Approx(2.0));
  CHECK(rn.S(1) == doctest::Approx(0.0));

  std::mt19937_64 rng(5);
  const CMatrix T = random_matrix(rng, 6, 6);
  auto rt = svd(T);
  const double nt = op_norm(T);
  CHECK(op_norm(rt.U.adjoint() * rt.U - CMatrix::Identity(6, 6)) < 1e-10);
  CHECK(op_norm(rt.V.adjoint() * rt.V - CMatrix::Identity(6, 6)) < 1e-10);
  CMatrix rec = rt.U * rt.S.cast<Complex>().asDiagonal() * rt.V.adjoint();
  CHECK(op_norm(rec - T) < 1e-10 * nt);

  // Unitary invariance of the operator norm.
  CHECK(op_norm(rt.U * T * rt.V) == doctest::Approx(nt).epsilon(1e-10));
}

TEST_CASE("solve") {
  const ToleranceConfig tol = ToleranceConfig::defaults(3);
  std::mt19937_64 rng(9);
  const CMatrix B = random_matrix(rng, 3, 3);
  CHECK(op_norm(solve(CMatrix::Identity(3, 3), B, tol) - B) < 1e-12);

  CMatrix A = CMatrix::Zero(2, 2);
  A(0, 0) = 2;
  A(1, 1) = 4;
  const CMatrix X = solve(A, CMatrix::Identity(2, 2), ToleranceConfig::defaults(2));
  CHECK(std::abs(X(0, 0) - Complex(0.5)) < 1e-12);
  CHECK(std::abs(X(1, 1) - Complex(0.25)) < 1e-12);

  const CMatrix W = random_matrix(rng, 4, 4) + 4.0 * CMatrix::Identity(4, 4);
  const CMatrix R = random_matrix(rng, 4, 2);
  const CMatrix S = solve(W, R, ToleranceConfig::defaults(4));
  CHECK(op_norm(W * S - R) < 1e-9 * op_norm(W) * op_norm(S) + 1e-12);

  CMatrix sing = CMatrix::Zero(2, 2);
  sing(0, 0) = 1;
  CHECK_THROWS_AS(solve(sing, CMatrix::Identity(2, 2), ToleranceConfig::defaults(2)),
                  SingularMatrixError);
}

TEST_CASE("commutator_residual") {
  CMatrix S(2, 2);
  S << 0, 2, 0, 0;
  CHECK(commutator_residual(S, S) == 0.0);
  CHECK(commutator_residual(S, S.adjoint().eval()) == doctest::Approx(0.8).epsilon(1e-12));

  CMatrix D1 = CMatrix::Zero(2, 2), D2 = CMatrix::Zero(2, 2);
  D1(0, 0) = 1;
  D1(1, 1) = 2;
  D2(0, 0) = Complex(0, 1);
  D2(1, 1) = -0.3;
  CHECK(commutator_residual(D1, D2) == 0.0);

  CHECK_THROWS_AS(commutator_residual(S, CMatrix::Identity(3, 3)), InvalidInputError);
}

TEST_CASE("null_space and orthonormalize") {
  const ToleranceConfig tol = ToleranceConfig::defaults(3);
  CMatrix N(2, 2);
  N << 0, 1, 0, 0;
  const CMatrix K = null_space(N, ToleranceConfig::defaults(2));
  REQUIRE(K.cols() == 1);
  CHECK(std::abs(K(0, 0)) == doctest::Approx(1.0));

  std::mt19937_64 rng(13);
  const CMatrix A = random_matrix(rng, 5, 3);
  const CMatrix Q = orthonormalize(A, ToleranceConfig::defaults(5));
  REQUIRE(Q.cols() == 3);
  CHECK(op_norm(Q.adjoint() * Q - CMatrix::Identity(3, 3)) < 1e-12);
  // Same span: A projects onto Q exactly.
  CHECK(op_norm(A - Q * (Q.adjoint() * A)) < 1e-12 * op_norm(A));
}
