#include <doctest.h>

#include <cmath>

#include "jointsim/famgen.hpp"
#include "jointsim/simjoint.hpp"

using namespace jointsim;

namespace {

CMatrix jordan_block(Complex lambda, int size) {
  CMatrix J = CMatrix::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    J(i, i) = lambda;
    if (i + 1 < size) J(i, i + 1) = 1.0;
  }
  return J;
}

double strict_lower_mass(const CMatrix& A) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < A.cols(); ++c)
    for (Eigen::Index r = c + 1; r < A.rows(); ++r) s += std::norm(A(r, c));
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("common_triangularize on polynomials in one matrix") {
  CMatrix A(3, 3);
  A << Complex(0.1, 0.2), Complex(0.3, 0.0), Complex(0.0, -0.1),
       Complex(0.05, 0.0), Complex(-0.2, 0.1), Complex(0.15, 0.0),
       Complex(0.0, 0.1), Complex(0.1, -0.05), Complex(0.25, 0.0);
  FamilySpec fam;
  fam.name = "poly";
  fam.tol = ToleranceConfig::defaults(3);
  fam.member_names = {"A", "P"};
  fam.members = {A, (A * A + Complex(0.3) * A).eval()};

  const TriangularForm tri = common_triangularize(fam);
  CHECK(op_norm(tri.U * tri.U.adjoint() - CMatrix::Identity(3, 3)) < 1e-10);
  REQUIRE(tri.triangulars.size() == 2);
  for (size_t k = 0; k < 2; ++k) {
    CHECK(strict_lower_mass(tri.triangulars[k]) == 0.0);  // exactly zeroed
    // Unitary similarity reproduces the member.
    CHECK(op_norm(tri.U * fam.members[k] * tri.U.adjoint() - tri.triangulars[k]) <
          1e-8 * (1.0 + op_norm(fam.members[k])));
  }
}

TEST_CASE("common_triangularize rejects a non-commuting pair") {
  FamilySpec fam;
  fam.name = "nc";
  fam.tol = ToleranceConfig::defaults(2);
  CMatrix T(2, 2);
  T << 0, 2, 0, 0;
  fam.member_names = {"T", "Tstar"};
  fam.members = {T, T.adjoint()};
  CHECK_THROWS_AS(common_triangularize(fam), CommutativityViolationError);
}

TEST_CASE("scaled_contraction worked 2x2 instance: K=2, r=1/2") {
  FamilySpec fam;
  fam.name = "worked";
  fam.tol = ToleranceConfig::defaults(2);
  CMatrix T(2, 2);
  T << 0, 2, 0, 0;
  fam.member_names = {"T"};
  fam.members = {T};
  const TriangularForm tri = common_triangularize(fam);
  const ContractionResult res = scaled_contraction(tri, 2.0, 0.5, fam.tol);

  // bound = (n^2 K / (1-r))^((n-1)/2) = (8 / (1/2))^(1/2) = 4, attained.
  CHECK(res.bound == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(op_norm(res.Y) == doctest::Approx(4.0).epsilon(1e-10));
  const CMatrix Yinv = res.Y.inverse();
  CHECK(op_norm(Yinv) == doctest::Approx(4.0).epsilon(1e-10));
  REQUIRE(res.conjugated_norms.size() == 1);
  CHECK(res.conjugated_norms[0] == doctest::Approx(0.125).epsilon(1e-10));
  // Independent check of the conjugated norm.
  CHECK(op_norm(res.Y * T * Yinv) == doctest::Approx(0.125).epsilon(1e-10));
}

TEST_CASE("scaled_contraction rejects r outside [0, 1)") {
  FamilySpec fam;
  fam.name = "one";
  fam.tol = ToleranceConfig::defaults(2);
  CMatrix T(2, 2);
  T << 0, 1, 0, 0;
  fam.member_names = {"T"};
  fam.members = {T};
  const TriangularForm tri = common_triangularize(fam);
  CHECK_THROWS_AS(scaled_contraction(tri, 2.0, 1.0, fam.tol), DomainViolationError);
  CHECK_THROWS_AS(scaled_contraction(tri, 2.0, -0.5, fam.tol), InvalidInputError);
}

TEST_CASE("similarize_block passes scalar members through the identity") {
  const ToleranceConfig tol = ToleranceConfig::defaults(2);
  const CMatrix M = Complex(0.5) * CMatrix::Identity(2, 2);
  const ContractionResult res =
      similarize_block({M}, {{TagKind::scalar, Complex(0.5)}}, 1.0, 0.0, tol);
  CHECK(op_norm(res.Y - CMatrix::Identity(2, 2)) == 0.0);
  REQUIRE(res.conjugated_norms.size() == 1);
  CHECK(res.conjugated_norms[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("similarize_block rejects a scalar tag outside the closed disc") {
  const ToleranceConfig tol = ToleranceConfig::defaults(2);
  const CMatrix M = Complex(1.5) * CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(
      similarize_block({M}, {{TagKind::scalar, Complex(1.5)}}, 1.0, 0.0, tol),
      InvalidInputError);
}

TEST_CASE("joint_similarity on a single nilpotent member") {
  FamilySpec fam;
  fam.name = "single";
  fam.tol = ToleranceConfig::defaults(2);
  CMatrix T(2, 2);
  T << 0, 2, 0, 0;
  fam.member_names = {"T"};
  fam.members = {T};
  const SimilarityCertificate cert = joint_similarity(fam);
  CHECK(cert.verified);
  CHECK(cert.K == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cert.r == 0.0);
  CHECK(!cert.K_clamped);
  REQUIRE(cert.conjugated_norms.size() == 1);
  CHECK(cert.conjugated_norms[0] <= 1.0 + 1e-8);
  // Balanced conditioning and the advertised bound.
  CHECK(std::abs(cert.norm_Y - cert.norm_Yinv) <= 1e-8 * cert.norm_Y);
  CHECK(cert.norm_Y <= cert.bound * (1.0 + 1e-8));
  // The certificate matrix really does the job.
  const CMatrix Yinv = cert.Y.inverse();
  CHECK(op_norm(cert.Y * T * Yinv) <= 1.0 + 1e-8);
}

TEST_CASE("joint_similarity on a commuting block pair") {
  FamilySpec fam;
  fam.name = "pair";
  fam.tol = ToleranceConfig::defaults(3);
  fam.member_names = {"A", "B"};
  fam.members = {direct_sum({jordan_block(0.0, 2), jordan_block(0.5, 1)}),
                 direct_sum({jordan_block(0.2, 2), jordan_block(0.7, 1)})};
  const SimilarityCertificate cert = joint_similarity(fam);
  CHECK(cert.verified);
  CHECK(cert.r == doctest::Approx(0.2).epsilon(1e-6));
  const CMatrix Yinv = cert.Y.inverse();
  for (size_t k = 0; k < fam.members.size(); ++k) {
    CHECK(op_norm(cert.Y * fam.members[k] * Yinv) <= 1.0 + 1e-8);
  }
  CHECK(cert.norm_Y <= cert.bound * (1.0 + 1e-8));
}

TEST_CASE("joint_similarity refuses the non-commuting counterexample") {
  const GeneratedFamily g = generate({.seed = 0, .n = 2, .recipe = Recipe::counterexample_nc});
  try {
    joint_similarity(g.family);
    FAIL("expected a commutativity violation");
  } catch (const CommutativityViolationError& e) {
    CHECK(e.residual == doctest::Approx(0.8).epsilon(1e-12));
  }
}

TEST_CASE("joint_similarity refuses members that are not power bounded") {
  FamilySpec fam;
  fam.name = "boundary";
  fam.tol = ToleranceConfig::defaults(2);
  fam.member_names = {"J"};
  fam.members = {jordan_block(1.0, 2)};
  CHECK_THROWS_AS(joint_similarity(fam), DomainViolationError);
}

TEST_CASE("joint_similarity conditioning grows with the unbounded family") {
  GenSpec gs;
  gs.recipe = Recipe::counterexample_unbounded;
  gs.m = 4;
  const GeneratedFamily g = generate(gs);
  const SimilarityCertificate cert = joint_similarity(g.family);
  CHECK(cert.verified);
  // Any Y taming the member of norm m must have cond(Y) >= m.
  CHECK(cert.norm_Y * cert.norm_Yinv >= 4.0 * (1.0 - 1e-8));
}

TEST_CASE("uniform_family_report on shifted J_2 blocks") {
  FamilySpec fam;
  fam.name = "uniform";
  fam.tol = ToleranceConfig::defaults(2);
  for (double lam : {0.0, 0.3, 0.6}) {
    fam.member_names.push_back("J" + std::to_string(fam.members.size() + 1));
    fam.members.push_back(jordan_block(lam, 2));
  }
  std::vector<SpectralProfile> profiles;
  for (const auto& T : fam.members) profiles.push_back(spectral_profile(T, fam.tol));
  const UniformFamilyReport rep = uniform_family_report(fam, profiles);
  REQUIRE(rep.uniform_K.has_value());
  REQUIRE(rep.delta_infimum.has_value());
  CHECK(*rep.delta_infimum == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.delta_radius == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(rep.has_uniform_jordan);
  CHECK(rep.consistent);
}
