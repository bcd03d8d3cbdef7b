#include "jointsim/simjoint.hpp"

#include <algorithm>
#include <cmath>

namespace jointsim {

namespace {

void check_commuting(const FamilySpec& family, const char* who) {
  double worst = 0.0;
  size_t wa = 0, wb = 0;
  for (size_t a = 0; a < family.members.size(); ++a) {
    for (size_t b = a + 1; b < family.members.size(); ++b) {
      const double res = commutator_residual(family.members[a], family.members[b]);
      if (res > worst) {
        worst = res;
        wa = a;
        wb = b;
      }
    }
  }
  if (worst > family.tol.tol_commute) {
    throw CommutativityViolationError(std::string(who) + ": family does not commute",
                                      family.member_names[wa], family.member_names[wb],
                                      worst);
  }
}

// Unitary H with H e1 = v, for a unit vector v (Householder based).
CMatrix unitary_with_first_column(const CVector& v) {
  const Eigen::Index d = v.size();
  Complex alpha = -1.0;
  if (std::abs(v(0)) > 0) alpha = -v(0) / std::abs(v(0));
  CVector u = v;
  u(0) -= alpha;
  const double uu = u.squaredNorm();
  CMatrix H;
  if (uu < 1e-30) {
    H = alpha * CMatrix::Identity(d, d);
  } else {
    H = alpha * (CMatrix::Identity(d, d) - (2.0 / uu) * (u * u.adjoint()));
  }
  return H;
}

// Approximate common eigenvector of a commuting set: intersect eigenspaces
// member by member, smallest-modulus eigenvalue first.
CVector common_eigenvector(const std::vector<CMatrix>& members,
                           const ToleranceConfig& tol) {
  const Eigen::Index d = members.front().rows();
  CMatrix B = CMatrix::Identity(d, d);
  for (const auto& M : members) {
    if (B.cols() == 1) break;
    const CMatrix R = B.adjoint() * M * B;
    const auto clusters = eigen_clusters(R, tol);
    const EigenCluster* pick = &clusters.front();
    for (const auto& c : clusters) {
      if (std::abs(c.value) < std::abs(pick->value)) pick = &c;
    }
    const double radius = tol.tol_cluster * (1.0 + op_norm(R));
    const CMatrix shifted = R - pick->value * CMatrix::Identity(R.rows(), R.cols());
    CMatrix E = null_space(shifted, tol, radius);
    if (E.cols() == 0) {
      // Defective cluster: fall back to the least-singular direction.
      Eigen::JacobiSVD<CMatrix> dec(shifted, Eigen::ComputeFullV);
      E = dec.matrixV().rightCols(1);
    }
    B = B * E;
  }
  return B.col(0);
}

}  // namespace

TriangularForm common_triangularize(const FamilySpec& family) {
  family.validate();
  check_commuting(family, "common_triangularize");
  const Eigen::Index n = family.dim();
  const ToleranceConfig& tol = family.tol;

  std::vector<CMatrix> working = family.members;
  CMatrix V = CMatrix::Identity(n, n);  // accumulated; working = V^* T V

  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const Eigen::Index d = n - j;
    std::vector<CMatrix> active;
    active.reserve(working.size());
    for (const auto& A : working) active.push_back(A.bottomRightCorner(d, d));
    const CVector v = common_eigenvector(active, tol);
    const CMatrix H = unitary_with_first_column(v);
    CMatrix Q = CMatrix::Identity(n, n);
    Q.bottomRightCorner(d, d) = H;
    for (auto& A : working) A = Q.adjoint() * A * Q;
    V = V * Q;
  }

  TriangularForm out;
  out.U = V.adjoint();
  out.triangulars.reserve(working.size());
  for (size_t k = 0; k < working.size(); ++k) {
    CMatrix A = working[k];
    double lower = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = c + 1; r < n; ++r) lower += std::norm(A(r, c));
    }
    lower = std::sqrt(lower);
    const double scale = op_norm(family.members[k]);
    if (lower > 1e-9 * (1.0 + scale)) {
      throw CommutativityViolationError(
          "common_triangularize: residual below the diagonal too large; common "
          "eigenvector search failed (family is likely not commuting)",
          family.member_names[k], family.member_names[k], lower / (1.0 + scale));
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = c + 1; r < n; ++r) A(r, c) = 0.0;
    }
    out.triangulars.push_back(std::move(A));
  }
  return out;
}

ContractionResult scaled_contraction(const TriangularForm& tri, double K, double r,
                                     const ToleranceConfig& tol) {
  (void)tol;
  if (!(r >= 0.0)) throw InvalidInputError("scaled_contraction: r must be nonnegative");
  if (r >= 1.0) throw DomainViolationError("scaled_contraction: r must be below 1");
  const Eigen::Index n = tri.U.rows();
  const double Kc = std::max(K, 1.0 + 1e-6);
  const double eps = (1.0 - r) / (static_cast<double>(n) * static_cast<double>(n) * Kc);

  RVector diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = std::pow(eps, -static_cast<double>(i));

  ContractionResult out;
  out.bound = std::pow(eps, -static_cast<double>(n - 1) / 2.0);
  const double scale = std::pow(eps, static_cast<double>(n - 1) / 2.0);
  out.Y = scale * diag.cast<Complex>().asDiagonal() * tri.U;

  out.conjugated_norms.reserve(tri.triangulars.size());
  for (const auto& Tk : tri.triangulars) {
    // X Tk X^{-1} scales entry (i,j) by eps^{j-i}.
    CMatrix C = Tk;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        C(i, j) *= std::pow(eps, static_cast<double>(j - i));
      }
    }
    out.conjugated_norms.push_back(op_norm(C));
  }
  return out;
}

ContractionResult similarize_block(const std::vector<CMatrix>& members,
                                   const std::vector<PartTag>& tags, double K,
                                   double r, const ToleranceConfig& tol) {
  if (members.empty()) throw InvalidInputError("similarize_block: no members");
  if (members.size() != tags.size()) {
    throw InvalidInputError("similarize_block: tag count mismatch");
  }
  const Eigen::Index d = members.front().rows();
  const double Kc = std::max(K, 1.0 + 1e-6);

  std::vector<CMatrix> nonscalar;
  std::vector<std::string> names;
  for (size_t k = 0; k < members.size(); ++k) {
    if (tags[k].kind == TagKind::scalar) {
      if (std::abs(tags[k].z) > 1.0 + tol.tol_spectrum) {
        throw InvalidInputError("similarize_block: scalar tag outside the closed disc");
      }
    } else {
      nonscalar.push_back(members[k]);
      names.push_back("member" + std::to_string(k));
    }
  }

  ContractionResult out;
  if (nonscalar.empty()) {
    out.Y = CMatrix::Identity(d, d);
    out.bound = std::pow(static_cast<double>(d) * static_cast<double>(d) * Kc / (1.0 - r),
                         static_cast<double>(d - 1) / 2.0);
  } else {
    FamilySpec sub{"block", std::move(names), std::move(nonscalar), tol};
    const TriangularForm tri = common_triangularize(sub);
    ContractionResult res = scaled_contraction(tri, K, r, tol);
    out.Y = std::move(res.Y);
    out.bound = res.bound;
  }

  const CMatrix Yinv = solve(out.Y, CMatrix::Identity(d, d), tol);
  for (const auto& M : members) {
    out.conjugated_norms.push_back(op_norm(out.Y * M * Yinv));
  }
  return out;
}

SimilarityCertificate joint_similarity(const FamilySpec& family) {
  family.validate();
  check_commuting(family, "joint_similarity");
  const ToleranceConfig& tol = family.tol;
  const Eigen::Index n = family.dim();
  const size_t m = family.members.size();

  std::vector<SpectralProfile> profiles;
  profiles.reserve(m);
  for (size_t k = 0; k < m; ++k) {
    profiles.push_back(spectral_profile(family.members[k], tol));
    if (!profiles.back().power_bound.is_power_bounded) {
      throw DomainViolationError("joint_similarity: member '" +
                                 family.member_names[k] + "' is not power bounded");
    }
  }

  SimilarityCertificate cert;
  cert.K = 0.0;
  for (const auto& T : family.members) cert.K = std::max(cert.K, op_norm(T));
  cert.r = 0.0;
  for (const auto& p : profiles) {
    for (Complex lambda : p.delta_set) cert.r = std::max(cert.r, std::abs(lambda));
  }
  const double Kc = std::max(cert.K, 1.0 + 1e-6);
  cert.K_clamped = Kc != cert.K;

  const Decomposition dec = decompose_family(family, profiles);
  cert.alpha = dec.alpha;

  std::vector<CMatrix> blocks;
  blocks.reserve(dec.parts.size());
  for (size_t i = 0; i < dec.parts.size(); ++i) {
    const CMatrix& B = dec.parts[i].basis;
    std::vector<CMatrix> restricted;
    restricted.reserve(m);
    for (size_t k = 0; k < m; ++k) restricted.push_back(restrict_to(family.members[k], B));
    blocks.push_back(similarize_block(restricted, dec.tags[i], cert.K, cert.r, tol).Y);
  }

  const CMatrix Z = direct_sum(blocks) * dec.assembly;
  const CMatrix Zinv = solve(Z, identity(n), tol);
  const double nz = op_norm(Z);
  const double nzi = op_norm(Zinv);
  cert.Y = std::sqrt(nzi / nz) * Z;

  // Independent re-check: fresh norms from Y alone.
  cert.norm_Y = op_norm(cert.Y);
  const CMatrix Yinv = solve(cert.Y, identity(n), tol);
  cert.norm_Yinv = op_norm(Yinv);
  cert.bound = cert.alpha *
               std::pow(static_cast<double>(n) * static_cast<double>(n) * Kc /
                            (1.0 - cert.r),
                        static_cast<double>(n - 1) / 2.0);
  cert.verified = true;
  for (size_t k = 0; k < m; ++k) {
    const double c = op_norm(cert.Y * family.members[k] * Yinv);
    cert.conjugated_norms.push_back(c);
    if (c > cert.worst_norm) {
      cert.worst_norm = c;
      cert.worst_member = family.member_names[k];
    }
    if (c > 1.0 + tol.tol_contraction) cert.verified = false;
  }
  return cert;
}

UniformFamilyReport uniform_family_report(const FamilySpec& family,
                                          const std::vector<SpectralProfile>& profiles) {
  if (family.members.size() != profiles.size()) {
    throw InvalidInputError("uniform_family_report: profile count mismatch");
  }
  UniformFamilyReport rep;
  bool all_certified = true;
  double kmax = 0.0;
  for (const auto& p : profiles) {
    if (p.power_bound.is_power_bounded && p.power_bound.constant_K) {
      kmax = std::max(kmax, *p.power_bound.constant_K);
    } else {
      all_certified = false;
    }
    for (Complex lambda : p.delta_set) {
      rep.delta_radius = std::max(rep.delta_radius, std::abs(lambda));
    }
    if (p.delta_value) {
      rep.delta_infimum = rep.delta_infimum
                              ? std::min(*rep.delta_infimum, *p.delta_value)
                              : *p.delta_value;
    }
  }
  if (all_certified) rep.uniform_K = kmax;
  rep.has_uniform_jordan =
      rep.delta_infimum.has_value() && *rep.delta_infimum > kUniformJordanThreshold;
  if (rep.uniform_K && rep.has_uniform_jordan) {
    rep.consistent = rep.delta_radius < 1.0;
  }
  return rep;
}

}  // namespace jointsim
