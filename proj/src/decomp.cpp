#include "jointsim/decomp.hpp"

#include <algorithm>
#include <cmath>

namespace jointsim {

namespace {

// Part bases of the single-matrix decomposition, in the coordinate space of T.
std::vector<CMatrix> single_part_bases(const CMatrix& T, const JordanStructure& js,
                                       const ToleranceConfig& tol) {
  const Eigen::Index n = T.rows();
  const std::vector<Complex> delta = delta_set(js);
  const CMatrix chains = solve(js.transform, identity(n), tol);  // X^{-1}, chain columns

  auto in_delta = [&](Complex v) {
    return std::find(delta.begin(), delta.end(), v) != delta.end();
  };

  // Distinct eigenvalues outside Delta, in block order.
  std::vector<Complex> scalar_values;
  for (const auto& b : js.blocks) {
    if (!in_delta(b.eigenvalue) &&
        std::find(scalar_values.begin(), scalar_values.end(), b.eigenvalue) ==
            scalar_values.end()) {
      scalar_values.push_back(b.eigenvalue);
    }
  }

  if (delta.empty() && scalar_values.size() <= 1) {
    return {identity(n)};  // T = z I already
  }
  if (scalar_values.empty()) {
    return {identity(n)};  // sigma(T) = Delta(T): the whole space is one part
  }

  std::vector<CMatrix> bases;
  auto collect = [&](auto&& pred) {
    std::vector<Eigen::Index> cols;
    Eigen::Index at = 0;
    for (const auto& b : js.blocks) {
      if (pred(b.eigenvalue)) {
        for (int i = 0; i < b.size; ++i) cols.push_back(at + i);
      }
      at += b.size;
    }
    CMatrix raw(n, static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) raw.col(i) = chains.col(cols[i]);
    CMatrix B = orthonormalize(raw, tol);
    if (B.cols() != raw.cols()) {
      throw IllPosedStructureError("decompose_single: part basis lost rank");
    }
    bases.push_back(std::move(B));
  };

  if (!delta.empty()) collect(in_delta);
  for (Complex z : scalar_values) {
    collect([&](Complex v) { return v == z; });
  }
  return bases;
}

PartTag tag_for(const CMatrix& T, const CMatrix& B, const std::vector<Complex>& delta,
                const ToleranceConfig& tol, double normT) {
  const Eigen::Index d = B.cols();
  const CMatrix R = restrict_to(T, B);
  const Complex z = R.trace() / static_cast<double>(d);
  const double scalar_resid = op_norm(T * B - z * B);
  if (scalar_resid <= tol.tol_commute * normT * std::sqrt(static_cast<double>(d)) ||
      normT == 0.0) {
    return {TagKind::scalar, z};
  }
  // Delta tag: every restriction eigenvalue near some Delta(T) value.
  const double radius = tol.tol_cluster * (1.0 + normT);
  bool contained = true;
  for (Complex e : eigenvalues(R)) {
    bool hit = false;
    for (Complex v : delta) hit = hit || std::abs(e - v) <= radius;
    contained = contained && hit;
  }
  if (contained) return {TagKind::delta_spectrum, 0.0};
  throw IllPosedStructureError(
      "decomposition: a (part, member) pair fits neither the scalar nor the "
      "Delta-spectrum tag within tolerance");
}

}  // namespace

std::pair<CMatrix, double> assembly_map(const std::vector<Subspace>& parts,
                                        const ToleranceConfig& tol) {
  if (parts.empty()) throw InvalidInputError("assembly_map: no parts");
  const Eigen::Index n = parts.front().basis.rows();
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.dim();
  if (total != n) throw InvalidInputError("assembly_map: part dimensions do not sum to n");

  CMatrix M(n, n);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    M.middleCols(at, p.dim()) = p.basis;
    at += p.dim();
  }
  const double smin = smallest_singular_value(M);
  if (smin <= tol.tol_rank * op_norm(M)) {
    throw DegenerateDecompositionError(
        "assembly_map: concatenated part bases are numerically singular");
  }
  CMatrix X = solve(M, identity(n), tol);
  const double alpha = std::max(op_norm(X), op_norm(M));
  return {std::move(X), alpha};
}

Decomposition decompose_single(const CMatrix& T, const SpectralProfile& profile,
                               const ToleranceConfig& tol) {
  for (const auto& c : profile.spectrum) {
    if (std::abs(c.value) > 1.0 + tol.tol_spectrum) {
      throw DomainViolationError("decompose_single: spectrum outside the closed unit disc");
    }
  }
  Decomposition d;
  const double normT = op_norm(T);
  for (auto& B : single_part_bases(T, profile.jordan, tol)) {
    d.parts.push_back({std::move(B)});
  }
  d.tags.resize(d.parts.size());
  for (size_t i = 0; i < d.parts.size(); ++i) {
    d.tags[i].push_back(tag_for(T, d.parts[i].basis, profile.delta_set, tol, normT));
  }
  auto [X, alpha] = assembly_map(d.parts, tol);
  d.assembly = std::move(X);
  d.alpha = alpha;
  return d;
}

Decomposition decompose_family(const FamilySpec& family) {
  family.validate();
  std::vector<SpectralProfile> profiles;
  profiles.reserve(family.members.size());
  for (const auto& T : family.members) {
    profiles.push_back(spectral_profile(T, family.tol));
  }
  return decompose_family(family, profiles);
}

Decomposition decompose_family(const FamilySpec& family,
                               const std::vector<SpectralProfile>& profiles) {
  family.validate();
  const ToleranceConfig& tol = family.tol;
  const Eigen::Index n = family.dim();
  const size_t m = family.members.size();

  // Commutativity gate.
  {
    double worst = 0.0;
    size_t wa = 0, wb = 0;
    for (size_t a = 0; a < m; ++a) {
      for (size_t b = a + 1; b < m; ++b) {
        const double res = commutator_residual(family.members[a], family.members[b]);
        if (res > worst) {
          worst = res;
          wa = a;
          wb = b;
        }
      }
    }
    if (worst > tol.tol_commute) {
      throw CommutativityViolationError("decompose_family: family does not commute",
                                        family.member_names[wa],
                                        family.member_names[wb], worst);
    }
  }

  std::vector<double> norms(m);
  for (size_t k = 0; k < m; ++k) {
    norms[k] = op_norm(family.members[k]);
    for (const auto& c : profiles[k].spectrum) {
      if (std::abs(c.value) > 1.0 + tol.tol_spectrum) {
        throw DomainViolationError(
            "decompose_family: member '" + family.member_names[k] +
            "' has spectrum outside the closed unit disc");
      }
    }
  }

  std::vector<CMatrix> parts{identity(n)};
  bool changed = true;
  Eigen::Index splits = 0;
  while (changed) {
    changed = false;
    for (size_t k = 0; k < m && !changed; ++k) {
      const CMatrix& T = family.members[k];
      const double radius = tol.tol_cluster * (1.0 + norms[k]);
      for (size_t i = 0; i < parts.size() && !changed; ++i) {
        const CMatrix& B = parts[i];
        const Eigen::Index d = B.cols();
        const CMatrix R = restrict_to(T, B);
        const Complex z = R.trace() / static_cast<double>(d);
        if (op_norm(T * B - z * B) <=
            tol.tol_commute * norms[k] * std::sqrt(static_cast<double>(d))) {
          continue;
        }
        bool all_in_delta = true;
        for (Complex e : eigenvalues(R)) {
          bool hit = false;
          for (Complex v : profiles[k].delta_set) hit = hit || std::abs(e - v) <= radius;
          all_in_delta = all_in_delta && hit;
        }
        if (all_in_delta) continue;

        // Split this part via the single-matrix decomposition of T|_V.
        const SpectralProfile rp = spectral_profile(R, tol);
        const std::vector<CMatrix> sub = single_part_bases(R, rp.jordan, tol);
        if (sub.size() <= 1) {
          throw IllPosedStructureError(
              "decompose_family: refinement stalled, condition (c) not "
              "achievable within tolerance");
        }
        std::vector<CMatrix> lifted;
        for (const auto& S : sub) {
          CMatrix L = orthonormalize(B * S, tol);
          if (L.cols() != S.cols()) {
            throw IllPosedStructureError("decompose_family: lifted part lost rank");
          }
          lifted.push_back(std::move(L));
        }
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
        parts.insert(parts.begin() + static_cast<std::ptrdiff_t>(i),
                     lifted.begin(), lifted.end());
        if (++splits >= n) {
          throw IllPosedStructureError("decompose_family: split budget exceeded");
        }
        changed = true;
      }
    }
  }

  // Invariance re-check for every (part, member) pair.
  for (const auto& B : parts) {
    const CMatrix P = identity(n) - B * B.adjoint();
    for (size_t k = 0; k < m; ++k) {
      if (op_norm(P * (family.members[k] * B)) > tol.tol_commute * (1.0 + norms[k])) {
        throw IllPosedStructureError("decompose_family: part lost invariance");
      }
    }
  }

  Decomposition out;
  for (auto& B : parts) out.parts.push_back({std::move(B)});
  out.tags.resize(out.parts.size());
  for (size_t i = 0; i < out.parts.size(); ++i) {
    for (size_t k = 0; k < m; ++k) {
      out.tags[i].push_back(tag_for(family.members[k], out.parts[i].basis,
                                    profiles[k].delta_set, tol, norms[k]));
    }
  }
  auto [X, alpha] = assembly_map(out.parts, tol);
  out.assembly = std::move(X);
  out.alpha = alpha;
  return out;
}

}  // namespace jointsim
