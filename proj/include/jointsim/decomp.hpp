#pragma once

#include <vector>

#include "jointsim/spectra.hpp"
#include "jointsim/types.hpp"

namespace jointsim {

struct Subspace {
  CMatrix basis;  // n x d, orthonormal columns
  Eigen::Index dim() const { return basis.cols(); }
};

enum class TagKind { scalar, delta_spectrum };

/// How one family member acts on one part: as z * I, or with all of its
/// eigenvalues inside the member's Delta set.
struct PartTag {
  TagKind kind = TagKind::scalar;
  Complex z = 0.0;
};

struct Decomposition {
  std::vector<Subspace> parts;
  CMatrix assembly;    // X mapping a vector to its per-part coordinate tuple
  double alpha = 1.0;  // max(||X||, ||X^{-1}||)
  std::vector<std::vector<PartTag>> tags;  // tags[part][member]
};

/// Joint invariant-subspace decomposition for the one-member family {T},
/// built from the Jordan transform: one part collecting the generalized
/// eigenspaces of Delta(T), plus one scalar part per remaining eigenvalue.
Decomposition decompose_single(const CMatrix& T, const SpectralProfile& profile,
                               const ToleranceConfig& tol);

/// Family decomposition by iterative refinement: split any part on which a
/// member is neither scalar nor Delta-spectral, until every pair conforms.
Decomposition decompose_family(const FamilySpec& family);
Decomposition decompose_family(const FamilySpec& family,
                               const std::vector<SpectralProfile>& profiles);

/// Inverse of the horizontal concatenation of part bases, plus its
/// conditioning constant alpha.
std::pair<CMatrix, double> assembly_map(const std::vector<Subspace>& parts,
                                        const ToleranceConfig& tol);

}  // namespace jointsim
