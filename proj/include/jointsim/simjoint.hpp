#pragma once

#include <optional>
#include <vector>

#include "jointsim/decomp.hpp"
#include "jointsim/spectra.hpp"
#include "jointsim/types.hpp"

namespace jointsim {

/// One unitary U with U T_k U^* upper triangular for every member.
struct TriangularForm {
  CMatrix U;
  std::vector<CMatrix> triangulars;  // strict lower part exactly zero
};

/// The diagonal scaling of the strict-contraction construction.
struct ScalingPlan {
  double epsilon = 0.0;  // (1 - r) / (n^2 K)
  CMatrix X;             // diag(1, eps^{-1}, ..., eps^{-(n-1)})
  double K = 0.0;
  double r = 0.0;
};

struct SimilarityCertificate {
  CMatrix Y;
  double norm_Y = 0.0;
  double norm_Yinv = 0.0;
  double bound = 0.0;  // alpha * (n^2 K / (1 - r))^((n-1)/2)
  std::vector<double> conjugated_norms;  // per member, independently recomputed
  double K = 0.0;      // max ||T|| over the family
  double r = 0.0;      // max |lambda| over all Delta sets (0 when all empty)
  double alpha = 1.0;
  bool K_clamped = false;  // K raised to 1 + 1e-6 for the K > 1 hypothesis
  bool verified = false;   // every conjugated norm <= 1 + tol_contraction
  std::string worst_member;
  double worst_norm = 0.0;
};

struct UniformFamilyReport {
  std::optional<double> uniform_K;
  std::optional<double> delta_infimum;  // min delta(T) over members with Delta != {}
  double delta_radius = 0.0;            // sup over members of max |lambda| in Delta(T)
  bool has_uniform_jordan = false;
  bool consistent = true;  // delta_radius < 1 whenever both uniformity hypotheses hold
};

/// Threshold on delta_infimum declaring the uniform Jordan property.
inline constexpr double kUniformJordanThreshold = 1e-6;

/// Simultaneous unitary triangularization by common-eigenvector deflation.
TriangularForm common_triangularize(const FamilySpec& family);

struct ContractionResult {
  CMatrix Y;
  double bound = 0.0;
  std::vector<double> conjugated_norms;
};

/// Diagonal-scaling similarity making every triangularized member a
/// contraction, with ||Y|| = ||Y^{-1}|| = ((n^2 K)/(1-r))^((n-1)/2).
ContractionResult scaled_contraction(const TriangularForm& tri, double K, double r,
                                     const ToleranceConfig& tol);

/// Block-level joint similarity: scalar members pass through untouched,
/// the rest go through triangularization plus scaling.
ContractionResult similarize_block(const std::vector<CMatrix>& members,
                                   const std::vector<PartTag>& tags, double K,
                                   double r, const ToleranceConfig& tol);

/// Full pipeline: decomposition, per-part similarity, assembly, balancing.
/// The returned certificate carries verified=false (never throws for that)
/// when the final independent contraction re-check fails.
SimilarityCertificate joint_similarity(const FamilySpec& family);

/// Uniformity diagnostics across profiled members.
UniformFamilyReport uniform_family_report(const FamilySpec& family,
                                          const std::vector<SpectralProfile>& profiles);

}  // namespace jointsim
