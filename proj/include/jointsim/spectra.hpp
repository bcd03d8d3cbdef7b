#pragma once

#include <optional>
#include <vector>

#include "jointsim/matcore.hpp"
#include "jointsim/types.hpp"

namespace jointsim {

/// A group of computed eigenvalues merged at radius tol_cluster * (1 + ||T||).
struct EigenCluster {
  Complex value;  // cluster representative (mean of members)
  int algebraic_multiplicity = 0;
  std::vector<Complex> members;
};

/// Jordan block list plus the similarity bringing T to canonical form.
struct JordanStructure {
  struct Block {
    Complex eigenvalue;
    int size = 0;
  };
  std::vector<Block> blocks;  // sorted by eigenvalue (re, im) then size
  CMatrix transform;          // X with X T X^{-1} in Jordan canonical form
  double transform_cond = 1.0;  // ||X|| * ||X^{-1}||

  /// The block-diagonal canonical matrix this structure describes.
  CMatrix canonical_matrix() const;
};

enum class PowerBoundReason {
  certified,
  spectrum_exceeds_disc,
  boundary_jordan_block,
};

struct PowerBoundCertificate {
  bool is_power_bounded = false;
  std::optional<double> constant_K;
  PowerBoundReason reason = PowerBoundReason::certified;
};

/// Everything the analysis knows about one matrix.
struct SpectralProfile {
  std::vector<EigenCluster> spectrum;
  std::vector<Complex> delta_set;       // eigenvalues owning a block of size >= 2
  std::optional<double> delta_value;    // present iff delta_set non-empty
  JordanStructure jordan;
  PowerBoundCertificate power_bound;
};

struct PowerBoundCheckReport {
  bool pass = false;
  double worst_ratio = 0.0;  // max of checked quantity / allowed bound
  int worst_p = 0;
};

/// Schur eigenvalues merged by single linkage. Multiplicities sum to n.
std::vector<EigenCluster> eigen_clusters(const CMatrix& T, const ToleranceConfig& tol);

/// Raw (unclustered) eigenvalues via complex Schur form.
std::vector<Complex> eigenvalues(const CMatrix& T);

/// Orthonormal basis of the numerical kernel of (T - lambda I)^k, computed
/// incrementally: ker N^k = { x : N x in ker N^{k-1} }.
CMatrix generalized_kernel(const CMatrix& T, Complex lambda, int k,
                           const ToleranceConfig& tol);

/// Full Jordan analysis via Weyr staircases and top-down chain construction.
JordanStructure jordan_structure(const CMatrix& T, const ToleranceConfig& tol);

/// Eigenvalues owning a Jordan block of size >= 2.
std::vector<Complex> delta_set(const JordanStructure& js);

/// min over lambda in Delta of ||(T - lambda I) restricted to
/// ker(T - lambda I)^2||; absent when Delta is empty.
std::optional<double> delta_value(const CMatrix& T, const JordanStructure& js,
                                  const ToleranceConfig& tol);

/// Certify power boundedness from the Jordan data, with an explicit
/// finite constant when the certificate holds.
PowerBoundCertificate power_bound_certificate(const CMatrix& T,
                                              const JordanStructure& js,
                                              const ToleranceConfig& tol);

/// Convenience: full profile of one matrix.
SpectralProfile spectral_profile(const CMatrix& T, const ToleranceConfig& tol);

/// Sampled check of p |lambda|^{p-1} <= K / delta and ||T^p|| <= K for p <= p_max.
PowerBoundCheckReport verify_power_bound_inequality(const CMatrix& T,
                                                    const SpectralProfile& profile,
                                                    int p_max);

/// Checks Delta(T|_V) union Delta(T|_W) = Delta(T) for a T-invariant
/// splitting C^n = V + W given by orthonormal bases.
bool split_delta_check(const CMatrix& T, const CMatrix& V, const CMatrix& W,
                       const ToleranceConfig& tol);

/// Restriction of T to the span of the orthonormal basis B (assumed invariant).
inline CMatrix restrict_to(const CMatrix& T, const CMatrix& B) {
  return B.adjoint() * T * B;
}

/// Matched-set comparison at radius tol_cluster * (1 + scale).
bool values_within_cluster_tol(const std::vector<Complex>& a,
                               const std::vector<Complex>& b,
                               const ToleranceConfig& tol, double scale);

}  // namespace jointsim
