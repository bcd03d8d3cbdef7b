#pragma once

#include <utility>
#include <vector>

#include "jointsim/types.hpp"

namespace jointsim {

/// Result of a full singular value decomposition T = U * diag(S) * V^*.
struct SvdResult {
  CMatrix U;
  RVector S;  // descending
  CMatrix V;
};

/// Operator (spectral) norm: the largest singular value.
double op_norm(const CMatrix& T);

/// Block-diagonal direct sum of square blocks.
CMatrix direct_sum(const std::vector<CMatrix>& blocks);

/// Entrywise bracketing of the operator norm:
/// max|t_ij| <= ||T|| <= n^2 max|t_ij| for an n x n matrix.
std::pair<double, double> entrywise_norm_bounds(const CMatrix& T);

/// Full SVD with unitary factors.
SvdResult svd(const CMatrix& T);

/// Solve A X = B for square A; rejects numerically singular A.
CMatrix solve(const CMatrix& A, const CMatrix& B, const ToleranceConfig& tol);

/// Scaled commutation defect ||ST - TS|| / (1 + ||S|| ||T||).
double commutator_residual(const CMatrix& S, const CMatrix& T);

/// Smallest singular value.
double smallest_singular_value(const CMatrix& T);

/// Thin orthonormal basis for the column span of A (QR based); columns with
/// negligible contribution relative to tol_rank are dropped.
CMatrix orthonormalize(const CMatrix& A, const ToleranceConfig& tol);

/// Orthonormal basis of the numerical null space of A: right singular
/// vectors whose singular values are below max(tol_rank * sigma_max(A),
/// abs_floor). May have zero columns.
CMatrix null_space(const CMatrix& A, const ToleranceConfig& tol,
                   double abs_floor = 0.0);

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

}  // namespace jointsim
