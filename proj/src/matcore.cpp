#include "jointsim/matcore.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace jointsim {

namespace {

void require_finite(const CMatrix& T, const char* who) {
  if (!T.allFinite()) {
    throw InvalidInputError(std::string(who) + ": non-finite entry in input");
  }
}

}  // namespace

double op_norm(const CMatrix& T) {
  require_finite(T, "op_norm");
  if (T.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> dec(T);
  return dec.singularValues()(0);
}

CMatrix direct_sum(const std::vector<CMatrix>& blocks) {
  if (blocks.empty()) throw InvalidInputError("direct_sum: empty block list");
  Eigen::Index n = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw InvalidInputError("direct_sum: non-square block");
    n += b.rows();
  }
  CMatrix out = CMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

std::pair<double, double> entrywise_norm_bounds(const CMatrix& T) {
  require_finite(T, "entrywise_norm_bounds");
  if (T.rows() != T.cols()) {
    throw InvalidInputError("entrywise_norm_bounds: matrix must be square");
  }
  const double m = T.cwiseAbs().maxCoeff();
  const double n = static_cast<double>(T.rows());
  return {m, n * n * m};
}

SvdResult svd(const CMatrix& T) {
  require_finite(T, "svd");
  Eigen::JacobiSVD<CMatrix> dec(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (dec.info() != Eigen::Success) {
    throw NumericalFailureError("svd: decomposition did not converge");
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

CMatrix solve(const CMatrix& A, const CMatrix& B, const ToleranceConfig& tol) {
  require_finite(A, "solve");
  require_finite(B, "solve");
  if (A.rows() != A.cols()) throw InvalidInputError("solve: A must be square");
  if (A.rows() != B.rows()) throw InvalidInputError("solve: size mismatch");
  Eigen::JacobiSVD<CMatrix> dec(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = dec.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smin <= tol.tol_rank * smax) {
    throw SingularMatrixError("solve: matrix is numerically singular", smin);
  }
  // X = V * S^{-1} * U^* * B
  CMatrix tmp = dec.matrixU().adjoint() * B;
  for (Eigen::Index i = 0; i < s.size(); ++i) tmp.row(i) /= s(i);
  return dec.matrixV() * tmp;
}

double commutator_residual(const CMatrix& S, const CMatrix& T) {
  if (S.rows() != S.cols() || T.rows() != T.cols() || S.rows() != T.rows()) {
    throw InvalidInputError("commutator_residual: size mismatch");
  }
  const CMatrix C = S * T - T * S;
  return op_norm(C) / (1.0 + op_norm(S) * op_norm(T));
}

double smallest_singular_value(const CMatrix& T) {
  require_finite(T, "smallest_singular_value");
  Eigen::JacobiSVD<CMatrix> dec(T);
  const RVector& s = dec.singularValues();
  return s(s.size() - 1);
}

CMatrix orthonormalize(const CMatrix& A, const ToleranceConfig& tol) {
  if (A.cols() == 0) return A;
  Eigen::JacobiSVD<CMatrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = dec.singularValues();
  const double cutoff = tol.tol_rank * (s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return dec.matrixU().leftCols(rank);
}

CMatrix null_space(const CMatrix& A, const ToleranceConfig& tol,
                   double abs_floor) {
  require_finite(A, "null_space");
  Eigen::JacobiSVD<CMatrix> dec(A, Eigen::ComputeFullV);
  const RVector& s = dec.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = std::max(tol.tol_rank * smax, abs_floor);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return dec.matrixV().rightCols(A.cols() - rank);
}

}  // namespace jointsim
