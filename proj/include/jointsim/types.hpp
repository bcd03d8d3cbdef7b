#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "jointsim/errors.hpp"

namespace jointsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Tolerances governing every rank, clustering and commutativity decision.
/// All thresholds are relative to the norm of the matrix at hand; see the
/// call sites for the exact scaling.
struct ToleranceConfig {
  double tol_rank = 0.0;          // singular values below tol_rank * sigma_max count as zero
  double tol_commute = 1e-8;      // commutator residual threshold
  double tol_cluster = 1e-4;      // eigenvalue grouping radius, scaled by (1 + ||T||)
  double tol_contraction = 1e-8;  // slack on conjugated norms <= 1
  double tol_spectrum = 1e-8;     // slack on |lambda| <= 1 tests

  static ToleranceConfig defaults(Eigen::Index n) {
    ToleranceConfig tol;
    tol.tol_rank = 1e-9 * static_cast<double>(n);
    return tol;
  }

  void validate() const {
    if (tol_rank < 0 || tol_commute < 0 || tol_cluster < 0 ||
        tol_contraction < 0 || tol_spectrum < 0) {
      throw InvalidInputError("tolerances must be nonnegative");
    }
    if (tol_cluster < tol_rank) {
      throw InvalidInputError(
          "tol_cluster must be at least tol_rank (clustering cannot be finer "
          "than rank resolution)");
    }
  }
};

/// A named finite family of commuting candidates plus its tolerance policy.
struct FamilySpec {
  std::string name;
  std::vector<std::string> member_names;
  std::vector<CMatrix> members;
  ToleranceConfig tol;

  Eigen::Index dim() const {
    return members.empty() ? 0 : members.front().rows();
  }

  void validate() const {
    if (members.empty()) throw InvalidInputError("family has no members");
    if (member_names.size() != members.size()) {
      throw InvalidInputError("member name count does not match member count");
    }
    const Eigen::Index n = members.front().rows();
    for (const auto& m : members) {
      if (m.rows() != n || m.cols() != n) {
        throw InvalidInputError("all family members must be square of equal size");
      }
      if (!m.allFinite()) throw InvalidInputError("non-finite entry in family member");
    }
    tol.validate();
  }
};

}  // namespace jointsim
