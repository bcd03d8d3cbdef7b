#pragma once

#include <stdexcept>
#include <string>

namespace jointsim {

/// Base class for every failure the library reports.
class AnalysisError : public std::runtime_error {
public:
  explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed arguments: size mismatches, non-finite entries, empty inputs.
class InvalidInputError : public AnalysisError {
public:
  using AnalysisError::AnalysisError;
};

/// An iterative kernel failed to converge or produced inconsistent data.
class NumericalFailureError : public AnalysisError {
public:
  NumericalFailureError(const std::string& what, int iterations = 0)
      : AnalysisError(what), iterations(iterations) {}
  int iterations;
};

/// Linear solve against a numerically singular matrix.
class SingularMatrixError : public AnalysisError {
public:
  SingularMatrixError(const std::string& what, double smallest_singular_value)
      : AnalysisError(what), smallest_singular_value(smallest_singular_value) {}
  double smallest_singular_value;
};

/// Eigenvalue clusters too close to resolve a Jordan structure, or a
/// refinement loop that stalls. The caller may coarsen tol_cluster.
class IllPosedStructureError : public AnalysisError {
public:
  using AnalysisError::AnalysisError;
};

/// A family fails the pairwise commutation test.
class CommutativityViolationError : public AnalysisError {
public:
  CommutativityViolationError(const std::string& what, std::string name_a,
                              std::string name_b, double residual)
      : AnalysisError(what),
        name_a(std::move(name_a)),
        name_b(std::move(name_b)),
        residual(residual) {}
  std::string name_a;
  std::string name_b;
  double residual;
};

/// Spectral hypotheses violated: spectrum outside the closed disc,
/// radius parameter >= 1, or a member that is not power bounded.
class DomainViolationError : public AnalysisError {
public:
  using AnalysisError::AnalysisError;
};

/// The concatenated part bases fail the direct-sum rank test.
class DegenerateDecompositionError : public AnalysisError {
public:
  using AnalysisError::AnalysisError;
};

/// A produced similarity failed its independent contraction re-check.
class VerificationFailureError : public AnalysisError {
public:
  VerificationFailureError(const std::string& what, std::string worst_member,
                           double worst_norm)
      : AnalysisError(what),
        worst_member(std::move(worst_member)),
        worst_norm(worst_norm) {}
  std::string worst_member;
  double worst_norm;
};

}  // namespace jointsim
