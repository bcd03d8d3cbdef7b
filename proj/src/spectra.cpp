#include "jointsim/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace jointsim {

namespace {

double cluster_radius(const ToleranceConfig& tol, double norm_scale) {
  return tol.tol_cluster * (1.0 + norm_scale);
}

double kernel_floor(const CMatrix& T, const ToleranceConfig& tol) {
  return tol.tol_rank * (1.0 + op_norm(T));
}

bool block_order(const JordanStructure::Block& a, const JordanStructure::Block& b) {
  if (a.eigenvalue.real() != b.eigenvalue.real())
    return a.eigenvalue.real() < b.eigenvalue.real();
  if (a.eigenvalue.imag() != b.eigenvalue.imag())
    return a.eigenvalue.imag() < b.eigenvalue.imag();
  return a.size < b.size;
}

// Upper bound on sup_p ||J_r(lambda)^p|| for |lambda| < 1, by direct scan of
// the block powers. The scan range covers the maximizers of every binomial
// term C(p,j) |lambda|^{p-j}; past it the entrywise bounds are decreasing.
double block_power_supremum(Complex lambda, int r) {
  const double a = std::abs(lambda);
  if (r == 1) return std::min(a, 1.0);
  if (a == 0.0) return 1.0;  // nilpotent shift: ||N^p|| is 1 then 0
  const double p_star = -1.0 / std::log(a);
  const long p_hi_exact =
      std::min<long>(static_cast<long>(std::ceil((r - 1) * p_star)) + r + 10, 200000);
  CMatrix J = CMatrix::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    J(i, i) = lambda;
    if (i + 1 < r) J(i, i + 1) = 1.0;
  }
  CMatrix P = J;
  double best = op_norm(P);
  for (long p = 2; p <= p_hi_exact; ++p) {
    P = P * J;
    best = std::max(best, op_norm(P));
  }
  if (p_hi_exact < 200000) return best;
  // Eigenvalue extremely close to the boundary: fall back to the sum over j
  // of the maxima of the binomial terms C(p,j) |lambda|^{p-j}, a coarser but
  // still finite upper bound (each term is unimodal with peak near j * p_star).
  double total = a;
  for (int j = 1; j < r; ++j) {
    const double pj = std::max<double>(j, j * p_star);
    double term_best = 0.0;
    for (long p = std::max<long>(j, static_cast<long>(pj) - 2);
         p <= static_cast<long>(pj) + 2; ++p) {
      double logterm = (p - j) * std::log(a);
      for (long i = 0; i < j; ++i) logterm += std::log(static_cast<double>(p - i));
      logterm -= std::lgamma(j + 1.0);
      term_best = std::max(term_best, std::exp(logterm));
    }
    total += term_best;
  }
  return std::max(best, total);
}

}  // namespace

std::vector<Complex> eigenvalues(const CMatrix& T) {
  if (T.rows() != T.cols()) throw InvalidInputError("eigenvalues: matrix must be square");
  if (!T.allFinite()) throw InvalidInputError("eigenvalues: non-finite entry");
  Eigen::ComplexSchur<CMatrix> schur(T, /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    throw NumericalFailureError("eigenvalues: Schur iteration did not converge",
                                static_cast<int>(T.rows()) * 40);
  }
  std::vector<Complex> out(T.rows());
  for (Eigen::Index i = 0; i < T.rows(); ++i) out[i] = schur.matrixT()(i, i);
  return out;
}

std::vector<EigenCluster> eigen_clusters(const CMatrix& T, const ToleranceConfig& tol) {
  const std::vector<Complex> vals = eigenvalues(T);
  const double radius = cluster_radius(tol, op_norm(T));
  const int n = static_cast<int>(vals.size());

  // Single-linkage merge via union-find.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(vals[i] - vals[j]) <= radius) parent[find(i)] = find(j);

  std::vector<EigenCluster> clusters;
  std::vector<int> root_index(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_index[r] < 0) {
      root_index[r] = static_cast<int>(clusters.size());
      clusters.push_back({});
    }
    clusters[root_index[r]].members.push_back(vals[i]);
  }
  for (auto& c : clusters) {
    c.algebraic_multiplicity = static_cast<int>(c.members.size());
    Complex sum = 0.0;
    for (Complex v : c.members) sum += v;
    c.value = sum / static_cast<double>(c.members.size());
  }
  std::sort(clusters.begin(), clusters.end(), [](const EigenCluster& a, const EigenCluster& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return clusters;
}

CMatrix generalized_kernel(const CMatrix& T, Complex lambda, int k,
                           const ToleranceConfig& tol) {
  if (T.rows() != T.cols()) throw InvalidInputError("generalized_kernel: square input required");
  if (k < 1) throw InvalidInputError("generalized_kernel: k must be positive");
  const Eigen::Index n = T.rows();
  const CMatrix N = T - lambda * identity(n);
  const double floor = kernel_floor(T, tol);
  CMatrix B = null_space(N, tol, floor);
  for (int j = 2; j <= k; ++j) {
    if (B.cols() == n) break;
    const CMatrix M = (identity(n) - B * B.adjoint()) * N;
    CMatrix next = null_space(M, tol, floor);
    if (next.cols() < B.cols()) {
      // Kernel dimensions are non-decreasing by construction; a drop means
      // the rank thresholds are inconsistent for this input.
      throw NumericalFailureError("generalized_kernel: kernel dimension decreased", j);
    }
    B = std::move(next);
  }
  return B;
}

CMatrix JordanStructure::canonical_matrix() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.size;
  CMatrix J = CMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.size; ++i) {
      J(at + i, at + i) = b.eigenvalue;
      if (i + 1 < b.size) J(at + i, at + i + 1) = 1.0;
    }
    at += b.size;
  }
  return J;
}

JordanStructure jordan_structure(const CMatrix& T, const ToleranceConfig& tol) {
  if (T.rows() != T.cols()) throw InvalidInputError("jordan_structure: square input required");
  const Eigen::Index n = T.rows();
  const double normT = op_norm(T);
  const double radius = cluster_radius(tol, normT);
  std::vector<EigenCluster> clusters = eigen_clusters(T, tol);

  // Clusters whose representatives sit within twice the clustering radius
  // cannot be told apart at this tolerance: treat them as one eigenvalue.
  // Iterate because merging moves the representatives.
  for (bool merged = true; merged;) {
    merged = false;
    for (size_t i = 0; i < clusters.size() && !merged; ++i) {
      for (size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        if (std::abs(clusters[i].value - clusters[j].value) <= 2.0 * radius) {
          auto& a = clusters[i];
          const auto& b = clusters[j];
          a.members.insert(a.members.end(), b.members.begin(), b.members.end());
          a.algebraic_multiplicity = static_cast<int>(a.members.size());
          Complex sum = 0.0;
          for (Complex v : a.members) sum += v;
          a.value = sum / static_cast<double>(a.members.size());
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }

  struct Chain {
    std::vector<CVector> top_down;  // top vector first, then N * previous
  };

  std::vector<std::pair<JordanStructure::Block, std::vector<CVector>>> all_chains;
  const double floor = kernel_floor(T, tol);

  for (const auto& cluster : clusters) {
    const Complex lambda = cluster.value;
    const int mult = cluster.algebraic_multiplicity;
    const CMatrix N = T - lambda * identity(n);

    // Weyr staircase: dims[k] = dim ker N^{k+1}.
    std::vector<CMatrix> kernels;
    std::vector<int> dims;
    {
      CMatrix B = null_space(N, tol, floor);
      while (true) {
        kernels.push_back(B);
        dims.push_back(static_cast<int>(B.cols()));
        if (dims.back() >= mult || static_cast<int>(dims.size()) > n) break;
        const CMatrix M = (identity(n) - B * B.adjoint()) * N;
        CMatrix next = null_space(M, tol, floor);
        if (next.cols() <= B.cols()) {
          throw NumericalFailureError(
              "jordan_structure: Weyr staircase stalled below the algebraic "
              "multiplicity",
              static_cast<int>(dims.size()));
        }
        B = std::move(next);
      }
      if (dims.back() != mult) {
        throw NumericalFailureError(
            "jordan_structure: generalized kernel dimension does not match the "
            "algebraic multiplicity",
            static_cast<int>(dims.size()));
      }
    }
    const int maxk = static_cast<int>(dims.size());
    auto weyr = [&](int k) {  // blocks of size >= k, 1-based
      if (k < 1 || k > maxk) return 0;
      return dims[k - 1] - (k >= 2 ? dims[k - 2] : 0);
    };

    // Top-down chain construction: pick new chain tops in ker N^l that are
    // independent of ker N^{l-1} and of the vectors mapped down from longer
    // chains, then map everything down one level by N.
    std::vector<Chain> chains;
    for (int level = maxk; level >= 1; --level) {
      for (auto& c : chains) c.top_down.push_back(N * c.top_down.back());
      const int wanted = weyr(level) - weyr(level + 1);
      if (wanted > 0) {
        std::vector<CVector> occupied;
        for (const auto& c : chains) occupied.push_back(c.top_down.back());
        const Eigen::Index base_cols = (level >= 2 ? kernels[level - 2].cols() : 0) +
                                       static_cast<Eigen::Index>(occupied.size());
        CMatrix S(n, base_cols);
        Eigen::Index at = 0;
        if (level >= 2) {
          S.leftCols(kernels[level - 2].cols()) = kernels[level - 2];
          at = kernels[level - 2].cols();
        }
        for (const auto& v : occupied) S.col(at++) = v;
        const CMatrix Q = orthonormalize(S, tol);
        CMatrix C = kernels[level - 1];
        if (Q.cols() > 0) C -= Q * (Q.adjoint() * C);
        Eigen::JacobiSVD<CMatrix> dec(C, Eigen::ComputeThinU);
        if (dec.singularValues().size() < wanted ||
            dec.singularValues()(wanted - 1) <= tol.tol_rank * (1.0 + normT)) {
          throw NumericalFailureError("jordan_structure: chain completion failed",
                                      level);
        }
        for (int t = 0; t < wanted; ++t) {
          Chain c;
          c.top_down.push_back(dec.matrixU().col(t));
          chains.push_back(std::move(c));
        }
      }
    }

    for (auto& c : chains) {
      // Uniform chain scaling keeps the canonical superdiagonal at 1;
      // normalize so the eigenvector (last vector) has unit norm.
      const double scale = c.top_down.back().norm();
      if (scale > 0) {
        for (auto& v : c.top_down) v /= scale;
      }
      JordanStructure::Block blk{lambda, static_cast<int>(c.top_down.size())};
      all_chains.emplace_back(blk, std::move(c.top_down));
    }
  }

  std::sort(all_chains.begin(), all_chains.end(),
            [](const auto& a, const auto& b) { return block_order(a.first, b.first); });

  JordanStructure js;
  CMatrix C(n, n);
  Eigen::Index col = 0;
  for (const auto& [blk, vecs] : all_chains) {
    js.blocks.push_back(blk);
    // Chain stored top first; canonical column order is bottom (eigenvector)
    // first so that T C = C J with the 1s on the superdiagonal.
    for (auto it = vecs.rbegin(); it != vecs.rend(); ++it) C.col(col++) = *it;
  }
  try {
    js.transform = solve(C, identity(n), tol);
  } catch (const SingularMatrixError&) {
    throw NumericalFailureError("jordan_structure: chain matrix numerically singular");
  }
  js.transform_cond = op_norm(C) * op_norm(js.transform);
  return js;
}

std::vector<Complex> delta_set(const JordanStructure& js) {
  std::vector<Complex> out;
  for (const auto& b : js.blocks) {
    if (b.size >= 2) {
      bool seen = false;
      for (Complex v : out) {
        if (v == b.eigenvalue) {
          seen = true;
          break;
        }
      }
      if (!seen) out.push_back(b.eigenvalue);
    }
  }
  return out;
}

std::optional<double> delta_value(const CMatrix& T, const JordanStructure& js,
                                  const ToleranceConfig& tol) {
  const std::vector<Complex> delta = delta_set(js);
  if (delta.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  for (Complex lambda : delta) {
    const CMatrix B = generalized_kernel(T, lambda, 2, tol);
    const CMatrix restricted = (T - lambda * identity(T.rows())) * B;
    best = std::min(best, op_norm(restricted));
  }
  return best;
}

PowerBoundCertificate power_bound_certificate(const CMatrix& T,
                                              const JordanStructure& js,
                                              const ToleranceConfig& tol) {
  (void)T;
  PowerBoundCertificate cert;
  for (const auto& b : js.blocks) {
    if (std::abs(b.eigenvalue) > 1.0 + tol.tol_spectrum) {
      cert.is_power_bounded = false;
      cert.reason = PowerBoundReason::spectrum_exceeds_disc;
      return cert;
    }
  }
  for (const auto& b : js.blocks) {
    if (b.size >= 2 && std::abs(b.eigenvalue) >= 1.0 - tol.tol_spectrum) {
      cert.is_power_bounded = false;
      cert.reason = PowerBoundReason::boundary_jordan_block;
      return cert;
    }
  }
  double block_max = 0.0;
  for (const auto& b : js.blocks) {
    block_max = std::max(block_max, block_power_supremum(b.eigenvalue, b.size));
  }
  cert.is_power_bounded = true;
  cert.reason = PowerBoundReason::certified;
  cert.constant_K = std::max(1.0, js.transform_cond * block_max);
  return cert;
}

SpectralProfile spectral_profile(const CMatrix& T, const ToleranceConfig& tol) {
  SpectralProfile p;
  p.spectrum = eigen_clusters(T, tol);
  p.jordan = jordan_structure(T, tol);
  p.delta_set = delta_set(p.jordan);
  p.delta_value = delta_value(T, p.jordan, tol);
  p.power_bound = power_bound_certificate(T, p.jordan, tol);
  return p;
}

PowerBoundCheckReport verify_power_bound_inequality(const CMatrix& T,
                                                    const SpectralProfile& profile,
                                                    int p_max) {
  PowerBoundCheckReport report;
  if (!profile.power_bound.is_power_bounded || !profile.power_bound.constant_K) {
    throw InvalidInputError("verify_power_bound_inequality: profile not certified");
  }
  const double K = *profile.power_bound.constant_K;
  const double slack = 1.0 + 1e-8;
  report.pass = true;
  CMatrix P = identity(T.rows());
  for (int p = 1; p <= p_max; ++p) {
    P = P * T;
    const double ratio = op_norm(P) / K;
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_p = p;
    }
    if (ratio > slack) report.pass = false;
  }
  if (!profile.delta_set.empty()) {
    const double delta = profile.delta_value.value();
    const double allowed = K / delta;
    for (Complex lambda : profile.delta_set) {
      const double a = std::abs(lambda);
      for (int p = 1; p <= p_max; ++p) {
        const double q = p * std::pow(a, p - 1);
        const double ratio = q / allowed;
        if (ratio > report.worst_ratio) {
          report.worst_ratio = ratio;
          report.worst_p = p;
        }
        if (ratio > slack) report.pass = false;
      }
    }
  }
  return report;
}

bool values_within_cluster_tol(const std::vector<Complex>& a,
                               const std::vector<Complex>& b,
                               const ToleranceConfig& tol, double scale) {
  const double radius = cluster_radius(tol, scale);
  auto covered = [&](const std::vector<Complex>& xs, const std::vector<Complex>& ys) {
    for (Complex x : xs) {
      bool hit = false;
      for (Complex y : ys) {
        if (std::abs(x - y) <= radius) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

bool split_delta_check(const CMatrix& T, const CMatrix& V, const CMatrix& W,
                       const ToleranceConfig& tol) {
  const Eigen::Index n = T.rows();
  if (V.rows() != n || W.rows() != n || V.cols() + W.cols() != n) {
    throw InvalidInputError("split_delta_check: dimensions do not split the space");
  }
  const double normT = op_norm(T);
  auto invariance_defect = [&](const CMatrix& B) {
    return op_norm((identity(n) - B * B.adjoint()) * (T * B));
  };
  if (invariance_defect(V) > tol.tol_commute * (1.0 + normT) ||
      invariance_defect(W) > tol.tol_commute * (1.0 + normT)) {
    throw InvalidInputError("split_delta_check: subspace not invariant for T");
  }
  CMatrix concat(n, n);
  concat << V, W;
  if (smallest_singular_value(concat) <= tol.tol_rank * op_norm(concat)) {
    throw InvalidInputError("split_delta_check: V and W do not form a direct sum");
  }
  const auto dv = delta_set(jordan_structure(restrict_to(T, V), tol));
  const auto dw = delta_set(jordan_structure(restrict_to(T, W), tol));
  const auto dt = delta_set(jordan_structure(T, tol));
  std::vector<Complex> uni = dv;
  uni.insert(uni.end(), dw.begin(), dw.end());
  return values_within_cluster_tol(uni, dt, tol, normT);
}

}  // namespace jointsim
