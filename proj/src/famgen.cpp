#include "jointsim/famgen.hpp"

#include <Eigen/QR>
#include <cmath>
#include <random>

namespace jointsim {

namespace {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }
  double gaussian() {  // Box-Muller, engine-stable across platforms
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  Complex cgaussian() { return {gaussian(), gaussian()}; }

  CMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = cgaussian();
    return A;
  }

  CMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }

  /// Invertible conjugator with condition number drawn log-uniformly in
  /// [1, cond_cap]: product of two random unitaries and a pinned diagonal.
  CMatrix conjugator(Eigen::Index n, double cond_cap) {
    const double cond = std::exp(uniform(0.0, std::log(std::max(cond_cap, 1.0))));
    RVector d(n);
    const double hi = std::sqrt(cond), lo = 1.0 / std::sqrt(cond);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(uniform(std::log(lo), std::log(hi)));
    if (n >= 2) {
      d(0) = hi;
      d(n - 1) = lo;
    }
    return unitary(n) * d.cast<Complex>().asDiagonal() * unitary(n);
  }

  /// Point in the closed disc of the given radius.
  Complex disc_point(double radius) {
    while (true) {
      const Complex z{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
      if (std::abs(z) <= 1.0) return radius * z;
    }
  }

  /// k points in the disc with pairwise separation at least sep.
  std::vector<Complex> separated_disc_points(int k, double radius, double sep) {
    std::vector<Complex> pts;
    int guard = 0;
    while (static_cast<int>(pts.size()) < k) {
      const Complex z = disc_point(radius);
      bool ok = true;
      for (Complex p : pts) ok = ok && std::abs(z - p) >= sep;
      if (ok) pts.push_back(z);
      if (++guard > 100000) {
        throw NumericalFailureError("famgen: could not place separated eigenvalues");
      }
    }
    return pts;
  }

private:
  std::mt19937_64 engine_;
};

double spectral_radius(const CMatrix& T) {
  double r = 0.0;
  for (Complex v : eigenvalues(T)) r = std::max(r, std::abs(v));
  return r;
}

/// Cluster representatives must stay separated for the Jordan analysis to be
/// well posed; generation redraws until they are.
/// Distinct planted eigenvalues must stay separated relative to the member
/// norm, with margin to spare: restrictions to invariant subspaces shrink the
/// norm (and with it the cluster radius), so values merged at the full scale
/// could reappear as distinct-but-unresolvable clusters on a part.
bool anchors_well_separated(const std::vector<Complex>& values, double norm,
                            const ToleranceConfig& tol) {
  const double need = 8.0 * tol.tol_cluster * (1.0 + norm);
  for (size_t i = 0; i < values.size(); ++i) {
    for (size_t j = i + 1; j < values.size(); ++j) {
      if (values[i] == values[j]) continue;  // deliberately reused eigenvalue
      if (std::abs(values[i] - values[j]) <= need) return false;
    }
  }
  return true;
}

bool clusters_well_separated(const CMatrix& T, const ToleranceConfig& tol) {
  const auto clusters = eigen_clusters(T, tol);
  const double radius = tol.tol_cluster * (1.0 + op_norm(T));
  for (size_t i = 0; i < clusters.size(); ++i) {
    for (size_t j = i + 1; j < clusters.size(); ++j) {
      if (std::abs(clusters[i].value - clusters[j].value) <= 4.0 * radius) return false;
    }
  }
  return true;
}

GeneratedFamily gen_polynomials(const GenSpec& spec, Rng& rng) {
  const Eigen::Index n = spec.n;
  const ToleranceConfig tol = ToleranceConfig::defaults(n);
  CMatrix A = rng.gaussian_matrix(n, n);
  const double rho = spectral_radius(A);
  if (rho > 0) A /= rho;  // spectrum on the unit scale before applying polynomials

  FamilySpec fam;
  fam.name = "polynomials_in_one_matrix";
  fam.tol = tol;
  const int degree_cap = static_cast<int>(std::min<Eigen::Index>(n - 1, 4));
  for (int k = 0; k < spec.count; ++k) {
    CMatrix M;
    bool ok = false;
    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
      const int deg = std::max(1, rng.uniform_int(1, std::max(1, degree_cap)));
      M = CMatrix::Zero(n, n);
      CMatrix P = CMatrix::Identity(n, n);
      for (int d = 0; d <= deg; ++d) {
        M += rng.cgaussian() * P;
        P = P * A;
      }
      const double r = spectral_radius(M);
      const double nm = op_norm(M);
      const double c = std::min({1.0, 0.999 * spec.spectral_radius_cap / std::max(r, 1e-12),
                                 spec.norm_cap / std::max(nm, 1e-12)});
      M *= c;
      ok = clusters_well_separated(M, tol);
    }
    if (!ok) {
      throw NumericalFailureError("famgen: polynomial member redraw budget exceeded");
    }
    fam.member_names.push_back("T" + std::to_string(k + 1));
    fam.members.push_back(std::move(M));
  }
  return {std::move(fam), std::nullopt};
}

GeneratedFamily gen_planted_block_diagonal(const GenSpec& spec, Rng& rng) {
  const Eigen::Index n = spec.n;
  if (n < 2) throw InvalidInputError("famgen: planted_block_diagonal needs n >= 2");
  const ToleranceConfig tol = ToleranceConfig::defaults(n);

  // Random partition of n into parts of size 1..3.
  std::vector<Eigen::Index> dims;
  Eigen::Index left = n;
  while (left > 0) {
    const Eigen::Index d = std::min<Eigen::Index>(left, rng.uniform_int(1, 3));
    dims.push_back(d);
    left -= d;
  }

  const double rad = 0.95 * spec.spectral_radius_cap;

  // Conjugation inflates the norm, and with it the norm-relative cluster
  // radius; redraw anchors until every member keeps its eigenvalue clusters
  // separated, backing off on the conditioning when redraws run out.
  double cond_cap = std::max(spec.cond_cap, 1.0);
  for (int round = 0; round < 12; ++round, cond_cap = std::max(1.0, cond_cap / 4.0)) {
    const CMatrix X = rng.conjugator(n, cond_cap);
    const CMatrix Xinv = X.inverse();

    FamilySpec fam;
    fam.name = "planted_block_diagonal";
    fam.tol = tol;
    bool ok = true;
    for (int k = 0; k < spec.count && ok; ++k) {
      CMatrix M;
      ok = false;
      for (int attempt = 0; attempt < 32 && !ok; ++attempt) {
        const auto anchors =
            rng.separated_disc_points(static_cast<int>(dims.size()), rad, 0.08);
        CMatrix D = CMatrix::Zero(n, n);
        Eigen::Index at = 0;
        for (size_t j = 0; j < dims.size(); ++j) {
          const Eigen::Index d = dims[j];
          for (Eigen::Index i = 0; i < d; ++i) D(at + i, at + i) = anchors[j];
          if (d >= 2 && rng.uniform() < 0.6) {
            const double c = rng.uniform(0.1, 0.5);  // nilpotent coupling
            for (Eigen::Index i = 0; i + 1 < d; ++i) D(at + i, at + i + 1) = c;
          }
          at += d;
        }
        M = X * D * Xinv;
        ok = anchors_well_separated(anchors, op_norm(M), tol) &&
             clusters_well_separated(M, tol);
      }
      if (ok) {
        fam.member_names.push_back("T" + std::to_string(k + 1));
        fam.members.push_back(std::move(M));
      }
    }
    if (!ok) continue;

    PlantedTruth truth;
    truth.conjugation = X;
    truth.part_dims = dims;
    return {std::move(fam), std::move(truth)};
  }
  throw NumericalFailureError("famgen: block-diagonal redraw budget exceeded");
}

GeneratedFamily gen_planted_jordan(const GenSpec& spec, Rng& rng) {
  const Eigen::Index n = spec.n;
  const ToleranceConfig tol = ToleranceConfig::defaults(n);
  const double rad = 0.95 * std::min(spec.spectral_radius_cap, 1.0);

  std::vector<int> sizes;
  Eigen::Index left = n;
  while (left > 0) {
    const int s = static_cast<int>(std::min<Eigen::Index>(left, rng.uniform_int(1, 3)));
    sizes.push_back(s);
    left -= s;
  }
  const auto distinct =
      rng.separated_disc_points(static_cast<int>(sizes.size()), rad, 0.1);
  std::vector<Complex> values;
  for (size_t i = 0; i < sizes.size(); ++i) {
    // Occasionally reuse an eigenvalue so one value owns several blocks.
    if (!values.empty() && rng.uniform() < 0.3) {
      values.push_back(values[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int>(values.size()) - 1))]);
    } else {
      values.push_back(distinct[i]);
    }
  }

  CMatrix J = CMatrix::Zero(n, n);
  PlantedTruth truth;
  Eigen::Index at = 0;
  for (size_t b = 0; b < sizes.size(); ++b) {
    for (int i = 0; i < sizes[b]; ++i) {
      J(at + i, at + i) = values[b];
      if (i + 1 < sizes[b]) J(at + i, at + i + 1) = 1.0;
    }
    truth.blocks.push_back({values[b], sizes[b]});
    at += sizes[b];
  }
  // Same separation safeguard as the block-diagonal recipe: conjugation must
  // not blur distinct eigenvalue clusters together.
  double cond_cap = std::max(spec.cond_cap, 1.0);
  for (int round = 0; round < 12; ++round, cond_cap = std::max(1.0, cond_cap / 4.0)) {
    const CMatrix X = rng.conjugator(n, cond_cap);
    const CMatrix T = X * J * X.inverse();
    if (!anchors_well_separated(values, op_norm(T), tol) ||
        !clusters_well_separated(T, tol)) {
      continue;
    }
    truth.conjugation = X;

    FamilySpec fam;
    fam.name = "planted_jordan";
    fam.tol = tol;
    fam.member_names.push_back("T1");
    fam.members.push_back(T);
    return {std::move(fam), std::move(truth)};
  }
  throw NumericalFailureError("famgen: planted Jordan redraw budget exceeded");
}

GeneratedFamily gen_counterexample_nc() {
  CMatrix T(2, 2);
  T << 0, 2, 0, 0;
  FamilySpec fam;
  fam.name = "counterexample_nc";
  fam.tol = ToleranceConfig::defaults(2);
  fam.member_names = {"T", "Tstar"};
  fam.members = {T, T.adjoint()};
  return {std::move(fam), std::nullopt};
}

GeneratedFamily gen_counterexample_unbounded(int m) {
  if (m < 1) throw InvalidInputError("famgen: counterexample_unbounded needs m >= 1");
  FamilySpec fam;
  fam.name = "counterexample_unbounded";
  fam.tol = ToleranceConfig::defaults(2);
  for (int k = 1; k <= m; ++k) {
    CMatrix T(2, 2);
    T << 0, static_cast<double>(k), 0, 0;
    fam.member_names.push_back("T" + std::to_string(k));
    fam.members.push_back(std::move(T));
  }
  return {std::move(fam), std::nullopt};
}

}  // namespace

GeneratedFamily generate(const GenSpec& spec) {
  if (spec.n < 1) throw InvalidInputError("famgen: dimension must be positive");
  if (!(spec.spectral_radius_cap > 0.0 && spec.spectral_radius_cap <= 1.0)) {
    throw InvalidInputError("famgen: spectral_radius_cap must lie in (0, 1]");
  }
  if (!(spec.norm_cap > 0.0)) throw InvalidInputError("famgen: norm_cap must be positive");
  if (spec.count < 1) throw InvalidInputError("famgen: family size must be positive");

  Rng rng(spec.seed);
  switch (spec.recipe) {
    case Recipe::polynomials_in_one_matrix:
      return gen_polynomials(spec, rng);
    case Recipe::planted_block_diagonal:
      return gen_planted_block_diagonal(spec, rng);
    case Recipe::planted_jordan:
      return gen_planted_jordan(spec, rng);
    case Recipe::counterexample_nc:
      return gen_counterexample_nc();
    case Recipe::counterexample_unbounded:
      return gen_counterexample_unbounded(spec.m);
  }
  throw InvalidInputError("famgen: unknown recipe");
}

const char* recipe_name(Recipe r) {
  switch (r) {
    case Recipe::polynomials_in_one_matrix: return "polynomials_in_one_matrix";
    case Recipe::planted_block_diagonal: return "planted_block_diagonal";
    case Recipe::planted_jordan: return "planted_jordan";
    case Recipe::counterexample_nc: return "counterexample_nc";
    case Recipe::counterexample_unbounded: return "counterexample_unbounded";
  }
  return "unknown";
}

std::optional<Recipe> recipe_from_name(const std::string& name) {
  for (Recipe r : {Recipe::polynomials_in_one_matrix, Recipe::planted_block_diagonal,
                   Recipe::planted_jordan, Recipe::counterexample_nc,
                   Recipe::counterexample_unbounded}) {
    if (name == recipe_name(r)) return r;
  }
  return std::nullopt;
}

}  // namespace jointsim
