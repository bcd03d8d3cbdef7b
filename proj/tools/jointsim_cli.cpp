#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "jointsim/decomp.hpp"
#include "jointsim/famgen.hpp"
#include "jointsim/io.hpp"
#include "jointsim/simjoint.hpp"
#include "jointsim/spectra.hpp"

namespace {

using jointsim::io::json;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCommutativity = 4;
constexpr int kExitDomain = 5;
constexpr int kExitVerification = 6;

struct TolFlags {
  std::optional<double> rank, commute, cluster, contraction, spectrum;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol-rank", rank, "singular value cutoff, relative");
    cmd->add_option("--tol-commute", commute, "commutator residual threshold");
    cmd->add_option("--tol-cluster", cluster, "eigenvalue grouping radius, relative");
    cmd->add_option("--tol-contraction", contraction, "slack on conjugated norms <= 1");
    cmd->add_option("--tol-spectrum", spectrum, "slack on |lambda| <= 1 tests");
  }
  void apply(jointsim::ToleranceConfig& tol) const {
    if (rank) tol.tol_rank = *rank;
    if (commute) tol.tol_commute = *commute;
    if (cluster) tol.tol_cluster = *cluster;
    if (contraction) tol.tol_contraction = *contraction;
    if (spectrum) tol.tol_spectrum = *spectrum;
    tol.validate();
  }
};

void emit(const json& j, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    jointsim::io::write_json_file(output_path, j);
  }
}

jointsim::FamilySpec load_family(const std::string& path, const TolFlags& flags) {
  jointsim::FamilySpec fam =
      jointsim::io::parse_family_document(jointsim::io::load_json_file(path));
  flags.apply(fam.tol);
  fam.validate();
  return fam;
}

int run_analyze(const std::string& input, const std::string& output,
                const TolFlags& flags, int p_max) {
  const jointsim::FamilySpec fam = load_family(input, flags);

  json members = json::array();
  std::vector<jointsim::SpectralProfile> profiles;
  for (size_t k = 0; k < fam.members.size(); ++k) {
    profiles.push_back(jointsim::spectral_profile(fam.members[k], fam.tol));
    json entry = jointsim::io::profile_to_json(profiles.back());
    entry["name"] = fam.member_names[k];
    if (p_max > 0 && profiles.back().power_bound.is_power_bounded &&
        !profiles.back().delta_set.empty()) {
      const auto report =
          jointsim::verify_power_bound_inequality(fam.members[k], profiles.back(), p_max);
      entry["power_inequality"] = json{{"pass", report.pass},
                                       {"worst_ratio", report.worst_ratio},
                                       {"worst_p", report.worst_p}};
    }
    members.push_back(std::move(entry));
  }

  double worst = 0.0;
  std::string wa, wb;
  for (size_t a = 0; a < fam.members.size(); ++a) {
    for (size_t b = a + 1; b < fam.members.size(); ++b) {
      const double res = jointsim::commutator_residual(fam.members[a], fam.members[b]);
      if (res > worst) {
        worst = res;
        wa = fam.member_names[a];
        wb = fam.member_names[b];
      }
    }
  }
  const auto uniform = jointsim::uniform_family_report(fam, profiles);
  json uni{{"delta_radius", uniform.delta_radius},
           {"has_uniform_jordan", uniform.has_uniform_jordan},
           {"consistent", uniform.consistent}};
  if (uniform.uniform_K) uni["uniform_K"] = *uniform.uniform_K;
  if (uniform.delta_infimum) uni["delta_infimum"] = *uniform.delta_infimum;

  json out{{"family", fam.name},
           {"members", std::move(members)},
           {"commutator_residual",
            json{{"worst", worst}, {"pair", json::array({wa, wb})}}},
           {"uniform_family", std::move(uni)}};
  emit(out, output);
  return kExitOk;
}

int run_decompose(const std::string& input, const std::string& output,
                  const TolFlags& flags) {
  const jointsim::FamilySpec fam = load_family(input, flags);
  const jointsim::Decomposition dec = jointsim::decompose_family(fam);
  emit(jointsim::io::decomposition_to_json(dec, fam.member_names), output);
  return kExitOk;
}

int run_similarize(const std::string& input, const std::string& output,
                   const TolFlags& flags) {
  const jointsim::FamilySpec fam = load_family(input, flags);
  const jointsim::SimilarityCertificate cert = jointsim::joint_similarity(fam);
  emit(jointsim::io::certificate_to_json(cert, fam.member_names, fam.tol), output);
  if (!cert.verified) {
    std::cerr << "verification failed: worst member '" << cert.worst_member
              << "' has conjugated norm " << cert.worst_norm << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

int run_verify(const std::string& input, const std::string& similarity,
               const std::string& output, const TolFlags& flags) {
  const jointsim::FamilySpec fam = load_family(input, flags);
  const jointsim::io::StoredCertificate cert = jointsim::io::parse_certificate_document(
      jointsim::io::load_json_file(similarity));
  if (cert.Y.rows() != fam.dim()) {
    throw jointsim::io::SchemaError("certificate Y does not match the family dimension");
  }

  const double norm_Y = jointsim::op_norm(cert.Y);
  if (jointsim::smallest_singular_value(cert.Y) <= fam.tol.tol_rank * norm_Y) {
    std::cerr << "Y is numerically singular\n";
    return kExitDomain;
  }
  const jointsim::CMatrix Yinv =
      jointsim::solve(cert.Y, jointsim::identity(fam.dim()), fam.tol);
  const double norm_Yinv = jointsim::op_norm(Yinv);

  bool pass = true;
  json checks = json::object();
  json conj = json::object();
  std::string worst_name;
  double worst = 0.0;
  for (size_t k = 0; k < fam.members.size(); ++k) {
    const double c = jointsim::op_norm(cert.Y * fam.members[k] * Yinv);
    conj[fam.member_names[k]] = c;
    if (c > worst) {
      worst = c;
      worst_name = fam.member_names[k];
    }
    if (c > 1.0 + fam.tol.tol_contraction) pass = false;
  }
  checks["contractions"] = json{{"pass", worst <= 1.0 + fam.tol.tol_contraction},
                                {"worst_member", worst_name},
                                {"worst_norm", worst}};
  const bool balanced = std::abs(norm_Y - norm_Yinv) <= 1e-8 * norm_Y;
  checks["balance"] =
      json{{"pass", balanced}, {"norm_Y", norm_Y}, {"norm_Yinv", norm_Yinv}};
  pass = pass && balanced;
  if (cert.bound > 0.0) {
    const bool in_bound = norm_Y <= cert.bound * (1.0 + 1e-8);
    checks["bound"] = json{{"pass", in_bound}, {"bound", cert.bound}};
    pass = pass && in_bound;
  }

  emit(json{{"pass", pass}, {"checks", std::move(checks)},
            {"conjugated_norms", std::move(conj)}},
       output);
  return pass ? kExitOk : kExitVerification;
}

int run_generate(const jointsim::GenSpec& spec, const std::string& output) {
  const jointsim::GeneratedFamily gen = jointsim::generate(spec);
  emit(jointsim::io::family_to_json(gen.family), output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint similarity analysis for commuting families of matrices"};
  app.require_subcommand(1);

  std::string input, similarity, output;
  int p_max = 0;
  TolFlags flags;

  auto* analyze = app.add_subcommand(
      "analyze", "Per-member spectral profiles plus family diagnostics");
  analyze->add_option("input", input, "family document (JSON)")->required();
  analyze->add_option("--output", output, "write the report here instead of stdout");
  analyze->add_option("--p-max", p_max, "sample the power inequality up to this power");
  flags.attach(analyze);

  auto* decompose =
      app.add_subcommand("decompose", "Joint invariant-subspace decomposition");
  decompose->add_option("input", input, "family document (JSON)")->required();
  decompose->add_option("--output", output, "write the decomposition here");
  flags.attach(decompose);

  auto* similarize = app.add_subcommand(
      "similarize", "Construct a joint similarity to contractions");
  similarize->add_option("input", input, "family document (JSON)")->required();
  similarize->add_option("--output", output, "write the certificate here");
  flags.attach(similarize);

  auto* verify =
      app.add_subcommand("verify", "Re-check an externally supplied similarity");
  verify->add_option("input", input, "family document (JSON)")->required();
  verify->add_option("similarity", similarity, "certificate document (JSON)")->required();
  verify->add_option("--output", output, "write the report here");
  flags.attach(verify);

  jointsim::GenSpec gen_spec;
  std::string recipe_str = "polynomials_in_one_matrix";
  auto* generate = app.add_subcommand("generate", "Seeded test-family generator");
  generate->add_option("--recipe", recipe_str, "generation recipe");
  generate->add_option("--seed", gen_spec.seed, "RNG seed");
  generate->add_option("--n", gen_spec.n, "matrix dimension");
  generate->add_option("--count", gen_spec.count, "family size (random recipes)");
  generate->add_option("--m", gen_spec.m, "truncation for counterexample_unbounded");
  generate->add_option("--spectral-radius-cap", gen_spec.spectral_radius_cap,
                       "spectral radius cap in (0, 1]");
  generate->add_option("--norm-cap", gen_spec.norm_cap, "norm cap");
  generate->add_option("--cond-cap", gen_spec.cond_cap,
                       "conditioning cap for planted conjugations");
  generate->add_option("--output", output, "write the family document here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(input, output, flags, p_max);
    if (decompose->parsed()) return run_decompose(input, output, flags);
    if (similarize->parsed()) return run_similarize(input, output, flags);
    if (verify->parsed()) return run_verify(input, similarity, output, flags);
    if (generate->parsed()) {
      const auto recipe = jointsim::recipe_from_name(recipe_str);
      if (!recipe) {
        std::cerr << "unknown recipe: " << recipe_str << "\n";
        return kExitSchema;
      }
      gen_spec.recipe = *recipe;
      return run_generate(gen_spec, output);
    }
  } catch (const jointsim::io::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const jointsim::CommutativityViolationError& e) {
    std::cerr << "commutativity violation: " << e.what() << " (pair " << e.name_a
              << ", " << e.name_b << "; residual " << e.residual << ")\n";
    return kExitCommutativity;
  } catch (const jointsim::DomainViolationError& e) {
    std::cerr << "domain violation: " << e.what() << "\n";
    return kExitDomain;
  } catch (const jointsim::SingularMatrixError& e) {
    std::cerr << "singular matrix: " << e.what() << "\n";
    return kExitDomain;
  } catch (const jointsim::DegenerateDecompositionError& e) {
    std::cerr << "degenerate decomposition: " << e.what() << "\n";
    return kExitDomain;
  } catch (const jointsim::VerificationFailureError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const jointsim::NumericalFailureError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const jointsim::IllPosedStructureError& e) {
    std::cerr << "ill-posed structure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const jointsim::InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitSchema;
  } catch (const jointsim::AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
