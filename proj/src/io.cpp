#include "jointsim/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace jointsim::io {

namespace {

json real_grid(const CMatrix& M, bool imag) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      row.push_back(imag ? M(i, j).imag() : M(i, j).real());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json complex_to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

json matrix_to_json(const CMatrix& M) {
  return json{{"re", real_grid(M, false)}, {"im", real_grid(M, true)}};
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw SchemaError("matrix must be an object with 're' and 'im' arrays");
  }
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw SchemaError("matrix 're'/'im' must be non-empty arrays of equal shape");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(re.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(re.at(0).size());
  CMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& rr = re.at(static_cast<size_t>(i));
    const json& ri = im.at(static_cast<size_t>(i));
    if (!rr.is_array() || !ri.is_array() ||
        static_cast<Eigen::Index>(rr.size()) != cols ||
        static_cast<Eigen::Index>(ri.size()) != cols) {
      throw SchemaError("matrix rows must all have the same length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      if (!rr.at(static_cast<size_t>(k)).is_number() ||
          !ri.at(static_cast<size_t>(k)).is_number()) {
        throw SchemaError("matrix entries must be numbers");
      }
      M(i, k) = Complex(rr.at(static_cast<size_t>(k)).get<double>(),
                        ri.at(static_cast<size_t>(k)).get<double>());
    }
  }
  if (!M.allFinite()) throw SchemaError("matrix entries must be finite");
  return M;
}

json tolerances_to_json(const ToleranceConfig& tol) {
  return json{{"tol_rank", tol.tol_rank},
              {"tol_commute", tol.tol_commute},
              {"tol_cluster", tol.tol_cluster},
              {"tol_contraction", tol.tol_contraction},
              {"tol_spectrum", tol.tol_spectrum}};
}

void apply_tolerance_overrides(ToleranceConfig& tol, const json& j) {
  if (!j.is_object()) throw SchemaError("'tolerances' must be an object");
  auto pick = [&](const char* key, double& target) {
    if (j.contains(key)) {
      if (!j.at(key).is_number()) throw SchemaError(std::string(key) + " must be a number");
      target = j.at(key).get<double>();
    }
  };
  pick("tol_rank", tol.tol_rank);
  pick("tol_commute", tol.tol_commute);
  pick("tol_cluster", tol.tol_cluster);
  pick("tol_contraction", tol.tol_contraction);
  pick("tol_spectrum", tol.tol_spectrum);
  tol.validate();
}

FamilySpec parse_family_document(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("matrices")) {
    throw SchemaError("family document needs 'n' and 'matrices'");
  }
  if (!j.at("n").is_number_integer() || j.at("n").get<long>() < 1) {
    throw SchemaError("'n' must be a positive integer");
  }
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  if (!j.at("matrices").is_array() || j.at("matrices").empty()) {
    throw SchemaError("'matrices' must be a non-empty array");
  }
  FamilySpec fam;
  fam.name = j.value("name", std::string("family"));
  fam.tol = ToleranceConfig::defaults(n);
  if (j.contains("tolerances")) apply_tolerance_overrides(fam.tol, j.at("tolerances"));

  std::set<std::string> seen;
  for (const json& entry : j.at("matrices")) {
    if (!entry.is_object() || !entry.contains("name")) {
      throw SchemaError("each matrix entry needs a 'name'");
    }
    const std::string name = entry.at("name").get<std::string>();
    if (!seen.insert(name).second) throw SchemaError("duplicate matrix name: " + name);
    const CMatrix M = matrix_from_json(entry);
    if (M.rows() != n || M.cols() != n) {
      throw SchemaError("matrix '" + name + "' is not " + std::to_string(n) + "x" +
                        std::to_string(n));
    }
    fam.member_names.push_back(name);
    fam.members.push_back(M);
  }
  return fam;
}

json family_to_json(const FamilySpec& family) {
  json mats = json::array();
  for (size_t k = 0; k < family.members.size(); ++k) {
    json entry = matrix_to_json(family.members[k]);
    entry["name"] = family.member_names[k];
    mats.push_back(std::move(entry));
  }
  return json{{"name", family.name},
              {"n", family.dim()},
              {"matrices", std::move(mats)},
              {"tolerances", tolerances_to_json(family.tol)}};
}

json profile_to_json(const SpectralProfile& profile) {
  json spectrum = json::array();
  for (const auto& c : profile.spectrum) {
    spectrum.push_back(json{{"value", complex_to_json(c.value)},
                            {"algebraic_multiplicity", c.algebraic_multiplicity}});
  }
  json delta = json::array();
  for (Complex v : profile.delta_set) delta.push_back(complex_to_json(v));
  json blocks = json::array();
  for (const auto& b : profile.jordan.blocks) {
    blocks.push_back(
        json{{"eigenvalue", complex_to_json(b.eigenvalue)}, {"size", b.size}});
  }
  json power = json{{"is_power_bounded", profile.power_bound.is_power_bounded}};
  switch (profile.power_bound.reason) {
    case PowerBoundReason::certified: power["reason"] = "certified"; break;
    case PowerBoundReason::spectrum_exceeds_disc:
      power["reason"] = "spectrum_exceeds_disc";
      break;
    case PowerBoundReason::boundary_jordan_block:
      power["reason"] = "boundary_jordan_block";
      break;
  }
  if (profile.power_bound.constant_K) power["constant_K"] = *profile.power_bound.constant_K;

  json out{{"spectrum", std::move(spectrum)},
           {"delta_set", std::move(delta)},
           {"jordan_blocks", std::move(blocks)},
           {"transform_cond", profile.jordan.transform_cond},
           {"power_bound", std::move(power)}};
  if (profile.delta_value) out["delta_value"] = *profile.delta_value;
  return out;
}

json decomposition_to_json(const Decomposition& dec,
                           const std::vector<std::string>& member_names) {
  json parts = json::array();
  for (size_t i = 0; i < dec.parts.size(); ++i) {
    json tags = json::object();
    for (size_t k = 0; k < member_names.size(); ++k) {
      const PartTag& t = dec.tags[i][k];
      if (t.kind == TagKind::scalar) {
        tags[member_names[k]] = json{{"tag", "scalar"}, {"z", complex_to_json(t.z)}};
      } else {
        tags[member_names[k]] = json{{"tag", "delta_spectrum"}};
      }
    }
    parts.push_back(json{{"dim", dec.parts[i].dim()},
                         {"basis", matrix_to_json(dec.parts[i].basis)},
                         {"tags", std::move(tags)}});
  }
  return json{{"parts", std::move(parts)},
              {"assembly", matrix_to_json(dec.assembly)},
              {"alpha", dec.alpha}};
}

json certificate_to_json(const SimilarityCertificate& cert,
                         const std::vector<std::string>& member_names,
                         const ToleranceConfig& tol) {
  json conj = json::object();
  for (size_t k = 0; k < member_names.size(); ++k) {
    conj[member_names[k]] = cert.conjugated_norms[k];
  }
  return json{{"Y", matrix_to_json(cert.Y)},
              {"norm_Y", cert.norm_Y},
              {"norm_Yinv", cert.norm_Yinv},
              {"bound", cert.bound},
              {"K", cert.K},
              {"K_clamped", cert.K_clamped},
              {"r", cert.r},
              {"alpha", cert.alpha},
              {"conjugated_norms", std::move(conj)},
              {"verified", cert.verified},
              {"tolerances", tolerances_to_json(tol)}};
}

StoredCertificate parse_certificate_document(const json& j) {
  if (!j.is_object() || !j.contains("Y")) {
    throw SchemaError("certificate document needs a 'Y' matrix");
  }
  StoredCertificate cert;
  cert.Y = matrix_from_json(j.at("Y"));
  if (cert.Y.rows() != cert.Y.cols()) throw SchemaError("'Y' must be square");
  cert.norm_Y = j.value("norm_Y", 0.0);
  cert.norm_Yinv = j.value("norm_Yinv", 0.0);
  cert.bound = j.value("bound", 0.0);
  cert.K = j.value("K", 0.0);
  cert.r = j.value("r", 0.0);
  cert.alpha = j.value("alpha", 1.0);
  return cert;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace jointsim::io
