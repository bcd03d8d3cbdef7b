#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "jointsim/decomp.hpp"
#include "jointsim/simjoint.hpp"
#include "jointsim/spectra.hpp"
#include "jointsim/types.hpp"

namespace jointsim::io {

using nlohmann::json;

/// Thrown for documents that do not match the expected schema.
class SchemaError : public InvalidInputError {
public:
  using InvalidInputError::InvalidInputError;
};

json matrix_to_json(const CMatrix& M);
CMatrix matrix_from_json(const json& j);

json tolerances_to_json(const ToleranceConfig& tol);
void apply_tolerance_overrides(ToleranceConfig& tol, const json& j);

/// Family document: { "n", "matrices": [{"name","re","im"}], "tolerances"? }.
FamilySpec parse_family_document(const json& j);
json family_to_json(const FamilySpec& family);

json profile_to_json(const SpectralProfile& profile);
json decomposition_to_json(const Decomposition& dec,
                           const std::vector<std::string>& member_names);
json certificate_to_json(const SimilarityCertificate& cert,
                         const std::vector<std::string>& member_names,
                         const ToleranceConfig& tol);

/// Reads back the Y and scalar fields of a certificate document.
struct StoredCertificate {
  CMatrix Y;
  double norm_Y = 0.0;
  double norm_Yinv = 0.0;
  double bound = 0.0;
  double K = 0.0;
  double r = 0.0;
  double alpha = 1.0;
};
StoredCertificate parse_certificate_document(const json& j);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace jointsim::io
