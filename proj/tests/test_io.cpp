#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "jointsim/io.hpp"

using namespace jointsim;
using nlohmann::json;

namespace {

CMatrix sample_matrix() {
  CMatrix M(2, 2);
  M << Complex(0.5, -1.25), Complex(0, 2), Complex(-3, 0), Complex(0.125, 0.0625);
  return M;
}

}  // namespace

TEST_CASE("matrix JSON round trip is exact") {
  const CMatrix M = sample_matrix();
  const CMatrix back = io::matrix_from_json(io::matrix_to_json(M));
  CHECK(back == M);  // bitwise: doubles survive the JSON layer unchanged
}

TEST_CASE("matrix_from_json rejects malformed documents") {
  CHECK_THROWS_AS(io::matrix_from_json(json::array()), io::SchemaError);
  CHECK_THROWS_AS(io::matrix_from_json(json{{"re", json::array()}}), io::SchemaError);
  // Ragged rows.
  json bad = io::matrix_to_json(sample_matrix());
  bad["im"][1] = json::array({1.0});
  CHECK_THROWS_AS(io::matrix_from_json(bad), io::SchemaError);
  // Non-numeric entry.
  json text = io::matrix_to_json(sample_matrix());
  text["re"][0][0] = "x";
  CHECK_THROWS_AS(io::matrix_from_json(text), io::SchemaError);
}

TEST_CASE("family document round trip") {
  FamilySpec fam;
  fam.name = "demo";
  fam.tol = ToleranceConfig::defaults(2);
  fam.tol.tol_cluster = 5e-4;
  fam.member_names = {"A", "B"};
  fam.members = {sample_matrix(), sample_matrix().adjoint().eval()};

  const FamilySpec back = io::parse_family_document(io::family_to_json(fam));
  CHECK(back.name == "demo");
  REQUIRE(back.members.size() == 2);
  CHECK(back.member_names == fam.member_names);
  CHECK(back.members[0] == fam.members[0]);
  CHECK(back.members[1] == fam.members[1]);
  CHECK(back.tol.tol_cluster == 5e-4);
  CHECK(back.tol.tol_rank == fam.tol.tol_rank);
}

TEST_CASE("parse_family_document schema validation") {
  json good = io::family_to_json(FamilySpec{
      "f", {"A"}, {sample_matrix()}, ToleranceConfig::defaults(2)});

  json no_n = good;
  no_n.erase("n");
  CHECK_THROWS_AS(io::parse_family_document(no_n), io::SchemaError);

  json wrong_n = good;
  wrong_n["n"] = 3;
  CHECK_THROWS_AS(io::parse_family_document(wrong_n), io::SchemaError);

  json dup = good;
  dup["matrices"].push_back(dup["matrices"][0]);
  CHECK_THROWS_AS(io::parse_family_document(dup), io::SchemaError);

  json unnamed = good;
  unnamed["matrices"][0].erase("name");
  CHECK_THROWS_AS(io::parse_family_document(unnamed), io::SchemaError);

  json empty = good;
  empty["matrices"] = json::array();
  CHECK_THROWS_AS(io::parse_family_document(empty), io::SchemaError);

  json bad_tol = good;
  bad_tol["tolerances"]["tol_commute"] = -1.0;
  CHECK_THROWS_AS(io::parse_family_document(bad_tol), InvalidInputError);
}

TEST_CASE("tolerance overrides only touch given keys and validate") {
  ToleranceConfig tol = ToleranceConfig::defaults(4);
  io::apply_tolerance_overrides(tol, json{{"tol_commute", 1e-6}});
  CHECK(tol.tol_commute == 1e-6);
  CHECK(tol.tol_cluster == 1e-4);
  CHECK_THROWS_AS(io::apply_tolerance_overrides(tol, json{{"tol_cluster", "x"}}),
                  io::SchemaError);
}

TEST_CASE("certificate document round trip") {
  SimilarityCertificate cert;
  cert.Y = sample_matrix();
  cert.norm_Y = 4.0;
  cert.norm_Yinv = 4.0;
  cert.bound = 4.0;
  cert.K = 2.0;
  cert.r = 0.5;
  cert.alpha = 1.0;
  cert.conjugated_norms = {0.125, 0.9};
  cert.verified = true;

  const json doc =
      io::certificate_to_json(cert, {"A", "B"}, ToleranceConfig::defaults(2));
  CHECK(doc.at("conjugated_norms").at("A").get<double>() == 0.125);
  CHECK(doc.at("verified").get<bool>());

  const io::StoredCertificate back = io::parse_certificate_document(doc);
  CHECK(back.Y == cert.Y);
  CHECK(back.norm_Y == 4.0);
  CHECK(back.norm_Yinv == 4.0);
  CHECK(back.bound == 4.0);
  CHECK(back.K == 2.0);
  CHECK(back.r == 0.5);
  CHECK(back.alpha == 1.0);

  CHECK_THROWS_AS(io::parse_certificate_document(json::object()), io::SchemaError);
}

TEST_CASE("profile and decomposition serialization carry the key fields") {
  const ToleranceConfig tol = ToleranceConfig::defaults(2);
  CMatrix T(2, 2);
  T << 0, 2, 0, 0;
  const SpectralProfile p = spectral_profile(T, tol);
  const json pj = io::profile_to_json(p);
  CHECK(pj.at("power_bound").at("is_power_bounded").get<bool>());
  CHECK(pj.at("delta_set").size() == 1);
  CHECK(pj.contains("delta_value"));
  CHECK(pj.at("jordan_blocks").size() == 1);

  FamilySpec fam{"one", {"T"}, {T}, tol};
  const Decomposition d = decompose_family(fam);
  const json dj = io::decomposition_to_json(d, fam.member_names);
  CHECK(dj.at("parts").size() == d.parts.size());
  CHECK(dj.at("alpha").get<double>() == d.alpha);
  CHECK(dj.at("parts")[0].at("tags").contains("T"));
}

TEST_CASE("file round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "jointsim_io_test";
  fs::create_directories(dir);
  const std::string path = (dir / "doc.json").string();
  const json doc = io::matrix_to_json(sample_matrix());
  io::write_json_file(path, doc);
  CHECK(io::load_json_file(path) == doc);
  CHECK_THROWS_AS(io::load_json_file((dir / "missing.json").string()), io::SchemaError);
  std::remove(path.c_str());
}
