#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jointsim/spectra.hpp"
#include "jointsim/types.hpp"

namespace jointsim {

enum class Recipe {
  polynomials_in_one_matrix,
  planted_block_diagonal,
  planted_jordan,
  counterexample_nc,
  counterexample_unbounded,
};

struct GenSpec {
  std::uint64_t seed = 0;
  Eigen::Index n = 2;
  Recipe recipe = Recipe::polynomials_in_one_matrix;
  int count = 3;                    // family size for the random recipes
  int m = 3;                        // truncation for counterexample_unbounded
  double spectral_radius_cap = 0.9; // in (0, 1]
  double norm_cap = 10.0;
  double cond_cap = 1e3;            // conditioning of planted conjugations
};

/// Ground truth recorded by the planted recipes.
struct PlantedTruth {
  std::vector<JordanStructure::Block> blocks;  // of the first member
  CMatrix conjugation;                         // the planted X (T = X J X^{-1})
  std::vector<Eigen::Index> part_dims;         // planted_block_diagonal only
};

struct GeneratedFamily {
  FamilySpec family;
  std::optional<PlantedTruth> truth;
};

GeneratedFamily generate(const GenSpec& spec);

const char* recipe_name(Recipe r);
std::optional<Recipe> recipe_from_name(const std::string& name);

}  // namespace jointsim
