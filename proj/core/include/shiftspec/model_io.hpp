#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "shiftspec/measure.hpp"
#include "shiftspec/spectrum.hpp"
#include "shiftspec/tree.hpp"

namespace shiftspec {

struct SolverOptions {
  double tol = 1e-10;
  int depth_cap = kDefaultDepthCap;
  int restarts = 200;
  int steps = 5000;
  std::uint64_t seed = 0;
  int threads = 0;
};

/// Parsed model file: one shift (or tree) plus named cylinder functions and
/// solver options. Well-known slots: "potential" (real, -inf allowed),
/// "weight" (|a|), "cocycle" (or the string "uniform").
struct SftModel {
  TransitionMatrix matrix;
  std::optional<CylinderFunction> potential;
  std::optional<CylinderFunction> weight;
  std::optional<CylinderFunction> cocycle;
  std::optional<std::vector<std::vector<double>>> measure_Q;

  CylinderFunction potential_or_zero() const;
  CylinderFunction weight_or_one() const;
  CylinderFunction cocycle_or_uniform() const;
};

struct ParsedModel {
  std::string kind;  // "sft" | "tree"
  std::optional<SftModel> sft;
  std::optional<TreeSystem> tree;
  SolverOptions options;
};

ParsedModel parse_model(const nlohmann::json& j);
/// Reads a model file; the name "contrexample" loads the built-in tree.
ParsedModel load_model(const std::string& path);

TransitionMatrix parse_transition_matrix(const nlohmann::json& j);
CylinderFunction parse_cylinder_function(const TransitionMatrix& A, const nlohmann::json& j,
                                         ValueKind kind, int depth_cap = kDefaultDepthCap);
TreeSystem parse_tree_system(const nlohmann::json& j);

nlohmann::json to_json(const FreenessReport& r);
nlohmann::json to_json(const StateClassification& c);
nlohmann::json to_json(const IrreducibleDecomposition& d);
nlohmann::json to_json(const MarkovMeasure& mu);
nlohmann::json to_json(const SpectrumDescription& s);
nlohmann::json pseudospectrum_summary(const PseudospectrumReport& rep);
std::string pseudospectrum_csv(const PseudospectrumReport& rep);

}  // namespace shiftspec
