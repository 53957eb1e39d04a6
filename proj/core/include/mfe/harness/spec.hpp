#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mfe {

struct EstimatorSpec {
  double step = 1.0;
  double tol = 1e-9;
  int max_iter = 500;
  double positivity_floor = 0.01;
  /// Nadaraya-Watson bandwidth for the SIM nuisance; <= 0 selects Silverman.
  double bandwidth = 0.0;
};

/// One experiment, parsed from a JSON document. Unknown keys anywhere are
/// rejected with ErrorCode::Config.
struct ExperimentSpec {
  std::string kind;
  std::string name;
  std::string description;
  std::string manifold;
  double sigma = 0.5;
  /// Model center in chart coordinates; empty means the manifold's reference point.
  std::vector<double> center;
  std::vector<int> n;
  int reps = 0;
  /// Perturbation directions in orthonormal-frame coordinates at the center.
  std::vector<std::vector<double>> h;
  std::uint64_t seed = 0;
  EstimatorSpec estimator;
  /// Named tolerances, the kind's defaults overridden by the file.
  std::map<std::string, double> tolerances;
  /// Kind-specific parameters, the kind's defaults overridden by the file.
  nlohmann::json params;
  std::string out_dir;
  std::string format = "json";
};

const std::vector<std::string>& experiment_kinds();

/// Defaults for a kind: {"tolerances": {...}, "params": {...}}.
nlohmann::json kind_defaults(const std::string& kind);

ExperimentSpec parse_spec(const nlohmann::json& doc);
ExperimentSpec load_spec(const std::string& path);

/// Canonical JSON form of a parsed spec (defaults filled in).
nlohmann::ordered_json spec_to_json(const ExperimentSpec& spec);

}  // namespace mfe
