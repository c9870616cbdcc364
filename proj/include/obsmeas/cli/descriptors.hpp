#pragma once

#include "obsmeas/gramian.hpp"
#include "obsmeas/optimal_control.hpp"
#include "obsmeas/spectral_model.hpp"
#include "obsmeas/time_sets.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace obsmeas::cli {

using Json = nlohmann::json;

/// Bad configuration: usage errors, unreadable or malformed files. The
/// message carries the file and, for parse errors, line and column.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json load_json(const std::string& path);

struct LoadedModel {
  SpectralModel model;
  ObservationOperator observation;
  std::string name;
};

std::vector<std::string> preset_names();
LoadedModel model_preset(const std::string& name);

/// {"kind": "heat1d"|"diagonal", "n", "eigenvalues", "window", "quad_order",
///  "generator", "observation"}; `origin` names the file in error messages.
LoadedModel parse_model(const Json& j, const std::string& origin);

/// {"T": real, "intervals": [[a, b], ...]}
TimeSet parse_time_set(const Json& j, const std::string& origin);

/// {"d", "k", "form": "root"|"squared", "theta": real | [[L, theta], ...]}
IntervalBoundSpec parse_bound_spec(const Json& j, const std::string& origin);

struct LoadedProblem {
  TimeOptimalProblem problem;
  std::string name;
  double time_tol = 1e-4;
};

/// {"model": <descriptor>, "control_window": [a, b], "z0": [...], "M": real,
///  "time_tol": real, "target": [...]}
LoadedProblem parse_problem(const Json& j, const std::string& origin);

}  // namespace obsmeas::cli
