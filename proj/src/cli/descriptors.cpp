#include "obsmeas/cli/descriptors.hpp"

#include "obsmeas/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace obsmeas::cli {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

const Json& require(const Json& j, const char* key, const std::string& origin) {
  if (!j.is_object() || !j.contains(key)) fail(origin, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* key, const std::string& origin) {
  const Json& v = require(j, key, origin);
  if (!v.is_number()) fail(origin, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& v, const std::string& origin, const char* key) {
  if (!v.is_array()) fail(origin, std::string("field \"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(origin, std::string("field \"") + key + "\" must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Eigen::VectorXd vector_field(const Json& v, const std::string& origin, const char* key) {
  const auto values = numbers(v, origin, key);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::pair<double, double> pair_field(const Json& v, const std::string& origin, const char* key) {
  const auto values = numbers(v, origin, key);
  if (values.size() != 2) fail(origin, std::string("field \"") + key + "\" must be [a, b]");
  return {values[0], values[1]};
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << path << ":" << line << ":" << column << ": malformed JSON (" << e.what() << ")";
    throw ConfigError(os.str());
  }
}

std::vector<std::string> preset_names() {
  return {"scalar", "heat-n8", "heat-n16", "heat-n32", "unitary-scalar"};
}

LoadedModel model_preset(const std::string& name) {
  if (name == "scalar") {
    return {make_diagonal({1.0}, GeneratorKind::dissipative), ObservationOperator::identity(1), name};
  }
  if (name == "unitary-scalar") {
    return {make_diagonal({1.0}, GeneratorKind::unitary), ObservationOperator::identity(1), name};
  }
  std::size_t n = 0;
  if (name == "heat-n8") n = 8;
  if (name == "heat-n16") n = 16;
  if (name == "heat-n32") n = 32;
  if (n == 0) {
    std::string known;
    for (const auto& p : preset_names()) known += " " + p;
    throw ConfigError("unknown preset \"" + name + "\"; known:" + known);
  }
  auto [model, B] = make_heat_1d(n, 0.3, 0.8);
  return {std::move(model), std::move(B), name};
}

LoadedModel parse_model(const Json& j, const std::string& origin) {
  const Json& kind_field = require(j, "kind", origin);
  if (!kind_field.is_string()) fail(origin, "field \"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();
  GeneratorKind generator = GeneratorKind::dissipative;
  if (j.contains("generator")) {
    const std::string g = j.at("generator").get<std::string>();
    if (g == "unitary") {
      generator = GeneratorKind::unitary;
    } else if (g != "dissipative") {
      fail(origin, "generator must be \"dissipative\" or \"unitary\"");
    }
  }
  try {
    if (kind == "heat1d") {
      if (generator == GeneratorKind::unitary) fail(origin, "heat1d models are dissipative");
      const double n = number(j, "n", origin);
      if (!(n >= 1.0) || n != std::floor(n)) fail(origin, "\"n\" must be a positive integer");
      const auto [a, b] = pair_field(require(j, "window", origin), origin, "window");
      const int order = j.contains("quad_order") ? j.at("quad_order").get<int>() : 64;
      auto [model, B] = make_heat_1d(static_cast<std::size_t>(n), a, b, order);
      return {std::move(model), std::move(B), origin};
    }
    if (kind == "diagonal") {
      auto eigenvalues = numbers(require(j, "eigenvalues", origin), origin, "eigenvalues");
      if (j.contains("n") && number(j, "n", origin) != static_cast<double>(eigenvalues.size())) {
        fail(origin, "\"n\" does not match the eigenvalue count");
      }
      SpectralModel model = make_diagonal(std::move(eigenvalues), generator);
      if (!j.contains("observation") || j.at("observation") == "identity") {
        return {model, ObservationOperator::identity(model.mode_count()), origin};
      }
      const Json& rows = j.at("observation");
      if (!rows.is_array() || rows.empty()) fail(origin, "\"observation\" must be \"identity\" or a matrix");
      Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(model.mode_count()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto row = numbers(rows[r], origin, "observation");
        if (row.size() != model.mode_count()) {
          std::ostringstream os;
          os << "observation row " << r << " has " << row.size() << " columns, expected "
             << model.mode_count();
          fail(origin, os.str());
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
          matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
      }
      return {model, ObservationOperator::custom(matrix), origin};
    }
  } catch (const Json::exception& e) {
    fail(origin, e.what());
  } catch (const obsmeas::Error& e) {
    fail(origin, e.what());
  }
  fail(origin, "unknown model kind \"" + kind + "\"");
}

TimeSet parse_time_set(const Json& j, const std::string& origin) {
  const double T = number(j, "T", origin);
  const Json& list = require(j, "intervals", origin);
  if (!list.is_array()) fail(origin, "\"intervals\" must be an array");
  std::vector<Interval> raw;
  for (const auto& item : list) {
    const auto [a, b] = pair_field(item, origin, "intervals");
    raw.push_back({a, b});
  }
  try {
    return make_time_set(T, raw);
  } catch (const obsmeas::Error& e) {
    fail(origin, e.what());
  }
}

IntervalBoundSpec parse_bound_spec(const Json& j, const std::string& origin) {
  IntervalBoundSpec spec;
  spec.d = number(j, "d", origin);
  spec.k = number(j, "k", origin);
  spec.form = IntervalBoundSpec::Form::root;
  if (j.contains("form")) {
    const std::string form = j.at("form").get<std::string>();
    if (form == "squared") {
      spec.form = IntervalBoundSpec::Form::squared;
    } else if (form != "root") {
      fail(origin, "\"form\" must be \"root\" or \"squared\"");
    }
  }
  if (j.contains("theta")) {
    const Json& theta = j.at("theta");
    if (theta.is_number()) {
      spec.theta_constant = theta.get<double>();
    } else if (theta.is_array()) {
      for (const auto& item : theta) {
        const auto [L, value] = pair_field(item, origin, "theta");
        spec.theta_table.emplace_back(L, value);
      }
      if (!spec.theta_table.empty()) spec.theta_constant = spec.theta_table.back().second;
    } else {
      fail(origin, "\"theta\" must be a number or a table");
    }
  }
  try {
    spec.validate();
  } catch (const obsmeas::Error& e) {
    fail(origin, e.what());
  }
  return spec;
}

LoadedProblem parse_problem(const Json& j, const std::string& origin) {
  Json model_json = require(j, "model", origin);
  if (j.contains("control_window")) {
    if (model_json.value("kind", "") != "heat1d") fail(origin, "control_window needs a heat1d model");
    model_json["window"] = j.at("control_window");
  }
  LoadedModel loaded = parse_model(model_json, origin);
  Eigen::VectorXd z0 = vector_field(require(j, "z0", origin), origin, "z0");
  if (static_cast<std::size_t>(z0.size()) != loaded.model.mode_count()) {
    std::ostringstream os;
    os << "\"z0\" has " << z0.size() << " entries, expected " << loaded.model.mode_count();
    fail(origin, os.str());
  }
  LoadedProblem out{
      TimeOptimalProblem{loaded.model, loaded.observation, z0, number(j, "M", origin), std::nullopt},
      origin, 1e-4};
  if (j.contains("target")) {
    out.problem.target = vector_field(j.at("target"), origin, "target");
    if (static_cast<std::size_t>(out.problem.target->size()) != loaded.model.mode_count()) {
      fail(origin, "\"target\" has the wrong length");
    }
  }
  if (j.contains("time_tol")) out.time_tol = number(j, "time_tol", origin);
  try {
    out.problem.validate();
  } catch (const obsmeas::Error& e) {
    fail(origin, e.what());
  }
  return out;
}

}  // namespace obsmeas::cli
