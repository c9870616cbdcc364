#include "obsmeas/cli/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace obsmeas::cli {

Json number_json(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_json(v(i)));
  return out;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

Json steps_json(const std::vector<ProofStep>& steps) {
  Json out = Json::array();
  for (const auto& s : steps) {
    out.push_back({{"name", s.name}, {"value", number_json(s.value)}, {"detail", s.detail}});
  }
  return out;
}

Json report_json(const ObservabilityReport& report) {
  Json params = Json::object();
  for (const auto& [key, value] : report.params) params[key] = number_json(value);
  Json out = {
      {"kind", to_string(report.kind)},
      {"log_constant", number_json(report.log_constant)},
      {"constant", number_json(report.constant())},
      {"log_worst_ratio", number_json(report.log_worst_ratio)},
      {"worst_ratio", number_json(report.worst_ratio())},
      {"witness_state", vector_json(report.witness_state)},
      {"states_checked", report.states_checked},
      {"violations", report.violations},
      {"valid", report.valid()},
      {"params", params},
      {"steps", steps_json(report.steps)},
  };
  if (report.theta) out["theta"] = number_json(*report.theta);
  return out;
}

Json constants_json(const DerivedConstants& c) {
  Json out = Json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) out[key] = number_json(*v);
  };
  put("log_C_thm1", c.log_c_thm1);
  put("q_thm1", c.q_thm1);
  put("C_interp", c.c_interp);
  put("interp_exponent", c.interp_exponent);
  put("lemma23_C", c.lemma23_c);
  put("lemma23_theta", c.lemma23_theta);
  put("F_T", c.f_T);
  put("N_prop24", c.n_prop24);
  put("q_prop24", c.q_prop24);
  put("log_C_prop24", c.log_c_prop24);
  put("q_thm2", c.q_thm2);
  put("step_constant_thm2", c.step_constant_thm2);
  put("log_C_thm2", c.log_c_thm2);
  out["steps"] = steps_json(c.steps);
  return out;
}

Json bound_spec_json(const IntervalBoundSpec& spec) {
  Json samples = Json::array();
  for (const auto& [L, C] : spec.samples) samples.push_back({number_json(L), number_json(C)});
  Json theta = Json::array();
  for (const auto& [L, t] : spec.theta_table) theta.push_back({number_json(L), number_json(t)});
  return {
      {"d", number_json(spec.d)},
      {"k", number_json(spec.k)},
      {"form", spec.form == IntervalBoundSpec::Form::root ? "root" : "squared"},
      {"theta", spec.theta_table.empty() ? number_json(spec.theta_constant) : theta},
      {"degenerate", spec.degenerate},
      {"envelope_slack", number_json(spec.envelope_slack)},
      {"samples", samples},
  };
}

Json certificate_json(const HypothesisHCertificate& cert) {
  Json per_mode = Json::array();
  for (std::size_t m = 0; m < cert.per_mode_constants.size(); ++m) {
    per_mode.push_back({{"m", m + 1},
                        {"lambda", number_json(cert.lambdas[m])},
                        {"N_m", number_json(cert.per_mode_constants[m])},
                        {"log_envelope", number_json(cert.log_envelope(m + 1))}});
  }
  return {{"gamma", number_json(cert.gamma)}, {"N", number_json(cert.bigN)},
          {"mu", number_json(cert.mu)},       {"lambda1", number_json(cert.lambda1)},
          {"binding_mode", cert.binding_mode}, {"per_mode", per_mode}};
}

Json interpolation_json(const OneTimeInterpolation& interp) {
  return {{"C", number_json(interp.C)},
          {"prefactor", number_json(interp.prefactor)},
          {"rate", number_json(interp.rate)},
          {"exponent", number_json(interp.exponent)},
          {"split_constant", number_json(interp.split_constant)},
          {"t", number_json(interp.t)},
          {"log_bound", number_json(interp.log_bound(interp.t))},
          {"steps", steps_json(interp.steps)}};
}

Json derivative_certificate_json(const DerivativeBoundCertificate& cert) {
  return {{"K", number_json(cert.bigK)},          {"rho", number_json(cert.rho)},
          {"max_order", cert.max_order},          {"s", number_json(cert.s)},
          {"t_values", cert.t_values},            {"min_log_slack", number_json(cert.min_slack())},
          {"valid", cert.valid()}};
}

Json solution_json(const MinNormSolution& s) {
  return {{"horizon_T", number_json(s.horizon_T)},
          {"min_norm", number_json(s.min_norm)},
          {"dual_objective", number_json(s.dual_objective)},
          {"dual_vector", vector_json(s.dual_vector)},
          {"terminal_state", vector_json(s.terminal_state)},
          {"terminal_residual", number_json(s.terminal_residual)},
          {"residual_tolerance", number_json(s.residual_tolerance)},
          {"within_tolerance", s.within_tolerance()},
          {"cells", s.control.cell_count()},
          {"vanishing_cells", s.control.vanishing_count()},
          {"newton_steps", s.newton_steps}};
}

Json bang_bang_json(const BangBangReport& r) {
  Json switches = Json::array();
  for (double t : r.switching_times) switches.push_back(number_json(t));
  return {{"fraction_on_bound", number_json(r.fraction_on_bound)},
          {"max_deviation", number_json(r.max_deviation)},
          {"vanishing_fraction", number_json(r.vanishing_fraction)},
          {"switching_times", switches}};
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& row) { rows_.push_back(row); }

void CsvTable::add_comment(const std::string& line) { comments_.push_back(line); }

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
  for (const auto& c : comments_) os << "# " << c << "\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot write file");
  out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace obsmeas::cli
