#pragma once

#include "obsmeas/analytic_bounds.hpp"
#include "obsmeas/cli/descriptors.hpp"
#include "obsmeas/optimal_control.hpp"
#include "obsmeas/report.hpp"
#include "obsmeas/spectral_hypothesis.hpp"

#include <string>
#include <vector>

namespace obsmeas::cli {

inline constexpr int kSchemaVersion = 1;

/// Non-finite values become null.
Json number_json(double value);
Json vector_json(const Eigen::VectorXd& v);
Json matrix_json(const Eigen::MatrixXd& m);

Json steps_json(const std::vector<ProofStep>& steps);
Json report_json(const ObservabilityReport& report);
Json constants_json(const DerivedConstants& constants);
Json bound_spec_json(const IntervalBoundSpec& spec);
Json certificate_json(const HypothesisHCertificate& cert);
Json interpolation_json(const OneTimeInterpolation& interp);
Json derivative_certificate_json(const DerivativeBoundCertificate& cert);
Json solution_json(const MinNormSolution& solution);
Json bang_bang_json(const BangBangReport& report);

/// Rows of comma-separated values with a header; numbers use %.17g.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  void add_comment(const std::string& line);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> comments_;
};

std::string format_number(double value);

void write_text(const std::string& path, const std::string& text);
/// Pretty-printed with a trailing newline.
void write_json(const std::string& path, const Json& j);

}  // namespace obsmeas::cli
