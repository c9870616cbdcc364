#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace obsmeas {

/// Fixed seed of the verification suite.
inline constexpr std::uint64_t kSuiteSeed = 0x0B5E3A5ULL;

/// Relative slack allowed when comparing a sampled ratio with a constant.
inline constexpr double kRatioSlack = 1e-9;

struct VerificationOptions {
  std::size_t random_states = 500;
  std::uint64_t seed = kSuiteSeed;
  int nodes_per_panel = 32;
};

enum class ReportKind {
  l2_interval,
  l2_set,
  l1_set_thm1,
  l1_set_thm2,
  l1_interval_prop24,
  interpolation_one_time,
  interpolation_two_times,
};

std::string to_string(ReportKind kind);

/// One logged step of a constant-assembly pipeline. Values that can overflow
/// are logged through their natural logarithm and say so in `name`.
struct ProofStep {
  std::string name;
  double value;
  std::string detail;
};

/// Result of checking an inequality "lhs <= constant * rhs" on a family of
/// states. Constants are carried in log space because the assembled
/// telescoping constants routinely exceed the double range.
struct ObservabilityReport {
  ReportKind kind = ReportKind::l2_set;
  double log_constant = 0.0;
  Eigen::VectorXd witness_state;
  double log_worst_ratio = -std::numeric_limits<double>::infinity();
  std::size_t states_checked = 0;
  std::size_t violations = 0;
  std::optional<double> theta;
  std::map<std::string, double> params;
  std::vector<ProofStep> steps;

  double constant() const { return std::exp(log_constant); }
  double worst_ratio() const { return std::exp(log_worst_ratio); }
  bool valid() const {
    return violations == 0 && log_worst_ratio <= log_constant + std::log1p(kRatioSlack);
  }
};

/// Named constants produced along the proof pipelines.
struct DerivedConstants {
  std::optional<double> log_c_thm1;
  std::optional<double> q_thm1;
  std::optional<double> c_interp;
  std::optional<double> interp_exponent;
  std::optional<double> lemma23_c;
  std::optional<double> lemma23_theta;
  std::optional<double> f_T;
  std::optional<double> n_prop24;
  std::optional<double> q_prop24;
  std::optional<double> log_c_prop24;
  std::optional<double> q_thm2;
  std::optional<double> step_constant_thm2;
  std::optional<double> log_c_thm2;
  std::vector<ProofStep> steps;
};

}  // namespace obsmeas
