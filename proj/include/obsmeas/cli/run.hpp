#pragma once

#include "obsmeas/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace obsmeas::cli {

inline constexpr int kExitVerified = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolated = 2;

std::vector<std::string> command_names();

struct RunConfig {
  std::string command;
  std::string model_path;
  std::string preset;
  std::string set_path;
  std::string problem_path;
  std::string spec_path;
  std::string out_dir = ".";
  std::uint64_t seed = kSuiteSeed;
  std::optional<double> tol;
  std::size_t states = 500;
  double T = 1.0;
  double gamma = 0.5;
  std::vector<double> times;
  std::vector<double> L_grid;
  std::optional<double> d;
  std::optional<double> k;
  double M = 1.0;
  int beta_max = 8;
  std::size_t family = 20;
  int degree_max = 6;
  std::size_t poly_count = 200;
  double bb_tol = 1e-2;
  std::optional<double> t1;
  std::optional<double> t2;
  double eta = 1.0 / 3.0;
  std::string axis;
  std::vector<double> values;
};

/// Runs one command, writing artifacts under config.out_dir. Returns
/// kExitVerified, kExitViolated (witness dumped next to the report) or
/// kExitUsage. Progress goes to `out`, errors to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments into a config and runs it.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace obsmeas::cli
