#pragma once

#include "obsmeas/spectral_model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace obsmeas {

/// dz/dt = A z + B^T f, |f(t)| <= M, steered from z0 to the target (origin by
/// default). The control operator B : X -> U is used through its transpose.
struct TimeOptimalProblem {
  SpectralModel model;
  ObservationOperator control_op;
  Eigen::VectorXd z0;
  double bound_M = 1.0;
  std::optional<Eigen::VectorXd> target;

  void validate() const;
};

/// Piecewise-constant control: cell i is [times[i], times[i+1]) with value
/// row i of `values`.
struct ControlGrid {
  std::vector<double> times;
  Eigen::MatrixXd values;
  std::vector<bool> vanishing;  // cells where the dual direction degenerates

  std::size_t cell_count() const { return times.empty() ? 0 : times.size() - 1; }
  std::size_t vanishing_count() const;
};

struct SolverParams {
  double eps_start = 1e-2;
  double eps_end = 1e-8;
  int newton_iterations = 60;
  int polish_steps = 200;
  double cells_per_unit_time = 512.0;
  int nodes_per_panel = 64;
  double panel_width = 1.0 / 64.0;
  /// Declared terminal tolerance, relative to |z0|.
  double residual_tolerance = 1e-3;
};

struct MinNormSolution {
  double horizon_T = 0.0;
  double min_norm = 0.0;        // M*(T) = 1 / J(phi*)
  double dual_objective = 0.0;  // J(phi*) = int_0^T |B S(s) phi*| ds
  Eigen::VectorXd dual_vector;
  ControlGrid control;
  Eigen::VectorXd terminal_state;
  double terminal_residual = 0.0;
  double residual_tolerance = 0.0;
  int newton_steps = 0;

  bool within_tolerance() const { return terminal_residual <= residual_tolerance; }
};

/// Exact per-cell integration of a piecewise-constant control.
Eigen::VectorXd simulate(const SpectralModel& model, const ObservationOperator& control_op,
                         const Eigen::VectorXd& z0, const ControlGrid& control);

/// Minimal-L^inf control in time T through the dual problem
///   min int_0^T |B S(s) phi| ds  subject to  <S(T) z0 - z1, phi> = 1,
/// solved by a smoothed-norm homotopy with Newton steps, then a subgradient
/// polish. f*(t) = -M* w / |w|, w = B S(T - t) phi*.
MinNormSolution min_norm_control(const TimeOptimalProblem& problem, double T,
                                 const SolverParams& params = {});

/// M*(T) only, without building the control.
double min_norm_value(const TimeOptimalProblem& problem, double T,
                      const SolverParams& params = {});

struct OptimalTimeResult {
  double time = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int bisection_steps = 0;
  MinNormSolution solution;
};

inline constexpr double kHorizonCap = 1e3;

/// Bisection for M*(T) = M. The upper end doubles from 0.1 until M*(T) < M;
/// the returned solution sits at the upper end of the final bracket, so its
/// norm never exceeds M.
OptimalTimeResult optimal_time(const TimeOptimalProblem& problem, double time_tol = 1e-4,
                               const SolverParams& params = {});

struct BangBangReport {
  double fraction_on_bound = 0.0;
  double max_deviation = 0.0;
  double vanishing_fraction = 0.0;
  std::vector<double> switching_times;
};

/// Compares |f*(t)| with `level` on every cell.
BangBangReport bang_bang_check(const MinNormSolution& solution, double level, double tol);

}  // namespace obsmeas
