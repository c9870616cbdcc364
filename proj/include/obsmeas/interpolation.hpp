#pragma once

#include "obsmeas/gramian.hpp"
#include "obsmeas/report.hpp"
#include "obsmeas/spectral_model.hpp"
#include "obsmeas/time_sets.hpp"

#include <Eigen/Dense>

#include <vector>

namespace obsmeas {

/// Smallest x >= 1 with log(x) + x * rate >= target (rate > 0).
double solve_log_linear(double target, double rate);

/// Dyadic exponents tried when fitting the two-time interpolation.
std::vector<double> default_theta_grid();

inline constexpr double kTwoTimeConstantCap = 1e6;

/// Per-state data of one window (t1, t2): |u(t1)|, |u(t2)| and the observed
/// L^1 mass over E intersect (t1, t2), all as logs.
struct TwoTimeSample {
  double log_start;
  double log_end;
  double log_mass;
};

std::vector<TwoTimeSample> sample_two_times(const SpectralModel& model,
                                            const ObservationOperator& B, const TimeSet& E,
                                            double t1, double t2,
                                            const std::vector<Eigen::VectorXd>& family,
                                            int nodes_per_panel = 32);

/// Least C >= 1 making
///   |u(t2)| <= (C e^{C/h^k} mass)^theta |u(t1)|^{1-theta}
/// hold for every sample, h = t2 - t1.
double fit_two_time_constant(const std::vector<TwoTimeSample>& samples, double h, double k,
                             double theta);

/// Numerically certified two-time interpolation on (t1, t2): theta is the
/// largest grid value whose fitted C stays below kTwoTimeConstantCap. The
/// report's log constant is theta (log C + C/h^k), compared against
/// log|u(t2)| - (1-theta) log|u(t1)| - theta log(mass).
ObservabilityReport interpolation_two_times(const SpectralModel& model,
                                            const ObservationOperator& B,
                                            const IntervalBoundSpec& bound_spec, double t1,
                                            double t2, const TimeSet& E, double eta,
                                            const VerificationOptions& options = {});

}  // namespace obsmeas
