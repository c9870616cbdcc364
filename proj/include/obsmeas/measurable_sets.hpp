#pragma once

#include "obsmeas/gramian.hpp"
#include "obsmeas/report.hpp"
#include "obsmeas/spectral_hypothesis.hpp"
#include "obsmeas/spectral_model.hpp"
#include "obsmeas/time_sets.hpp"

#include <Eigen/Dense>

namespace obsmeas {

struct MeasurableSetResult {
  ObservabilityReport report;
  DerivedConstants constants;
  TelescopeSequence sequence;
};

/// Ratio used to build the first telescoping sequence of the analytic-semigroup
/// pipeline, before (C, theta) are known.
inline constexpr double kInitialTelescopeRatio = 0.5;

/// L^1 observability from a measurable set for analytic semigroups:
///   |S(T)u0| <= C int_E |B S(t) u0| dt.
/// Builds the telescoping sequence at the density point, fits the two-time
/// interpolation (C, theta) on its windows, picks
/// q = ((C + 1 - theta)/(C + 1))^{1/k}, and sums the weighted chain. The
/// assembled constant is checked on the verification family.
MeasurableSetResult obs_measurable_theorem1(const SpectralModel& model,
                                            const ObservationOperator& B,
                                            const IntervalBoundSpec& bound_spec, const TimeSet& E,
                                            double T, const VerificationOptions& options = {});

/// Same inequality under the spectral hypothesis: the one-time interpolation
/// is applied on [tau_m, l_m] with tau_m = l_{m+1} + (l_m - l_{m+1})/6 and the
/// sequence ratio is q = ((N + 1/2)/(N + 1))^{(1-gamma)/gamma}.
MeasurableSetResult obs_measurable_theorem2(const SpectralModel& model,
                                            const ObservationOperator& B,
                                            const HypothesisHCertificate& cert, const TimeSet& E,
                                            double T, const VerificationOptions& options = {});

/// Ratio |S(T)u0| / int_E |B S(t)u0| dt.
double l1_ratio(const SpectralModel& model, const ObservationOperator& B, const TimeSet& E,
                double T, const Eigen::VectorXd& u0, int nodes_per_panel = 32);

struct EmpiricalRatio {
  double ratio = 0.0;
  Eigen::VectorXd state;
};

/// Empirical optimal L^1 ratio: projected gradient ascent on the unit sphere
/// started from the best members of the verification family. A lower bound
/// for the sharp constant.
EmpiricalRatio optimal_l1_ratio(const SpectralModel& model, const ObservationOperator& B,
                                const TimeSet& E, double T,
                                const VerificationOptions& options = {});

}  // namespace obsmeas
