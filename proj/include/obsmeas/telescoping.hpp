#pragma once

#include "obsmeas/gramian.hpp"
#include "obsmeas/report.hpp"
#include "obsmeas/spectral_model.hpp"

#include <vector>

namespace obsmeas {

/// Upgrade of an interval bound
///   |S(L)u0| <= theta(L) e^{d/L^k} (int_0^L |B S(t)u0|^2 dt)^{1/2}
/// to the L^1 bound |S(T)u0| <= F(T) e^{N/T^k} int_0^T |B S(t)u0| dt along
/// l_m = q^m T, with |S(t)| <= M e^{alpha t}. A squared-form spec is converted
/// to the root form first. Fills f_T, n_prop24, q_prop24 and log_c_prop24.
DerivedConstants telescope_l2_to_l1(const IntervalBoundSpec& bound_spec, double norm_B, double M,
                                    double alpha, double T);

/// Checks |S(T)u0| <= exp(log_constant) int_0^T |B S(t)u0| dt on the
/// verification family (complex states for unitary models).
ObservabilityReport verify_l1_interval(const SpectralModel& model, const ObservationOperator& B,
                                       double T, double log_constant,
                                       const VerificationOptions& options = {});

/// Largest log excess of the exact interval constant over the declared root
/// bound on the grid; <= 0 means the hypothesis of the upgrade holds there.
double interval_bound_excess(const SpectralModel& model, const ObservationOperator& B,
                             const IntervalBoundSpec& bound_spec, const std::vector<double>& L_grid);

}  // namespace obsmeas
