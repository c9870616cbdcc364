#pragma once

#include "obsmeas/report.hpp"
#include "obsmeas/spectral_model.hpp"

#include <cstddef>
#include <vector>

namespace obsmeas {

/// Smallest N_m with |f| <= N_m |B f| on the span of the first m modes,
/// i.e. 1 / sigma_min(B restricted to those columns).
double spectral_constant(const SpectralModel& model, const ObservationOperator& B, std::size_t m);

/// Certified constants of the spectral hypothesis: nested coordinate
/// subspaces, decay rate mu off them, and |f| <= N e^{N lambda_m^gamma} |Bf|.
struct HypothesisHCertificate {
  double gamma = 0.5;
  double bigN = 1.0;
  double mu = 1.0;
  double lambda1 = 1.0;
  std::vector<double> lambdas;
  std::vector<double> per_mode_constants;
  std::size_t binding_mode = 0;  // 1-based, 0 when N = 1 is not binding

  /// log of the envelope N e^{N lambda_m^gamma} at mode m (1-based).
  double log_envelope(std::size_t m) const;
  void validate() const;
};

/// Smallest N >= 1 (bisection to 1e-9) meeting the envelope on every mode.
HypothesisHCertificate certify_hypothesis_h(const SpectralModel& model,
                                            const ObservationOperator& B, double gamma);

/// max over lambda > 0 of N lambda^gamma - mu lambda t / 2, attained at
/// lambda* = (2 gamma N / (mu t))^{1/(1-gamma)}.
double lambda_optimization_max(double N, double gamma, double mu, double t);
/// The closed-form majorant N (2 gamma N / (mu t))^{gamma/(1-gamma)}.
double lambda_optimization_bound(double N, double gamma, double mu, double t);

/// Constants of the one-time interpolation inequality
///   |S(t)u0| <= (C exp(C t^{-a}) |B S(t) u0|)^{1/2} |u0|^{1/2},  a = gamma/(1-gamma),
/// assembled from the spectral split, the lambda optimization and the
/// epsilon minimization. `prefactor` and `rate` are the two halves of the
/// sharper bound prefactor * exp(rate t^{-a}); C = max(prefactor, rate).
struct OneTimeInterpolation {
  double C = 1.0;
  double prefactor = 1.0;
  double rate = 1.0;
  double exponent = 1.0;
  double split_constant = 1.0;  // K with K e^{K t^{-a}} above the split bound
  double t = 1.0;
  std::vector<ProofStep> steps;

  /// log of C exp(C t^{-a}).
  double log_bound(double time) const;
  /// log of prefactor exp(rate t^{-a}).
  double log_sharp_bound(double time) const;
};

OneTimeInterpolation interpolation_one_time(const HypothesisHCertificate& cert, double norm_B,
                                            double bound_M, double t);

/// Checks the one-time inequality with the unified constant C at time t on the
/// verification family.
ObservabilityReport verify_one_time_interpolation(const SpectralModel& model,
                                                  const ObservationOperator& B,
                                                  const OneTimeInterpolation& interp, double t,
                                                  const VerificationOptions& options = {});

}  // namespace obsmeas
