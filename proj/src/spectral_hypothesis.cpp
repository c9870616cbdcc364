#include "obsmeas/spectral_hypothesis.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/gramian.hpp"
#include "obsmeas/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace obsmeas {

double spectral_constant(const SpectralModel& model, const ObservationOperator& B, std::size_t m) {
  check_dimensions(model, B);
  if (m < 1 || m > model.mode_count()) {
    std::ostringstream os;
    os << "spectral_constant: m = " << m << " outside [1, " << model.mode_count() << "]";
    throw ValidationError(os.str());
  }
  const double smin = B.restricted_min_singular_value(m);
  if (!(smin > 0.0) || !std::isfinite(1.0 / smin)) {
    std::ostringstream os;
    os << "spectral_constant: restriction to the first " << m << " modes is rank deficient";
    throw UnobservableError(os.str(), "first " + std::to_string(m) + " modes");
  }
  return 1.0 / smin;
}

double HypothesisHCertificate::log_envelope(std::size_t m) const {
  return std::log(bigN) + bigN * std::pow(lambdas.at(m - 1), gamma);
}

void HypothesisHCertificate::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("certificate: gamma outside (0,1)");
  if (!(bigN >= 1.0)) throw ValidationError("certificate: N must be >= 1");
  if (!(mu > 0.0)) throw ValidationError("certificate: mu must be positive");
  if (lambdas.size() != per_mode_constants.size()) {
    throw ValidationError("certificate: per-mode table size mismatch");
  }
}

HypothesisHCertificate certify_hypothesis_h(const SpectralModel& model,
                                            const ObservationOperator& B, double gamma) {
  require_dissipative(model, "certify_hypothesis_h");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("certify_hypothesis_h: gamma in (0,1)");
  HypothesisHCertificate cert;
  cert.gamma = gamma;
  cert.mu = model.decay_mu();
  cert.lambda1 = model.lambda1();
  cert.lambdas = model.eigenvalues();
  for (std::size_t m = 1; m <= model.mode_count(); ++m) {
    cert.per_mode_constants.push_back(spectral_constant(model, B, m));
  }

  // N e^{N lambda^gamma} is increasing in N, so each mode gives a threshold.
  double N = 1.0;
  for (std::size_t m = 1; m <= model.mode_count(); ++m) {
    const double target = std::log(cert.per_mode_constants[m - 1]);
    const double power = std::pow(cert.lambdas[m - 1], gamma);
    auto f = [&](double x) { return std::log(x) + x * power - target; };
    if (f(N) >= 0.0) continue;
    double lo = N;
    double hi = 2.0 * N;
    while (f(hi) < 0.0) hi *= 2.0;
    while (hi - lo > 1e-9 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    N = hi;
    cert.binding_mode = m;
  }
  cert.bigN = N;
  return cert;
}

double lambda_optimization_max(double N, double gamma, double mu, double t) {
  const double star = std::pow(2.0 * gamma * N / (mu * t), 1.0 / (1.0 - gamma));
  return N * std::pow(star, gamma) - 0.5 * mu * star * t;
}

double lambda_optimization_bound(double N, double gamma, double mu, double t) {
  return N * std::pow(2.0 * gamma * N / (mu * t), gamma / (1.0 - gamma));
}

double OneTimeInterpolation::log_bound(double time) const {
  return std::log(C) + C * std::pow(time, -exponent);
}

double OneTimeInterpolation::log_sharp_bound(double time) const {
  return std::log(prefactor) + rate * std::pow(time, -exponent);
}

OneTimeInterpolation interpolation_one_time(const HypothesisHCertificate& cert, double norm_B,
                                            double bound_M, double t) {
  cert.validate();
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("interpolation_one_time: t must lie in (0,1]");
  if (!(bound_M >= 1.0)) throw ValidationError("interpolation_one_time: semigroup bound M >= 1");
  const double N = cert.bigN;
  const double gamma = cert.gamma;
  const double mu = cert.mu;
  OneTimeInterpolation out;
  out.t = t;
  out.exponent = gamma / (1.0 - gamma);

  // |S(t)u0| <= N(1+|B|) exp(N lambda^gamma - mu lambda t/2)(...) for every lambda >= lambda_1;
  // the exponent is majorized by N (2 gamma N / mu)^{a} t^{-a}.
  const double split_prefactor = N * (1.0 + norm_B);
  const double split_rate = N * std::pow(2.0 * gamma * N / mu, out.exponent);
  const double K = std::max(split_prefactor, split_rate);
  out.split_constant = K;

  // epsilon >= e^{-mu lambda_1 t/2} is covered by |S(t)| <= M, costing M e^{mu lambda_1}.
  const double log_patch = std::log(bound_M) + mu * cert.lambda1;
  // minimizing P (eps^{-1} a + eps b) over eps gives 2P sqrt(ab); square it.
  out.prefactor = std::exp(std::log(4.0) + 2.0 * log_patch + 2.0 * std::log(K));
  out.rate = 2.0 * K;
  out.C = std::max({out.prefactor, out.rate, 1.0});

  out.steps.push_back({"spectral_split_prefactor", split_prefactor, "N (1 + |B|)"});
  out.steps.push_back({"lambda_optimization_max", lambda_optimization_max(N, gamma, mu, t),
                       "max_lambda N lambda^gamma - mu lambda t / 2"});
  out.steps.push_back({"lambda_optimization_bound", lambda_optimization_bound(N, gamma, mu, t),
                       "N (2 gamma N / (mu t))^{gamma/(1-gamma)}"});
  out.steps.push_back({"split_constant_K", K, "K e^{K t^{-a}} dominates the split bound"});
  out.steps.push_back({"log_epsilon_patch", log_patch, "log(M e^{mu lambda_1})"});
  out.steps.push_back({"epsilon_minimization_prefactor", out.prefactor, "4 M^2 e^{2 mu lambda_1} K^2"});
  out.steps.push_back({"epsilon_minimization_rate", out.rate, "2 K"});
  out.steps.push_back({"interpolation_constant_C", out.C, "max(prefactor, rate, 1)"});
  return out;
}

ObservabilityReport verify_one_time_interpolation(const SpectralModel& model,
                                                  const ObservationOperator& B,
                                                  const OneTimeInterpolation& interp, double t,
                                                  const VerificationOptions& options) {
  require_dissipative(model, "verify_one_time_interpolation");
  check_dimensions(model, B);
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("verify_one_time_interpolation: t in (0,1]");
  const auto family = trial_family(model.mode_count(), options.random_states, options.seed);
  // |S u|^2 <= C e^{C t^-a} |B S u| |u|  <=>  2 log|Su| - log|BSu| - log|u| <= log bound
  const auto ratios = parallel_map<double>(family.size(), [&](std::size_t i) {
    const Eigen::VectorXd su = semigroup_apply(model, t, family[i]);
    const double bsu = (B.matrix() * su).norm();
    const double s = su.norm();
    if (s == 0.0) return -std::numeric_limits<double>::infinity();
    if (bsu == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::log(s) - std::log(bsu) - std::log(family[i].norm());
  });
  ObservabilityReport report;
  report.kind = ReportKind::interpolation_one_time;
  report.log_constant = interp.log_bound(t);
  report.params = {{"t", t}, {"C", interp.C}, {"exponent", interp.exponent}};
  report.steps = interp.steps;
  report.states_checked = family.size();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] > report.log_worst_ratio) {
      report.log_worst_ratio = ratios[i];
      report.witness_state = family[i];
    }
    if (ratios[i] > report.log_constant + std::log1p(kRatioSlack)) ++report.violations;
  }
  return report;
}

}  // namespace obsmeas
