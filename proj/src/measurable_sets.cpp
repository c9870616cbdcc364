#include "obsmeas/measurable_sets.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/interpolation.hpp"
#include "obsmeas/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace obsmeas {

namespace {

void check_horizon(const TimeSet& E, double T, const char* who) {
  if (!(T > 0.0)) throw ValidationError(std::string(who) + ": T must be positive");
  if (E.intervals().back().hi > T * (1.0 + 1e-14)) {
    throw ValidationError(std::string(who) + ": time set must lie inside (0, T)");
  }
}

// Every gap up to 40, then geometrically thinned indices, always the last.
std::vector<std::size_t> sampled_gap_indices(std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t m = 0; m < std::min<std::size_t>(count, 40); ++m) idx.push_back(m);
  double x = 40.0;
  while (static_cast<std::size_t>(x) < count) {
    const auto m = static_cast<std::size_t>(x);
    if (m != idx.back()) idx.push_back(m);
    x *= 1.2;
  }
  if (count > 0 && idx.back() != count - 1) idx.push_back(count - 1);
  return idx;
}

const Interval& home_interval(const TimeSet& E, double point) {
  for (const auto& iv : E.intervals()) {
    if (iv.lo < point && point < iv.hi) return iv;
  }
  throw ValidationError("density point is not interior to the time set");
}

// Fills worst ratio / violations of an L^1 bound over the family.
void verify_l1(ObservabilityReport& report, const SpectralModel& model,
               const ObservationOperator& B, const TimeSet& E, double T,
               const std::vector<Eigen::VectorXd>& family, int nodes_per_panel) {
  const ObservationIntegrator integrator(model, B, E.intervals(), nodes_per_panel);
  const Eigen::ArrayXd terminal = (-model.eigenvalue_vector().array() * T).exp();
  const auto ratios = parallel_map<double>(family.size(), [&](std::size_t i) {
    const double lhs = (terminal * family[i].array()).matrix().norm();
    return std::log(lhs) - std::log(integrator.integrate(family[i]));
  });
  report.states_checked = family.size();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] > report.log_worst_ratio) {
      report.log_worst_ratio = ratios[i];
      report.witness_state = family[i];
    }
    if (ratios[i] > report.log_constant + std::log1p(kRatioSlack)) ++report.violations;
  }
}

std::vector<Eigen::VectorXd> pipeline_family(const SpectralModel& model,
                                             const ObservationOperator& B, const TimeSet& E,
                                             double T, const VerificationOptions& options) {
  VerificationOptions quiet;
  quiet.random_states = 0;
  const auto witness = obs_constant_l2(model, B, E, T, quiet).witness_state;
  return trial_family(model.mode_count(), options.random_states, options.seed, {witness});
}

}  // namespace

MeasurableSetResult obs_measurable_theorem1(const SpectralModel& model,
                                            const ObservationOperator& B,
                                            const IntervalBoundSpec& bound_spec, const TimeSet& E,
                                            double T, const VerificationOptions& options) {
  require_dissipative(model, "obs_measurable_theorem1");
  check_dimensions(model, B);
  bound_spec.validate();
  check_horizon(E, T, "obs_measurable_theorem1");
  const double k = bound_spec.k;
  const auto family = pipeline_family(model, B, E, T, options);

  MeasurableSetResult result;
  auto& steps = result.constants.steps;
  const double limit = density_point(E);
  const Interval& home = home_interval(E, limit);
  const double first = limit + std::min(1.0, home.hi - limit) / 2.0;
  steps.push_back({"density_point", limit, "midpoint of the longest interval of E"});
  steps.push_back({"first_point", first, "l_1"});

  // pass 1: (C, theta) on the first window of a provisional sequence
  const TelescopeSequence provisional = telescope_at(E, limit, first, kInitialTelescopeRatio);
  const double h0 = provisional.gap(0);
  const auto first_samples = sample_two_times(model, B, E, provisional.points[1],
                                              provisional.points[0], family,
                                              options.nodes_per_panel);
  double theta = 0.0;
  double C = 0.0;
  for (double candidate : default_theta_grid()) {
    theta = candidate;
    C = fit_two_time_constant(first_samples, h0, k, candidate);
    if (C <= kTwoTimeConstantCap) break;
  }
  steps.push_back({"two_time_C_first_window", C, "fitted on the provisional first window"});
  steps.push_back({"two_time_theta", theta, "largest dyadic theta with C below the cap"});

  const double q = std::pow((C + 1.0 - theta) / (C + 1.0), 1.0 / k);
  steps.push_back({"ratio_q", q, "((C + 1 - theta)/(C + 1))^{1/k}"});

  // pass 2: rebuild with q and refit C over the windows of the final sequence
  TelescopeSequence seq = telescope_at(E, limit, first, q);
  double C_all = C;
  for (std::size_t m : sampled_gap_indices(seq.gap_count())) {
    const auto samples = sample_two_times(model, B, E, seq.points[m + 1], seq.points[m], family,
                                          options.nodes_per_panel);
    C_all = std::max(C_all, fit_two_time_constant(samples, seq.gap(m), k, theta));
  }
  steps.push_back({"two_time_C_all_windows", C_all, "max over the windows of the final sequence"});

  // epsilon = exp(-c / h^k); c = 1 when the refit did not move C
  const double qk = std::pow(q, k);
  const double c = C_all * (1.0 - qk) / (qk - (1.0 - theta));
  steps.push_back({"epsilon_exponent_c", c, "epsilon = exp(-c / h^k)"});
  const double h1 = seq.gap(0);
  const double weight = C_all + c * (1.0 - theta);
  const double log_constant = std::log(C_all) + weight / std::pow(h1, k);
  steps.push_back({"first_gap", h1, "l_1 - l_2"});
  steps.push_back({"log_constant", log_constant, "log C + (C + c(1-theta)) / (l_1 - l_2)^k"});
  const double last_gap = seq.gap(seq.gap_count() - 1);
  steps.push_back({"log_tail_remainder", -weight / std::pow(last_gap, k),
                   "log of the dropped telescoping tail weight (M = 1)"});

  result.sequence = std::move(seq);
  result.constants.log_c_thm1 = log_constant;
  result.constants.q_thm1 = q;
  result.constants.lemma23_c = C_all;
  result.constants.lemma23_theta = theta;

  auto& report = result.report;
  report.kind = ReportKind::l1_set_thm1;
  report.log_constant = log_constant;
  report.theta = theta;
  report.steps = steps;
  report.params = {{"T", T}, {"measure_E", E.measure()}, {"d", bound_spec.d}, {"k", k},
                   {"q", q}};
  verify_l1(report, model, B, E, T, family, options.nodes_per_panel);
  return result;
}

MeasurableSetResult obs_measurable_theorem2(const SpectralModel& model,
                                            const ObservationOperator& B,
                                            const HypothesisHCertificate& cert, const TimeSet& E,
                                            double T, const VerificationOptions& options) {
  require_dissipative(model, "obs_measurable_theorem2");
  check_dimensions(model, B);
  check_horizon(E, T, "obs_measurable_theorem2");
  cert.validate();
  if (cert.lambdas != model.eigenvalues() || cert.lambda1 != model.lambda1() ||
      cert.mu != model.decay_mu()) {
    throw PreconditionError("certificate inconsistent with model: spectrum differs");
  }
  for (std::size_t m = 1; m <= model.mode_count(); ++m) {
    const double Nm = spectral_constant(model, B, m);
    if (std::log(Nm) > cert.log_envelope(m) + 1e-9) {
      std::ostringstream os;
      os << "certificate inconsistent with model: mode " << m << " needs N_m = " << Nm;
      throw PreconditionError(os.str());
    }
  }

  MeasurableSetResult result;
  auto& steps = result.constants.steps;
  const double N = cert.bigN;
  const double gamma = cert.gamma;
  const auto interp = interpolation_one_time(cert, B.operator_norm(), 1.0, 1.0);
  const double a = interp.exponent;
  steps.insert(steps.end(), interp.steps.begin(), interp.steps.end());

  const double q = std::pow((N + 0.5) / (N + 1.0), (1.0 - gamma) / gamma);
  steps.push_back({"ratio_q", q, "((N + 1/2)/(N + 1))^{(1-gamma)/gamma}"});
  TelescopeSequence seq = telescope_for_density(E, q);
  steps.push_back({"density_point", seq.limit, "midpoint of the longest interval of E"});

  // K e^{K/h^a} must dominate the averaged one-time bound on every window.
  double K = 1.0;
  for (std::size_t m = 0; m < seq.gap_count(); ++m) {
    const double h = seq.gap(m);
    const double tau = seq.points[m + 1] + h / 6.0;
    const double mass = intersect_measure(E, tau, seq.points[m]);
    const double log_window = interp.log_sharp_bound(h / 6.0) - std::log(4.0 * mass);
    K = std::max(K, solve_log_linear(log_window, std::pow(h, -a)));
  }
  steps.push_back({"telescoping_step_constant", K, "K e^{K/h^a} over every window"});
  const double c = K / (2.0 * N);
  steps.push_back({"epsilon_exponent_c", c, "epsilon = exp(-c / h^a), c = K/(2N)"});
  const double h1 = seq.gap(0);
  const double log_constant = std::log(K) + (K + c) / std::pow(h1, a);
  steps.push_back({"first_gap", h1, "l_1 - l_2"});
  steps.push_back({"log_constant", log_constant, "log K + (K + c) / (l_1 - l_2)^a"});

  result.sequence = std::move(seq);
  result.constants.c_interp = interp.C;
  result.constants.interp_exponent = a;
  result.constants.q_thm2 = q;
  result.constants.step_constant_thm2 = K;
  result.constants.log_c_thm2 = log_constant;

  auto& report = result.report;
  report.kind = ReportKind::l1_set_thm2;
  report.log_constant = log_constant;
  report.steps = steps;
  report.params = {{"T", T}, {"measure_E", E.measure()}, {"N", N}, {"gamma", gamma}, {"q", q}};
  const auto family = pipeline_family(model, B, E, T, options);
  verify_l1(report, model, B, E, T, family, options.nodes_per_panel);
  return result;
}

double l1_ratio(const SpectralModel& model, const ObservationOperator& B, const TimeSet& E,
                double T, const Eigen::VectorXd& u0, int nodes_per_panel) {
  return semigroup_apply(model, T, u0).norm() /
         l1_observation_integral(model, B, E, u0, nodes_per_panel);
}

EmpiricalRatio optimal_l1_ratio(const SpectralModel& model, const ObservationOperator& B,
                                const TimeSet& E, double T, const VerificationOptions& options) {
  require_dissipative(model, "optimal_l1_ratio");
  check_dimensions(model, B);
  check_horizon(E, T, "optimal_l1_ratio");
  const ObservationIntegrator integrator(model, B, E.intervals(), options.nodes_per_panel);
  const Eigen::VectorXd terminal2 = (-2.0 * T * model.eigenvalue_vector().array()).exp().matrix();

  auto objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
    const double top = terminal2.dot(u.cwiseAbs2());
    Eigen::VectorXd g_mass;
    const double mass = integrator.integrate_with_gradient(u, g_mass);
    if (grad) *grad = terminal2.cwiseProduct(u) / top - g_mass / mass;
    return 0.5 * std::log(top) - std::log(mass);
  };

  const auto family = pipeline_family(model, B, E, T, options);
  std::vector<double> start_values(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) start_values[i] = objective(family[i], nullptr);
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t starts = std::min<std::size_t>(8, family.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t x, std::size_t y) { return start_values[x] > start_values[y]; });

  EmpiricalRatio best;
  double best_log = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::VectorXd u = family[order[s]];
    Eigen::VectorXd grad;
    double value = objective(u, &grad);
    double step = 1.0;
    for (int iter = 0; iter < 300 && step > 1e-14; ++iter) {
      const Eigen::VectorXd tangent = grad - grad.dot(u) * u;
      if (tangent.norm() < 1e-13) break;
      bool moved = false;
      while (step > 1e-14) {
        const Eigen::VectorXd trial = (u + step * tangent).normalized();
        Eigen::VectorXd trial_grad;
        const double trial_value = objective(trial, &trial_grad);
        if (trial_value > value) {
          u = trial;
          grad = trial_grad;
          value = trial_value;
          step *= 2.0;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (value > best_log) {
      best_log = value;
      best.state = u;
    }
  }
  best.ratio = std::exp(best_log);
  return best;
}

}  // namespace obsmeas
