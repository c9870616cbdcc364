#include "obsmeas/telescoping.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace obsmeas {

DerivedConstants telescope_l2_to_l1(const IntervalBoundSpec& bound_spec, double norm_B, double M,
                                    double alpha, double T) {
  bound_spec.validate();
  if (!(T > 0.0)) throw ValidationError("telescope_l2_to_l1: T must be positive");
  if (!(M > 0.0) || !(norm_B > 0.0) || alpha < 0.0) {
    throw ValidationError("telescope_l2_to_l1: need M > 0, |B| > 0, alpha >= 0");
  }
  const IntervalBoundSpec root = bound_spec.root_form();
  const double d = root.d;
  const double k = root.k;

  DerivedConstants out;
  const double q = std::pow((2.0 * d + 1.0) / (2.0 * d + 2.0), 1.0 / k);
  const double theta = root.theta(T);
  const double F = theta * theta * norm_B * M * std::exp(alpha * T);
  const double N = (2.0 * d + 1.0) / std::pow(1.0 - q, k);
  const double log_constant = std::log(F) + N / std::pow(T, k);

  out.steps.push_back({"root_form_d", d, "d of the root-form interval bound"});
  out.steps.push_back({"ratio_q", q, "((2d + 1)/(2d + 2))^{1/k}"});
  out.steps.push_back({"F_T", F, "theta(T)^2 |B| M e^{alpha T}"});
  out.steps.push_back({"exponent_N", N, "(2d + 1)/(1 - q)^k"});
  out.steps.push_back({"log_constant", log_constant, "log F(T) + N / T^k"});
  out.f_T = F;
  out.n_prop24 = N;
  out.q_prop24 = q;
  out.log_c_prop24 = log_constant;
  return out;
}

ObservabilityReport verify_l1_interval(const SpectralModel& model, const ObservationOperator& B,
                                       double T, double log_constant,
                                       const VerificationOptions& options) {
  check_dimensions(model, B);
  if (!(T > 0.0)) throw ValidationError("verify_l1_interval: T must be positive");
  const ObservationIntegrator integrator(model, B, {{0.0, T}}, options.nodes_per_panel);

  ObservabilityReport report;
  report.kind = ReportKind::l1_interval_prop24;
  report.log_constant = log_constant;
  report.params = {{"T", T}};

  std::vector<double> ratios;
  std::vector<Eigen::VectorXd> shown;
  if (model.is_unitary()) {
    const auto family =
        complex_trial_family(model.mode_count(), options.random_states, options.seed);
    ratios = parallel_map<double>(family.size(), [&](std::size_t i) {
      const double lhs = semigroup_apply(model, T, family[i]).norm();
      return std::log(lhs) - std::log(integrator.integrate(family[i]));
    });
    // witnesses of unitary runs are reported through their moduli
    for (const auto& u : family) shown.push_back(u.cwiseAbs());
  } else {
    shown = trial_family(model.mode_count(), options.random_states, options.seed);
    ratios = parallel_map<double>(shown.size(), [&](std::size_t i) {
      const double lhs = semigroup_apply(model, T, shown[i]).norm();
      return std::log(lhs) - std::log(integrator.integrate(shown[i]));
    });
  }
  report.states_checked = ratios.size();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] > report.log_worst_ratio) {
      report.log_worst_ratio = ratios[i];
      report.witness_state = shown[i];
    }
    if (ratios[i] > log_constant + std::log1p(kRatioSlack)) ++report.violations;
  }
  return report;
}

double interval_bound_excess(const SpectralModel& model, const ObservationOperator& B,
                             const IntervalBoundSpec& bound_spec,
                             const std::vector<double>& L_grid) {
  const IntervalBoundSpec root = bound_spec.root_form();
  root.validate();
  double worst = -std::numeric_limits<double>::infinity();
  for (double L : L_grid) {
    if (!(L > 0.0)) throw ValidationError("interval_bound_excess: L must be positive");
    const TimeSet E(L, {{0.0, L}});
    double log_c = 0.0;
    if (model.is_unitary()) {
      // S(L) is an isometry, so the constant is 1 / lambda_min(G)
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gramian_l2_complex(model, B, E));
      const double low = eig.eigenvalues()(0);
      if (!(low > 0.0)) {
        throw UnobservableError("interval_bound_excess: singular Gramian",
                                "lowest eigenvector of the complex Gramian");
      }
      log_c = -std::log(low);
    } else {
      VerificationOptions quiet;
      quiet.random_states = 0;
      log_c = obs_constant_l2(model, B, E, L, quiet).log_constant;
    }
    const double excess = 0.5 * log_c - std::log(root.theta(L)) - root.d / std::pow(L, root.k);
    worst = std::max(worst, excess);
  }
  return worst;
}

}  // namespace obsmeas
