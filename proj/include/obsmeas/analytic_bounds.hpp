#pragma once

#include "obsmeas/polynomial.hpp"
#include "obsmeas/spectral_model.hpp"
#include "obsmeas/time_sets.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace obsmeas {

inline constexpr int kMaxDerivativeOrder = 150;

/// beta-th derivative of g(t) = |B S(t) u0|^2 through the binomial sum of
/// state derivatives. Orders above kMaxDerivativeOrder are rejected.
double g_derivative(const SpectralModel& model, const ObservationOperator& B,
                    const Eigen::VectorXd& u0, double t, int beta);

/// One entry of the residual table. Values are logs because the bound
/// K (t-s)^{-2} beta! (rho (t-s))^{-beta} |u(s)|^2 grows factorially.
struct DerivativeResidual {
  int beta = 0;
  double t = 0.0;
  double log_bound = 0.0;
  double log_value = 0.0;  // log |g^{(beta)}(t)|, -inf when it vanishes
  double slack() const { return log_bound - log_value; }
};

struct DerivativeBoundCertificate {
  double bigK = 1.0;
  double rho = 0.5;
  int max_order = 1;
  double s = 0.0;
  std::vector<double> t_values;
  /// Worst state of the family for each (beta, t), beta-major.
  std::vector<DerivativeResidual> residuals;

  bool valid() const;
  double min_slack() const;
};

std::vector<double> default_rho_grid();

/// Least K >= 1 per rho on the grid such that
///   |g^{(beta)}(t)| <= K (t-s)^{-2} beta! (rho (t-s))^{-beta} |u(s)|^2
/// for every state, beta <= beta_max and t on the grid; returns the pair with
/// the least K, the largest rho on ties.
DerivativeBoundCertificate derivative_bound_certify(const SpectralModel& model,
                                                    const ObservationOperator& B,
                                                    const std::vector<Eigen::VectorXd>& family,
                                                    double s, const std::vector<double>& t_grid,
                                                    int beta_max,
                                                    const std::vector<double>& rho_grid =
                                                        default_rho_grid());

/// Residual table of a given pair (K, rho).
DerivativeBoundCertificate derivative_bound_check(const SpectralModel& model,
                                                  const ObservationOperator& B,
                                                  const std::vector<Eigen::VectorXd>& family,
                                                  double s, const std::vector<double>& t_grid,
                                                  int beta_max, double K, double rho);

/// f on [a, a+s] with declared Taylor data |f^{(beta)}| <= M beta! (s rho)^{-beta}.
struct SmallnessInput {
  std::function<double(double)> f;
  double M = 1.0;
  double rho = 0.5;
  double a = 0.0;
  double s = 1.0;
  std::vector<Interval> E;
  /// When set, the Remez oracle is evaluated as a cross-check.
  std::optional<Coefficients> polynomial;
};

struct SmallnessMeasurement {
  double sup_norm = 0.0;
  double set_average = 0.0;
  double M = 1.0;
  std::optional<double> oracle_bound;
};

/// Samples sup |f| (at least 512 points per piece) and (1/|E|) int_E |f|, and
/// checks the declared Taylor data with sixth-order differences at 16 interior
/// points (PreconditionError when violated).
SmallnessMeasurement measure_smallness(const SmallnessInput& input,
                                       std::size_t samples_per_interval = 1024);

inline constexpr double kSmallnessConstantCap = 1e6;

std::vector<double> default_smallness_theta_grid();

struct SmallnessResult {
  double sup_norm = 0.0;
  double set_average = 0.0;
  double fitted_C = 1.0;
  double fitted_theta = 0.5;
  std::optional<double> oracle_bound;
  /// sup <= C M^{1-theta} average^theta on every fitted member.
  bool valid = false;
};

/// Largest theta on the grid whose least C (>= 1) over the family stays
/// below the cap; the smallest grid theta when none does. One result per
/// member, all sharing (C, theta).
std::vector<SmallnessResult> smallness_fit(const std::vector<SmallnessMeasurement>& family,
                                           const std::vector<double>& theta_grid =
                                               default_smallness_theta_grid());

SmallnessResult smallness_check(const SmallnessInput& input,
                                const std::vector<double>& theta_grid =
                                    default_smallness_theta_grid());

}  // namespace obsmeas
