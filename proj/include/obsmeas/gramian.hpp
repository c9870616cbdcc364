#pragma once

#include "obsmeas/report.hpp"
#include "obsmeas/spectral_model.hpp"
#include "obsmeas/time_sets.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace obsmeas {

Eigen::VectorXd random_unit_vector(std::mt19937_64& rng, std::size_t n);

/// Verification family: `random_count` uniform-on-sphere states, then the
/// eigenbasis vectors, then `extra` (normalized).
std::vector<Eigen::VectorXd> trial_family(std::size_t n, std::size_t random_count,
                                          std::uint64_t seed,
                                          const std::vector<Eigen::VectorXd>& extra = {});

std::vector<Eigen::VectorXcd> complex_trial_family(std::size_t n, std::size_t random_count,
                                                   std::uint64_t seed);

/// Evaluates the L^1-in-time observation integral of |B S(t) u0| over a fixed
/// union of intervals with a graded composite Gauss rule. The exponentials at
/// every node are tabulated once, so each state costs O(nodes * n^2).
class ObservationIntegrator {
 public:
  ObservationIntegrator(const SpectralModel& model, const ObservationOperator& B,
                        const std::vector<Interval>& pieces, int nodes_per_panel = 32);

  double integrate(const Eigen::VectorXd& u0) const;
  double integrate(const Eigen::VectorXcd& u0) const;

  /// Value and gradient with respect to u0 (real states only). Nodes where
  /// the observation vanishes contribute nothing to the gradient.
  double integrate_with_gradient(const Eigen::VectorXd& u0, Eigen::VectorXd& gradient) const;

  std::size_t node_count() const { return weights_.size(); }

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd decay_;   // n x Q, exp(-lambda_k t_q)
  Eigen::MatrixXd phase_;   // n x Q, lambda_k t_q (unitary only)
  std::vector<double> weights_;
  bool unitary_;
};

double l1_observation_integral(const SpectralModel& model, const ObservationOperator& B,
                               const TimeSet& E, const Eigen::VectorXd& u0,
                               int nodes_per_panel = 32);

/// G with u0^T G u0 = integral over E of |B S(t) u0|^2, in closed form.
Eigen::MatrixXd gramian_l2(const SpectralModel& model, const ObservationOperator& B,
                           const TimeSet& E);

/// Hermitian Gramian; valid for both generator kinds.
Eigen::MatrixXcd gramian_l2_complex(const SpectralModel& model, const ObservationOperator& B,
                                    const TimeSet& E);

/// Smallest C with |S(T) u0|^2 <= C u0^T G u0, i.e. the top generalized
/// eigenvalue of (S(T)^2, G). The witness is the maximizing unit state and the
/// report's worst ratio is taken over the witness and a random family.
ObservabilityReport obs_constant_l2(const SpectralModel& model, const ObservationOperator& B,
                                    const TimeSet& E, double T,
                                    const VerificationOptions& options = {});

/// Interval bound |S(L)u0|^2 <= theta(L)^2 e^{d/L^k} int_0^L |B S(t)u0|^2 dt.
/// `squared` is the form fitted from Gramians; `root` is the same inequality
/// after taking square roots (so d is halved and theta enters linearly).
struct IntervalBoundSpec {
  enum class Form { squared, root };

  double d = 1.0;
  double k = 1.0;
  Form form = Form::squared;
  double theta_constant = 1.0;
  /// Optional nondecreasing tabulation (L, theta(L)); piecewise constant from
  /// the right, theta_constant beyond the table.
  std::vector<std::pair<double, double>> theta_table;

  bool degenerate = false;
  double envelope_slack = 0.0;
  /// (L, C(L)) pairs the fit was computed from.
  std::vector<std::pair<double, double>> samples;

  double theta(double L) const;
  IntervalBoundSpec root_form() const;
  void validate() const;
};

/// Candidate exponents searched by fit_interval_bound.
std::vector<double> default_k_grid();

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// Computes C(L) = obs_constant_l2 over E = (0, L), T = L on each grid point
/// and fits the least d for every candidate k, keeping the k with the least
/// total log slack. Since C(L) is nonincreasing, each C(L_i) is charged at the
/// next grid point, which makes the envelope hold on all of [L_min, L_max].
IntervalBoundSpec fit_interval_bound(const SpectralModel& model, const ObservationOperator& B,
                                     const std::vector<double>& L_grid,
                                     const std::vector<double>& k_grid = default_k_grid());

}  // namespace obsmeas
