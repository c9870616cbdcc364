#include "obsmeas/analytic_bounds.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/parallel.hpp"
#include "obsmeas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace obsmeas {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(int n, int k) {
  if (n > 20) return std::exp(log_binomial(n, k));
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

double log_factorial(int n) {
  if (n > 20) return std::lgamma(n + 1.0);
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return std::log(out);
}

// g^{(beta)}(t) for beta = 0..beta_max from one table of state derivatives.
std::vector<double> g_derivatives(const SpectralModel& model, const ObservationOperator& B,
                                  const Eigen::VectorXd& u0, double t, int beta_max) {
  const Eigen::MatrixXd& G = B.gram();
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> images;
  for (int j = 0; j <= beta_max; ++j) {
    states.push_back(state_derivative(model, t, u0, static_cast<std::size_t>(j)));
    images.push_back(G * states.back());
  }
  std::vector<double> out(static_cast<std::size_t>(beta_max) + 1);
  for (int beta = 0; beta <= beta_max; ++beta) {
    double sum = 0.0;
    for (int j = 0; j <= beta; ++j) {
      sum += binomial(beta, j) * states[static_cast<std::size_t>(j)].dot(
                                     images[static_cast<std::size_t>(beta - j)]);
    }
    out[static_cast<std::size_t>(beta)] = sum;
  }
  return out;
}

void check_derivative_inputs(const SpectralModel& model, const ObservationOperator& B,
                             double s, const std::vector<double>& t_grid, int beta_max) {
  require_dissipative(model, "derivative bounds");
  check_dimensions(model, B);
  if (beta_max < 1) throw ValidationError("derivative bounds: beta_max must be at least 1");
  if (beta_max > kMaxDerivativeOrder) {
    throw ValidationError("derivative bounds: order above 150 needs a log-scale evaluation");
  }
  if (t_grid.empty()) throw ValidationError("derivative bounds: empty t grid");
  if (s < 0.0) throw ValidationError("derivative bounds: s must be nonnegative");
  for (double t : t_grid) {
    if (!(t - s > 0.0) || t - s > 1.0) {
      throw ValidationError("derivative bounds: need 0 < t - s <= 1 on the grid");
    }
  }
}

// excess(beta, t) = max over states of log|g^{(beta)}(t)| - log base, where the
// bound is K e^{base} rho^{-beta}; also keeps the winning state's numbers.
struct ExcessTable {
  std::vector<double> excess;
  std::vector<double> log_base;
  std::vector<double> log_value;
};

ExcessTable excess_table(const SpectralModel& model, const ObservationOperator& B,
                         const std::vector<Eigen::VectorXd>& family, double s,
                         const std::vector<double>& t_grid, int beta_max) {
  const std::size_t orders = static_cast<std::size_t>(beta_max) + 1;
  const std::size_t cells = t_grid.size();
  struct Cell {
    std::vector<double> excess, log_base, log_value;
  };
  const auto per_t = parallel_map<Cell>(cells, [&](std::size_t ti) {
    const double t = t_grid[ti];
    const double h = t - s;
    Cell cell{std::vector<double>(orders, -std::numeric_limits<double>::infinity()),
              std::vector<double>(orders, 0.0),
              std::vector<double>(orders, -std::numeric_limits<double>::infinity())};
    for (const auto& u0 : family) {
      const double start = semigroup_apply(model, s, u0).squaredNorm();
      if (!(start > 0.0)) continue;
      const auto g = g_derivatives(model, B, u0, t, beta_max);
      for (std::size_t b = 0; b < orders; ++b) {
        const double beta = static_cast<double>(b);
        const double base = std::log(start) - 2.0 * std::log(h) +
                            log_factorial(static_cast<int>(b)) - beta * std::log(h);
        const double value = std::log(std::abs(g[b]));
        if (value - base > cell.excess[b]) {
          cell.excess[b] = value - base;
          cell.log_base[b] = base;
          cell.log_value[b] = value;
        }
      }
    }
    return cell;
  });
  ExcessTable table;
  for (std::size_t b = 0; b < orders; ++b) {
    for (std::size_t ti = 0; ti < cells; ++ti) {
      table.excess.push_back(per_t[ti].excess[b]);
      table.log_base.push_back(per_t[ti].log_base[b]);
      table.log_value.push_back(per_t[ti].log_value[b]);
    }
  }
  return table;
}

DerivativeBoundCertificate fill_certificate(const ExcessTable& table, double s,
                                            const std::vector<double>& t_grid, int beta_max,
                                            double K, double rho) {
  DerivativeBoundCertificate cert;
  cert.bigK = K;
  cert.rho = rho;
  cert.max_order = beta_max;
  cert.s = s;
  cert.t_values = t_grid;
  for (int b = 0; b <= beta_max; ++b) {
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      const std::size_t i = static_cast<std::size_t>(b) * t_grid.size() + ti;
      DerivativeResidual r;
      r.beta = b;
      r.t = t_grid[ti];
      r.log_bound = std::log(K) + table.log_base[i] - b * std::log(rho);
      r.log_value = table.log_value[i];
      cert.residuals.push_back(r);
    }
  }
  return cert;
}

}  // namespace

double g_derivative(const SpectralModel& model, const ObservationOperator& B,
                    const Eigen::VectorXd& u0, double t, int beta) {
  require_dissipative(model, "g_derivative");
  check_dimensions(model, B);
  check_dimensions(model, static_cast<std::size_t>(u0.size()));
  if (beta < 0) throw ValidationError("g_derivative: beta must be nonnegative");
  if (beta > kMaxDerivativeOrder) {
    throw ValidationError("g_derivative: order above 150 needs a log-scale evaluation");
  }
  if (!(t > 0.0)) throw ValidationError("g_derivative: t must be positive");
  return g_derivatives(model, B, u0, t, beta).back();
}

bool DerivativeBoundCertificate::valid() const {
  return bigK >= 1.0 && rho > 0.0 && rho < 1.0 && min_slack() >= 0.0;
}

double DerivativeBoundCertificate::min_slack() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& r : residuals) out = std::min(out, r.slack());
  return out;
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

DerivativeBoundCertificate derivative_bound_certify(const SpectralModel& model,
                                                    const ObservationOperator& B,
                                                    const std::vector<Eigen::VectorXd>& family,
                                                    double s, const std::vector<double>& t_grid,
                                                    int beta_max,
                                                    const std::vector<double>& rho_grid) {
  check_derivative_inputs(model, B, s, t_grid, beta_max);
  if (rho_grid.empty()) throw ValidationError("derivative_bound_certify: empty rho grid");
  const auto table = excess_table(model, B, family, s, t_grid, beta_max);

  double best_log_K = std::numeric_limits<double>::infinity();
  double best_rho = 0.0;
  for (double rho : rho_grid) {
    if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("rho must lie in (0, 1)");
    double log_K = 0.0;
    for (std::size_t i = 0; i < table.excess.size(); ++i) {
      const double beta = static_cast<double>(i / t_grid.size());
      log_K = std::max(log_K, table.excess[i] + beta * std::log(rho));
    }
    if (log_K < best_log_K || (log_K == best_log_K && rho > best_rho)) {
      best_log_K = log_K;
      best_rho = rho;
    }
  }
  if (!std::isfinite(best_log_K)) {
    throw ConvergenceError("derivative_bound_certify: no finite K on the rho grid");
  }
  return fill_certificate(table, s, t_grid, beta_max, std::exp(best_log_K), best_rho);
}

DerivativeBoundCertificate derivative_bound_check(const SpectralModel& model,
                                                  const ObservationOperator& B,
                                                  const std::vector<Eigen::VectorXd>& family,
                                                  double s, const std::vector<double>& t_grid,
                                                  int beta_max, double K, double rho) {
  check_derivative_inputs(model, B, s, t_grid, beta_max);
  if (!(K >= 1.0) || !(rho > 0.0 && rho < 1.0)) {
    throw ValidationError("derivative_bound_check: need K >= 1 and rho in (0, 1)");
  }
  const auto table = excess_table(model, B, family, s, t_grid, beta_max);
  return fill_certificate(table, s, t_grid, beta_max, K, rho);
}

std::vector<double> default_smallness_theta_grid() { return {0.5, 0.25, 0.125, 0.0625}; }

SmallnessMeasurement measure_smallness(const SmallnessInput& input,
                                       std::size_t samples_per_interval) {
  if (!input.f) throw ValidationError("smallness: no function given");
  if (!(input.s > 0.0) || !(input.M > 0.0) || !(input.rho > 0.0)) {
    throw ValidationError("smallness: need s, M, rho > 0");
  }
  const double a = input.a;
  const double b = input.a + input.s;
  std::vector<Interval> pieces;
  double measure = 0.0;
  for (const auto& iv : input.E) {
    const double lo = std::max(iv.lo, a);
    const double hi = std::min(iv.hi, b);
    if (hi > lo) {
      pieces.push_back({lo, hi});
      measure += hi - lo;
    }
  }
  if (!(measure > 0.0)) throw ValidationError("smallness: E has zero measure in the domain");
  const auto& f = input.f;

  // Taylor data integrity: orders 0..2 at 16 interior points.
  const double scale = input.s * input.rho;
  for (int i = 1; i <= 16; ++i) {
    const double x = a + input.s * i / 17.0;
    const double room = std::min(x - a, b - x) / 3.0;
    const double h = std::min(0.05 * scale, room);
    const double fm3 = f(x - 3 * h), fm2 = f(x - 2 * h), fm1 = f(x - h), f0 = f(x);
    const double fp1 = f(x + h), fp2 = f(x + 2 * h), fp3 = f(x + 3 * h);
    const double d1 = (-fm3 + 9 * fm2 - 45 * fm1 + 45 * fp1 - 9 * fp2 + fp3) / (60 * h);
    const double d2 =
        (2 * fm3 - 27 * fm2 + 270 * fm1 - 490 * f0 + 270 * fp1 - 27 * fp2 + 2 * fp3) /
        (180 * h * h);
    const double bounds[3] = {input.M, input.M / scale, 2.0 * input.M / (scale * scale)};
    const double values[3] = {std::abs(f0), std::abs(d1), std::abs(d2)};
    for (int order = 0; order < 3; ++order) {
      if (values[order] > bounds[order] * (1.0 + 1e-3) + 1e-9 * input.M) {
        std::ostringstream os;
        os << "smallness: declared Taylor data violated at x = " << x << ", order " << order
           << " (" << values[order] << " > " << bounds[order] << ")";
        throw PreconditionError(os.str());
      }
    }
  }

  SmallnessMeasurement out;
  out.M = input.M;
  const std::size_t count = std::max<std::size_t>(samples_per_interval, 512);
  auto sample = [&](double lo, double hi) {
    for (std::size_t i = 0; i < count; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
      out.sup_norm = std::max(out.sup_norm, std::abs(f(x)));
    }
  };
  sample(a, b);
  for (const auto& iv : pieces) sample(iv.lo, iv.hi);

  std::vector<double> roots;
  if (input.polynomial) roots = poly_real_roots(*input.polynomial);
  double integral = 0.0;
  for (const auto& iv : pieces) {
    std::vector<double> breaks{iv.lo};
    for (double r : roots) {
      if (r > iv.lo && r < iv.hi) breaks.push_back(r);
    }
    breaks.push_back(iv.hi);
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
      const double width = (breaks[j + 1] - breaks[j]) / 16.0;
      for (int p = 0; p < 16; ++p) {
        for (const auto& node : gauss_on(breaks[j] + p * width, breaks[j] + (p + 1) * width, 16)) {
          integral += node.w * std::abs(f(node.t));
        }
      }
    }
  }
  out.set_average = integral / measure;
  if (input.polynomial) out.oracle_bound = remez_oracle(*input.polynomial, a, input.s, pieces).bound;
  return out;
}

std::vector<SmallnessResult> smallness_fit(const std::vector<SmallnessMeasurement>& family,
                                           const std::vector<double>& theta_grid) {
  if (family.empty()) throw ValidationError("smallness_fit: empty family");
  if (theta_grid.empty()) throw ValidationError("smallness_fit: empty theta grid");
  double theta = theta_grid.back();
  double C = std::numeric_limits<double>::infinity();
  for (double candidate : theta_grid) {
    if (!(candidate > 0.0 && candidate < 1.0)) throw ValidationError("theta must lie in (0, 1)");
    double c = 1.0;
    for (const auto& m : family) {
      if (m.sup_norm == 0.0) continue;
      const double denom = std::pow(m.M, 1.0 - candidate) * std::pow(m.set_average, candidate);
      c = std::max(c, denom > 0.0 ? m.sup_norm / denom : std::numeric_limits<double>::infinity());
    }
    theta = candidate;
    C = c;
    if (c <= kSmallnessConstantCap) break;
  }
  std::vector<SmallnessResult> out;
  for (const auto& m : family) {
    SmallnessResult r;
    r.sup_norm = m.sup_norm;
    r.set_average = m.set_average;
    r.fitted_C = C;
    r.fitted_theta = theta;
    r.oracle_bound = m.oracle_bound;
    const double rhs = C * std::pow(m.M, 1.0 - theta) * std::pow(m.set_average, theta);
    r.valid = std::isfinite(C) && m.sup_norm <= rhs * (1.0 + 1e-12);
    out.push_back(r);
  }
  return out;
}

SmallnessResult smallness_check(const SmallnessInput& input,
                                const std::vector<double>& theta_grid) {
  return smallness_fit({measure_smallness(input)}, theta_grid).front();
}

}  // namespace obsmeas
