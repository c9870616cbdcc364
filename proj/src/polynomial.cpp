#include "obsmeas/polynomial.hpp"

#include "obsmeas/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace obsmeas {

double poly_eval(const Coefficients& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Coefficients poly_derivative(const Coefficients& c) {
  if (c.size() <= 1) return {0.0};
  Coefficients out(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) out[i - 1] = static_cast<double>(i) * c[i];
  return out;
}

std::size_t poly_degree(const Coefficients& c) {
  std::size_t d = c.size();
  while (d > 1 && c[d - 1] == 0.0) --d;
  return d == 0 ? 0 : d - 1;
}

std::vector<double> poly_real_roots(const Coefficients& c) {
  const std::size_t d = poly_degree(c);
  if (d == 0) return {};
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[d];
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> eig(companion, false);
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto z = eig.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double chebyshev_t(std::size_t degree, double x) {
  const double d = static_cast<double>(degree);
  if (std::abs(x) <= 1.0) return std::cos(d * std::acos(x));
  const double value = std::cosh(d * std::acosh(std::abs(x)));
  return (x < 0.0 && degree % 2 == 1) ? -value : value;
}

double poly_sup(const Coefficients& c, const std::vector<Interval>& pieces,
                std::size_t samples_per_interval) {
  const auto critical = poly_real_roots(poly_derivative(c));
  double sup = 0.0;
  for (const auto& iv : pieces) {
    const std::size_t count = std::max<std::size_t>(samples_per_interval, 2);
    for (std::size_t i = 0; i < count; ++i) {
      const double x = iv.lo + iv.length() * static_cast<double>(i) / static_cast<double>(count - 1);
      sup = std::max(sup, std::abs(poly_eval(c, x)));
    }
    for (double x : critical) {
      if (x >= iv.lo && x <= iv.hi) sup = std::max(sup, std::abs(poly_eval(c, x)));
    }
  }
  return sup;
}

RemezBound remez_oracle(const Coefficients& c, double a, double s, const std::vector<Interval>& E) {
  if (!(s > 0.0)) throw ValidationError("remez_oracle: domain length must be positive");
  std::vector<Interval> clipped;
  double measure = 0.0;
  for (const auto& iv : E) {
    const double lo = std::max(iv.lo, a);
    const double hi = std::min(iv.hi, a + s);
    if (hi > lo) {
      clipped.push_back({lo, hi});
      measure += hi - lo;
    }
  }
  if (!(measure > 0.0)) throw ValidationError("remez_oracle: E has zero measure in the domain");
  RemezBound out;
  out.set_measure = measure;
  out.sup_on_set = poly_sup(c, clipped);
  out.chebyshev_factor = chebyshev_t(poly_degree(c), std::max(1.0, 2.0 * s / measure - 1.0));
  out.bound = out.chebyshev_factor * out.sup_on_set;
  return out;
}

double poly_taylor_constant(const Coefficients& c, double a, double s, double rho) {
  if (!(s > 0.0) || !(rho > 0.0)) throw ValidationError("poly_taylor_constant: need s, rho > 0");
  double M = 0.0;
  Coefficients current = c;
  double factorial = 1.0;
  const std::size_t d = poly_degree(c);
  for (std::size_t beta = 0; beta <= d; ++beta) {
    if (beta > 0) {
      current = poly_derivative(current);
      factorial *= static_cast<double>(beta);
    }
    const double sup = poly_sup(current, {{a, a + s}}, 512);
    M = std::max(M, sup * std::pow(s * rho, static_cast<double>(beta)) / factorial);
  }
  return M;
}

}  // namespace obsmeas
