#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's quadrature or closed forms.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_depth = 50) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Adaptive Simpson on a fixed number of equal pieces (keeps the recursion
/// from missing narrow layers such as e^{-lambda t} near t = 0).
inline double piecewise_simpson(const std::function<double(double)>& f, double a, double b,
                                double tol, int pieces) {
  double total = 0.0;
  const double h = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) total += adaptive_simpson(f, a + i * h, a + (i + 1) * h, tol / pieces);
  return total;
}

/// Composite Simpson with an even number of panels.
inline double composite_simpson(const std::function<double(double)>& f, double a, double b,
                                 int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// u(x, t) = sum_k c_k e^{-(k pi)^2 t} sqrt(2) sin(k pi x).
inline double heat_field(const Eigen::VectorXd& c, double x, double t) {
  double u = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k + 1) * M_PI;
    u += c(k) * std::exp(-kk * kk * t) * std::sqrt(2.0) * std::sin(kk * x);
  }
  return u;
}

/// Dense spatial quadrature of int_a^b u(x, t)^2 dx.
inline double heat_window_energy(const Eigen::VectorXd& c, double a, double b, double t,
                                 int panels = 4000) {
  return composite_simpson([&](double x) { double u = heat_field(c, x, t); return u * u; }, a, b,
                           panels);
}

/// Central difference of order 4 for the first derivative.
inline double central_first(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

/// Central difference of order 4 for the third derivative.
inline double central_third(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) + 8 * f(x + 2 * h) -
          f(x + 3 * h)) /
         (8 * h * h * h);
}

/// Direct evaluation of g^{(beta)} from the explicit double sum
/// sum_jk G_jk u_j u_k (-(l_j + l_k))^beta e^{-(l_j + l_k) t}.
inline double g_derivative_direct(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& G,
                                  const Eigen::VectorXd& u, double t, int beta) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      const double s = lambda(j) + lambda(k);
      sum += G(j, k) * u(j) * u(k) * std::pow(-s, beta) * std::exp(-s * t);
    }
  }
  return sum;
}

}  // namespace oracle
