#pragma once

#include "obsmeas/time_sets.hpp"

#include <vector>

namespace obsmeas {

/// Coefficients in ascending order: p(x) = c[0] + c[1] x + ...
using Coefficients = std::vector<double>;

double poly_eval(const Coefficients& c, double x);
Coefficients poly_derivative(const Coefficients& c);
/// Degree after dropping trailing zeros; the zero polynomial has degree 0.
std::size_t poly_degree(const Coefficients& c);

/// Real roots from the companion-matrix eigenvalues, imaginary parts below
/// 1e-9 relative treated as zero. Sorted ascending.
std::vector<double> poly_real_roots(const Coefficients& c);

/// Chebyshev polynomial of the first kind, valid on the whole real line.
double chebyshev_t(std::size_t degree, double x);

/// max |p| over a union of closed intervals: dense sampling plus the
/// critical points of p inside each piece.
double poly_sup(const Coefficients& c, const std::vector<Interval>& pieces,
                std::size_t samples_per_interval = 2048);

struct RemezBound {
  double bound = 0.0;
  double sup_on_set = 0.0;
  double chebyshev_factor = 1.0;
  double set_measure = 0.0;
};

/// sup_{[a, a+s]} |p| <= T_d(2s/|E| - 1) sup_E |p|, E clipped to the domain.
RemezBound remez_oracle(const Coefficients& c, double a, double s, const std::vector<Interval>& E);

/// Least M with |p^{(beta)}| <= M beta! (s rho)^{-beta} on [a, a+s] for all beta.
double poly_taylor_constant(const Coefficients& c, double a, double s, double rho);

}  // namespace obsmeas
