#pragma once

#include <cstddef>
#include <vector>

namespace obsmeas {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights of the `order`-point rule. Rules are computed once per
/// order and cached; the returned reference stays valid for the program
/// lifetime.
const GaussRule& gauss_legendre(int order);

struct QuadNode {
  double t;
  double w;
};

/// Maps the reference rule onto [a, b].
std::vector<QuadNode> gauss_on(double a, double b, int order);

/// Composite rule on [a, b] for integrands that decay like exp(-rate (t - a)).
///
/// Panels are graded geometrically toward `a` so that the first panel has
/// length of order 1/rate, then every panel is further split so no panel is
/// wider than `max_width` (pass a non-positive value to disable the cap).
std::vector<QuadNode> graded_rule(double a, double b, double rate, int order,
                                  double max_width = 0.0);

}  // namespace obsmeas
