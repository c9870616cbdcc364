#include "obsmeas/quadrature.hpp"

#include "obsmeas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace obsmeas {

namespace {

// Newton iteration on P_n with the Chebyshev-like initial guess.
GaussRule compute_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = 0.0;
    for (int j = 0; j < order; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
    }
    dp = order * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw ValidationError("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(compute_rule(order));
  return *slot;
}

std::vector<QuadNode> gauss_on(double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::vector<QuadNode> out;
  out.reserve(order);
  for (int i = 0; i < order; ++i) {
    out.push_back({mid + half * rule.nodes[i], half * rule.weights[i]});
  }
  return out;
}

std::vector<QuadNode> graded_rule(double a, double b, double rate, int order, double max_width) {
  if (!(b > a)) return {};
  const double len = b - a;
  std::vector<double> breaks{a};
  const double scale = len * std::max(rate, 0.0);
  if (scale > 1.0) {
    const int levels = std::min(60, static_cast<int>(std::ceil(std::log2(scale))) + 1);
    for (int j = levels; j >= 1; --j) breaks.push_back(a + len * std::ldexp(1.0, -j));
  }
  breaks.push_back(b);

  std::vector<QuadNode> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    int pieces = 1;
    if (max_width > 0.0) pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
    const double h = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double pa = lo + p * h;
      const double pb = (p + 1 == pieces) ? hi : lo + (p + 1) * h;
      auto panel = gauss_on(pa, pb, order);
      out.insert(out.end(), panel.begin(), panel.end());
    }
  }
  return out;
}

}  // namespace obsmeas
