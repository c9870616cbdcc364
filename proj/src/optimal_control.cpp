#include "obsmeas/optimal_control.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace obsmeas {

namespace {

// Tabulated dual objective J(phi) = sum_q w_q |B S(s_q) phi| on a graded rule.
class DualObjective {
 public:
  DualObjective(const SpectralModel& model, const ObservationOperator& B, double T,
                const SolverParams& params)
      : gram_(B.gram()) {
    const auto rule =
        graded_rule(0.0, T, model.lambda_max(), params.nodes_per_panel, params.panel_width);
    const auto n = static_cast<Eigen::Index>(model.mode_count());
    decay_.resize(n, static_cast<Eigen::Index>(rule.size()));
    weights_.resize(static_cast<Eigen::Index>(rule.size()));
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      decay_.col(col) = (-model.eigenvalue_vector().array() * rule[j].t).exp().matrix();
      weights_(col) = rule[j].w;
    }
  }

  // Squared observation norm at every node.
  Eigen::VectorXd squared_norms(const Eigen::VectorXd& phi, Eigen::MatrixXd& v,
                                Eigen::MatrixXd& gv) const {
    v = decay_.array().colwise() * phi.array();
    gv = gram_ * v;
    return v.cwiseProduct(gv).colwise().sum().transpose().cwiseMax(0.0);
  }

  double value(const Eigen::VectorXd& phi, double eps) const {
    Eigen::MatrixXd v, gv;
    const Eigen::VectorXd r2 = squared_norms(phi, v, gv);
    return weights_.dot((r2.array() + eps * eps).sqrt().matrix());
  }

  // Smoothed value, gradient and Hessian in phi.
  double derivatives(const Eigen::VectorXd& phi, double eps, Eigen::VectorXd& grad,
                     Eigen::MatrixXd& hess) const {
    Eigen::MatrixXd v, gv;
    const Eigen::VectorXd r2 = squared_norms(phi, v, gv);
    const Eigen::ArrayXd rho = (r2.array() + eps * eps).sqrt();
    // column q of dgv is D_q G D_q phi, the gradient of r_q^2 / 2
    const Eigen::MatrixXd dgv = decay_.cwiseProduct(gv);
    const Eigen::ArrayXd c1 = weights_.array() / rho;
    const Eigen::ArrayXd c3 = weights_.array() / (rho * rho * rho);
    grad = dgv * c1.matrix();
    hess = gram_.cwiseProduct((decay_ * c1.matrix().asDiagonal()) * decay_.transpose());
    hess.noalias() -= dgv * c3.matrix().asDiagonal() * dgv.transpose();
    return weights_.dot(rho.matrix());
  }

  // Exact objective and one subgradient.
  double subgradient(const Eigen::VectorXd& phi, Eigen::VectorXd& grad) const {
    Eigen::MatrixXd v, gv;
    const Eigen::VectorXd r2 = squared_norms(phi, v, gv);
    const Eigen::ArrayXd r = r2.array().sqrt();
    const Eigen::ArrayXd c1 = (r > 0.0).select(weights_.array() / r, 0.0);
    grad = decay_.cwiseProduct(gv) * c1.matrix();
    return weights_.dot(r.matrix());
  }

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd decay_;
  Eigen::VectorXd weights_;
};

struct DualSolution {
  Eigen::VectorXd phi;
  double objective = 0.0;
  int newton_steps = 0;
};

Eigen::VectorXd constraint_vector(const TimeOptimalProblem& problem, double T) {
  Eigen::VectorXd c = semigroup_apply(problem.model, T, problem.z0);
  if (problem.target) c -= *problem.target;
  return c;
}

DualSolution solve_dual(const TimeOptimalProblem& problem, double T, const SolverParams& params) {
  if (!(T > 0.0)) throw ValidationError("min_norm_control: T must be positive");
  const Eigen::VectorXd c = constraint_vector(problem, T);
  const double c2 = c.squaredNorm();
  if (!(c2 > 0.0)) throw PreconditionError("min_norm_control: degenerate constraint, z0 = target");
  const auto n = c.size();
  const DualObjective J(problem.model, problem.control_op, T, params);

  // phi = phi0 + Z y with Z spanning the orthocomplement of c
  const Eigen::VectorXd phi0 = c / c2;
  Eigen::MatrixXd Z(n, n - 1);
  if (n > 1) {
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    Z = Q.rightCols(n - 1);
  }
  DualSolution out;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n - 1);
  auto phi_of = [&](const Eigen::VectorXd& yy) -> Eigen::VectorXd {
    return n > 1 ? Eigen::VectorXd(phi0 + Z * yy) : phi0;
  };

  if (n > 1) {
    const double mean_scale = J.value(phi0, 0.0) / T;
    for (double eps_rel = params.eps_start; eps_rel >= params.eps_end * 0.999; eps_rel *= 0.5) {
      const double eps = eps_rel * mean_scale;
      for (int it = 0; it < params.newton_iterations; ++it) {
        Eigen::VectorXd g;
        Eigen::MatrixXd H;
        const double f0 = J.derivatives(phi_of(y), eps, g, H);
        const Eigen::VectorXd gy = Z.transpose() * g;
        Eigen::MatrixXd Hy = Z.transpose() * H * Z;
        Hy.diagonal().array() += 1e-14 * std::max(1.0, Hy.diagonal().cwiseAbs().maxCoeff());
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hy);
        Eigen::VectorXd step = -ldlt.solve(gy);
        if (!step.allFinite() || step.dot(gy) >= 0.0) step = -gy;
        const double decrement = -step.dot(gy);
        if (decrement <= 1e-15 * std::max(f0, 1e-300)) break;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
          const Eigen::VectorXd trial = y + alpha * step;
          if (J.value(phi_of(trial), eps) <= f0 - 0.25 * alpha * decrement) {
            y = trial;
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
        ++out.newton_steps;
        if (!accepted) break;
      }
    }

    // nonsmooth polish on the exact objective, keeping the best iterate
    Eigen::VectorXd best_y = y;
    Eigen::VectorXd g;
    double best = J.subgradient(phi_of(y), g);
    const double step0 = 1e-3 * std::max(phi_of(y).norm(), 1e-300);
    for (int k = 0; k < params.polish_steps; ++k) {
      const Eigen::VectorXd gy = Z.transpose() * g;
      const double gn = gy.norm();
      if (!(gn > 0.0)) break;
      y -= (step0 / std::sqrt(k + 1.0)) * gy / gn;
      const double value = J.subgradient(phi_of(y), g);
      if (value < best) {
        best = value;
        best_y = y;
      }
    }
    y = best_y;
  }
  out.phi = phi_of(y);
  out.objective = J.value(out.phi, 0.0);
  if (!std::isfinite(out.objective) || !(out.objective > 0.0)) {
    throw ConvergenceError("min_norm_control: dual objective did not converge");
  }
  return out;
}

}  // namespace

void TimeOptimalProblem::validate() const {
  require_dissipative(model, "time-optimal control");
  check_dimensions(model, control_op);
  check_dimensions(model, static_cast<std::size_t>(z0.size()));
  if (target) check_dimensions(model, static_cast<std::size_t>(target->size()));
  if (!(bound_M > 0.0)) throw ValidationError("time-optimal control: M must be positive");
  if (!(z0.norm() > 0.0)) throw ValidationError("time-optimal control: z0 must be nonzero");
}

std::size_t ControlGrid::vanishing_count() const {
  return static_cast<std::size_t>(std::count(vanishing.begin(), vanishing.end(), true));
}

Eigen::VectorXd simulate(const SpectralModel& model, const ObservationOperator& control_op,
                         const Eigen::VectorXd& z0, const ControlGrid& control) {
  require_dissipative(model, "simulate");
  check_dimensions(model, control_op);
  check_dimensions(model, static_cast<std::size_t>(z0.size()));
  const std::size_t cells = control.cell_count();
  if (control.values.rows() != static_cast<Eigen::Index>(cells) ||
      (cells > 0 && control.values.cols() != control_op.matrix().rows())) {
    throw DimensionError("simulate: control values do not match the grid");
  }
  const Eigen::ArrayXd lambda = model.eigenvalue_vector().array();
  Eigen::VectorXd z = z0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double dt = control.times[i + 1] - control.times[i];
    if (!(dt >= 0.0)) throw ValidationError("simulate: grid must be sorted");
    const Eigen::VectorXd forcing =
        control_op.matrix().transpose() * control.values.row(static_cast<Eigen::Index>(i)).transpose();
    const Eigen::ArrayXd gain = -(-lambda * dt).unaryExpr([](double x) { return std::expm1(x); }) / lambda;
    z = ((-lambda * dt).exp() * z.array() + gain * forcing.array()).matrix();
  }
  return z;
}

double min_norm_value(const TimeOptimalProblem& problem, double T, const SolverParams& params) {
  problem.validate();
  return 1.0 / solve_dual(problem, T, params).objective;
}

MinNormSolution min_norm_control(const TimeOptimalProblem& problem, double T,
                                 const SolverParams& params) {
  problem.validate();
  const DualSolution dual = solve_dual(problem, T, params);
  MinNormSolution sol;
  sol.horizon_T = T;
  sol.dual_objective = dual.objective;
  sol.min_norm = 1.0 / dual.objective;
  sol.dual_vector = dual.phi;
  sol.newton_steps = dual.newton_steps;

  const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(params.cells_per_unit_time * T)));
  const auto p = problem.control_op.matrix().rows();
  auto& grid = sol.control;
  grid.times.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    grid.times[i] = T * static_cast<double>(i) / static_cast<double>(cells);
  }
  grid.times.back() = T;
  grid.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells), p);
  grid.vanishing.assign(cells, false);
  std::vector<Eigen::VectorXd> directions(cells);
  double largest = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double mid = 0.5 * (grid.times[i] + grid.times[i + 1]);
    directions[i] = problem.control_op.matrix() * semigroup_apply(problem.model, T - mid, dual.phi);
    largest = std::max(largest, directions[i].norm());
  }
  for (std::size_t i = 0; i < cells; ++i) {
    const double norm = directions[i].norm();
    if (norm <= 1e-10 * largest) {
      grid.vanishing[i] = true;
      continue;
    }
    grid.values.row(static_cast<Eigen::Index>(i)) = (-sol.min_norm / norm) * directions[i].transpose();
  }

  sol.terminal_state = simulate(problem.model, problem.control_op, problem.z0, grid);
  const Eigen::VectorXd miss =
      problem.target ? Eigen::VectorXd(sol.terminal_state - *problem.target) : sol.terminal_state;
  sol.terminal_residual = miss.norm();
  sol.residual_tolerance = params.residual_tolerance * problem.z0.norm();
  return sol;
}

OptimalTimeResult optimal_time(const TimeOptimalProblem& problem, double time_tol,
                               const SolverParams& params) {
  problem.validate();
  if (!(time_tol > 0.0)) throw ValidationError("optimal_time: time_tol must be positive");
  const double M = problem.bound_M;
  double lo = 0.0;
  double hi = 0.1;
  while (min_norm_value(problem, hi, params) >= M) {
    lo = hi;
    hi *= 2.0;
    if (hi > kHorizonCap) {
      throw ConvergenceError("optimal_time: M*(T) stays above M up to the horizon cap 1e3");
    }
  }
  OptimalTimeResult out;
  while (hi - lo > time_tol) {
    const double mid = 0.5 * (lo + hi);
    if (min_norm_value(problem, mid, params) >= M) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++out.bisection_steps;
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.time = hi;
  out.solution = min_norm_control(problem, hi, params);
  return out;
}

BangBangReport bang_bang_check(const MinNormSolution& solution, double level, double tol) {
  if (!(level > 0.0) || !(tol > 0.0)) throw ValidationError("bang_bang_check: need level, tol > 0");
  BangBangReport report;
  const auto& grid = solution.control;
  const std::size_t cells = grid.cell_count();
  if (cells == 0) return report;
  std::size_t on_bound = 0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double norm = grid.values.row(static_cast<Eigen::Index>(i)).norm();
    const double deviation = std::abs(norm - level);
    report.max_deviation = std::max(report.max_deviation, deviation);
    if (deviation <= tol * level) ++on_bound;
    if (i + 1 < cells) {
      const auto a = grid.values.row(static_cast<Eigen::Index>(i));
      const auto b = grid.values.row(static_cast<Eigen::Index>(i + 1));
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a(j) * b(j) < 0.0) {
          report.switching_times.push_back(grid.times[i + 1]);
          break;
        }
      }
    }
  }
  report.fraction_on_bound = static_cast<double>(on_bound) / static_cast<double>(cells);
  report.vanishing_fraction =
      static_cast<double>(grid.vanishing_count()) / static_cast<double>(cells);
  return report;
}

}  // namespace obsmeas
