#include "obsmeas/gramian.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

namespace obsmeas {

std::string to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::l2_interval: return "L2_interval";
    case ReportKind::l2_set: return "L2_set";
    case ReportKind::l1_set_thm1: return "L1_set_thm1";
    case ReportKind::l1_set_thm2: return "L1_set_thm2";
    case ReportKind::l1_interval_prop24: return "L1_interval_prop24";
    case ReportKind::interpolation_one_time: return "interpolation_one_time";
    case ReportKind::interpolation_two_times: return "interpolation_two_times";
  }
  return "unknown";
}

Eigen::VectorXd random_unit_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  do {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

std::vector<Eigen::VectorXd> trial_family(std::size_t n, std::size_t random_count,
                                          std::uint64_t seed,
                                          const std::vector<Eigen::VectorXd>& extra) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> family;
  family.reserve(random_count + n + extra.size());
  for (std::size_t i = 0; i < random_count; ++i) family.push_back(random_unit_vector(rng, n));
  for (std::size_t k = 0; k < n; ++k) {
    family.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)));
  }
  for (const auto& v : extra) {
    if (v.size() == static_cast<Eigen::Index>(n) && v.norm() > 0.0) family.push_back(v.normalized());
  }
  return family;
}

std::vector<Eigen::VectorXcd> complex_trial_family(std::size_t n, std::size_t random_count,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXcd> family;
  const auto dim = static_cast<Eigen::Index>(n);
  for (std::size_t i = 0; i < random_count; ++i) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = {normal(rng), normal(rng)};
    family.push_back(v.normalized());
  }
  for (Eigen::Index k = 0; k < dim; ++k) family.push_back(Eigen::VectorXcd::Unit(dim, k));
  return family;
}

ObservationIntegrator::ObservationIntegrator(const SpectralModel& model,
                                             const ObservationOperator& B,
                                             const std::vector<Interval>& pieces,
                                             int nodes_per_panel)
    : gram_(B.gram()), unitary_(model.is_unitary()) {
  check_dimensions(model, B);
  std::vector<QuadNode> nodes;
  for (const auto& iv : pieces) {
    std::vector<QuadNode> rule;
    if (unitary_) {
      rule = graded_rule(iv.lo, iv.hi, 0.0, nodes_per_panel, 4.0 / model.lambda_max());
    } else {
      rule = graded_rule(iv.lo, iv.hi, model.lambda_max(), nodes_per_panel);
    }
    nodes.insert(nodes.end(), rule.begin(), rule.end());
  }
  const auto n = static_cast<Eigen::Index>(model.mode_count());
  const auto q = static_cast<Eigen::Index>(nodes.size());
  decay_.resize(n, q);
  if (unitary_) phase_.resize(n, q);
  weights_.reserve(nodes.size());
  for (Eigen::Index j = 0; j < q; ++j) {
    const double t = nodes[static_cast<std::size_t>(j)].t;
    weights_.push_back(nodes[static_cast<std::size_t>(j)].w);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double lt = model.eigenvalue_vector()(k) * t;
      if (unitary_) {
        decay_(k, j) = 1.0;
        phase_(k, j) = lt;
      } else {
        decay_(k, j) = std::exp(-lt);
      }
    }
  }
}

double ObservationIntegrator::integrate(const Eigen::VectorXd& u0) const {
  if (u0.size() != decay_.rows()) throw DimensionError("integrator: state size mismatch");
  if (unitary_) return integrate(Eigen::VectorXcd(u0.cast<std::complex<double>>()));
  const Eigen::MatrixXd v = decay_.array().colwise() * u0.array();
  const Eigen::RowVectorXd s = v.cwiseProduct(gram_ * v).colwise().sum();
  double total = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    total += weights_[j] * std::sqrt(std::max(0.0, s(static_cast<Eigen::Index>(j))));
  }
  return total;
}

double ObservationIntegrator::integrate_with_gradient(const Eigen::VectorXd& u0,
                                                     Eigen::VectorXd& gradient) const {
  if (unitary_) throw ValidationError("integrate_with_gradient: real dissipative models only");
  if (u0.size() != decay_.rows()) throw DimensionError("integrator: state size mismatch");
  const Eigen::MatrixXd v = decay_.array().colwise() * u0.array();
  const Eigen::MatrixXd gv = gram_ * v;
  const Eigen::RowVectorXd s = v.cwiseProduct(gv).colwise().sum();
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(s.size());
  double total = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const double r = std::sqrt(std::max(0.0, s(col)));
    total += weights_[j] * r;
    if (r > 0.0) coef(col) = weights_[j] / r;
  }
  gradient = (decay_.cwiseProduct(gv)) * coef;
  return total;
}

double ObservationIntegrator::integrate(const Eigen::VectorXcd& u0) const {
  if (u0.size() != decay_.rows()) throw DimensionError("integrator: state size mismatch");
  double total = 0.0;
  Eigen::VectorXcd v(u0.size());
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    for (Eigen::Index k = 0; k < u0.size(); ++k) {
      const double phase = unitary_ ? phase_(k, col) : 0.0;
      v(k) = decay_(k, col) * std::polar(1.0, -phase) * u0(k);
    }
    const double s = std::real(v.dot(gram_.cast<std::complex<double>>() * v));
    total += weights_[j] * std::sqrt(std::max(0.0, s));
  }
  return total;
}

double l1_observation_integral(const SpectralModel& model, const ObservationOperator& B,
                               const TimeSet& E, const Eigen::VectorXd& u0, int nodes_per_panel) {
  return ObservationIntegrator(model, B, E.intervals(), nodes_per_panel).integrate(u0);
}

namespace {

// integral of exp(-s t) over (a, b), s > 0
double decay_integral(double s, double a, double b) {
  return std::exp(-s * a) * (-std::expm1(-s * (b - a))) / s;
}

// integral of exp(i w t) over (a, b)
std::complex<double> oscillatory_integral(double w, double a, double b) {
  const double len = b - a;
  const std::complex<double> start = std::polar(1.0, w * a);
  if (std::abs(w) * len < 1e-8) {
    return start * len * std::complex<double>(1.0, 0.5 * w * len);
  }
  const std::complex<double> i(0.0, 1.0);
  // e^{i x} - 1 with cos x - 1 = -2 sin^2(x/2) to avoid cancellation
  const double half = std::sin(0.5 * w * len);
  const std::complex<double> bracket(-2.0 * half * half, std::sin(w * len));
  return start * bracket / (i * w);
}

}  // namespace

Eigen::MatrixXd gramian_l2(const SpectralModel& model, const ObservationOperator& B,
                           const TimeSet& E) {
  check_dimensions(model, B);
  require_dissipative(model, "gramian_l2");
  const auto n = static_cast<Eigen::Index>(model.mode_count());
  const auto& lambda = model.eigenvalue_vector();
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      const double s = lambda(j) + lambda(k);
      double time_factor = 0.0;
      for (const auto& iv : E.intervals()) time_factor += decay_integral(s, iv.lo, iv.hi);
      G(j, k) = B.gram()(j, k) * time_factor;
      G(k, j) = G(j, k);
    }
  }
  return G;
}

Eigen::MatrixXcd gramian_l2_complex(const SpectralModel& model, const ObservationOperator& B,
                                    const TimeSet& E) {
  check_dimensions(model, B);
  if (!model.is_unitary()) return gramian_l2(model, B, E).cast<std::complex<double>>();
  const auto n = static_cast<Eigen::Index>(model.mode_count());
  const auto& lambda = model.eigenvalue_vector();
  Eigen::MatrixXcd G(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j; k < n; ++k) {
      const double w = lambda(j) - lambda(k);
      std::complex<double> time_factor = 0.0;
      for (const auto& iv : E.intervals()) time_factor += oscillatory_integral(w, iv.lo, iv.hi);
      G(j, k) = B.gram()(j, k) * time_factor;
      G(k, j) = std::conj(G(j, k));
    }
  }
  return G;
}

namespace {

std::string describe_direction(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

}  // namespace

ObservabilityReport obs_constant_l2(const SpectralModel& model, const ObservationOperator& B,
                                    const TimeSet& E, double T, const VerificationOptions& options) {
  require_dissipative(model, "obs_constant_l2");
  check_dimensions(model, B);
  if (!(T > 0.0)) throw ValidationError("obs_constant_l2: T must be positive");
  if (E.intervals().back().hi > T * (1.0 + 1e-14)) {
    throw ValidationError("obs_constant_l2: time set must lie inside (0, T)");
  }
  const auto n = static_cast<Eigen::Index>(model.mode_count());
  // Shifting time by a = inf E (v = S(a) u0) leaves the constant unchanged and
  // keeps late windows from underflowing the high-mode Gramian entries.
  const double shift = E.intervals().front().lo;
  std::vector<Interval> moved;
  for (const auto& iv : E.intervals()) moved.push_back({iv.lo - shift, iv.hi - shift});
  const double horizon = T - shift;
  const Eigen::MatrixXd G = gramian_l2(model, B, TimeSet(horizon, moved));
  const Eigen::VectorXd diag = G.diagonal();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(diag(k) > 1e-300)) {
      throw UnobservableError("Gramian is singular: mode " + std::to_string(k + 1) + " unobserved",
                              describe_direction(Eigen::VectorXd::Unit(n, k)));
    }
  }
  // Jacobi scaling keeps the Cholesky factorization meaningful when the
  // diagonal spans hundreds of orders of magnitude.
  const Eigen::VectorXd inv_sqrt = diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd Gs = inv_sqrt.asDiagonal() * G * inv_sqrt.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(Gs);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gs);
    const Eigen::VectorXd kernel = (inv_sqrt.asDiagonal() * es.eigenvectors().col(0)).normalized();
    throw UnobservableError("Gramian is singular: the observation misses a direction",
                            describe_direction(kernel));
  }
  const Eigen::VectorXd terminal =
      (-2.0 * horizon * model.eigenvalue_vector().array()).exp().matrix();
  const Eigen::MatrixXd As = (terminal.cwiseProduct(inv_sqrt.cwiseAbs2())).asDiagonal();
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd W = Linv * As * Linv.transpose();
  W = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  const double top = es.eigenvalues()(n - 1);
  const Eigen::VectorXd y = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors().col(n - 1));
  const Eigen::VectorXd v = inv_sqrt.asDiagonal() * y;
  // back to u0 = S(a)^{-1} v through logs, e^{lambda a} may overflow
  const Eigen::ArrayXd log_mag =
      v.array().abs().log() + shift * model.eigenvalue_vector().array();
  const double top_mag = log_mag.maxCoeff();
  Eigen::VectorXd witness(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    witness(k) = v(k) == 0.0 ? 0.0 : std::copysign(std::exp(log_mag(k) - top_mag), v(k));
  }
  witness.normalize();
  Eigen::Index lead = 0;
  witness.cwiseAbs().maxCoeff(&lead);
  if (witness(lead) < 0) witness = -witness;

  ObservabilityReport report;
  report.kind = (E.intervals().size() == 1 && E.intervals()[0].lo == 0.0 &&
                 E.intervals()[0].hi == T)
                    ? ReportKind::l2_interval
                    : ReportKind::l2_set;
  report.log_constant = std::log(top);
  report.witness_state = witness;
  report.params = {{"T", T}, {"measure_E", E.measure()}, {"modes", static_cast<double>(n)}};

  const Eigen::VectorXd to_shifted = (-shift * model.eigenvalue_vector().array()).exp().matrix();
  auto shifted_log_ratio = [&](const Eigen::VectorXd& w) {
    return std::log(terminal.dot(w.cwiseAbs2())) - std::log(w.dot(G * w));
  };
  auto log_ratio = [&](const Eigen::VectorXd& u) {
    return shifted_log_ratio(to_shifted.cwiseProduct(u));
  };
  const auto family = trial_family(model.mode_count(), options.random_states, options.seed);
  report.log_worst_ratio = shifted_log_ratio(v);
  for (const auto& u : family) {
    const double r = log_ratio(u);
    if (r > report.log_worst_ratio) {
      report.log_worst_ratio = r;
    }
    if (r > report.log_constant + std::log1p(kRatioSlack)) ++report.violations;
  }
  report.states_checked = family.size() + 1;
  report.steps.push_back({"gramian_cholesky_whitening", top, "top generalized eigenvalue"});
  return report;
}

double IntervalBoundSpec::theta(double L) const {
  double value = theta_constant;
  for (const auto& [at, th] : theta_table) {
    if (L >= at) value = th;
  }
  return value;
}

IntervalBoundSpec IntervalBoundSpec::root_form() const {
  IntervalBoundSpec out = *this;
  if (form == Form::squared) {
    out.d = 0.5 * d;
    out.form = Form::root;
  }
  return out;
}

void IntervalBoundSpec::validate() const {
  if (!(d > 0.0) || !(k > 0.0)) throw ValidationError("interval bound needs d > 0 and k > 0");
  if (!(theta_constant > 0.0)) throw ValidationError("interval bound theta must be positive");
  for (std::size_t i = 1; i < theta_table.size(); ++i) {
    if (theta_table[i].first < theta_table[i - 1].first ||
        theta_table[i].second < theta_table[i - 1].second) {
      throw ValidationError("interval bound theta table must be nondecreasing");
    }
  }
}

std::vector<double> default_k_grid() { return {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}; }

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {hi};
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.back() = hi;
  return out;
}

IntervalBoundSpec fit_interval_bound(const SpectralModel& model, const ObservationOperator& B,
                                     const std::vector<double>& L_grid,
                                     const std::vector<double>& k_grid) {
  if (L_grid.empty()) throw ValidationError("fit_interval_bound: empty L grid");
  if (k_grid.empty()) throw ValidationError("fit_interval_bound: empty k grid");
  constexpr double kMinD = 1e-6;
  VerificationOptions quiet;
  quiet.random_states = 0;

  IntervalBoundSpec spec;
  std::vector<double> logC;
  for (double L : L_grid) {
    if (!(L > 0.0 && L <= 1.0)) throw ValidationError("fit_interval_bound: L must lie in (0, 1]");
    const TimeSet E(L, {{0.0, L}});
    const auto rep = obs_constant_l2(model, B, E, L, quiet);
    spec.samples.emplace_back(L, rep.constant());
    logC.push_back(rep.log_constant);
  }

  // C(L) is nonincreasing in L, so pairing C(L_i) with the next grid point
  // certifies the envelope on the whole of [L_min, L_max], not just the grid.
  std::vector<std::size_t> order(L_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return L_grid[a] < L_grid[b]; });
  auto fit_d = [&](double k) {
    double d = kMinD;
    for (std::size_t j = 0; j < order.size(); ++j) {
      const std::size_t i = order[j];
      const double right = j + 1 < order.size() ? L_grid[order[j + 1]] : L_grid[i];
      d = std::max(d, std::pow(right, k) * logC[i]);
    }
    return d;
  };
  auto slack = [&](double k, double d) {
    double s = 0.0;
    for (std::size_t i = 0; i < L_grid.size(); ++i) s += d / std::pow(L_grid[i], k) - logC[i];
    return s;
  };

  if (L_grid.size() == 1) {
    spec.degenerate = true;
    spec.k = 1.0;
    spec.d = fit_d(1.0);
    spec.envelope_slack = slack(spec.k, spec.d);
    return spec;
  }
  double best = std::numeric_limits<double>::infinity();
  for (double k : k_grid) {
    const double d = fit_d(k);
    const double s = slack(k, d);
    if (s < best) {
      best = s;
      spec.k = k;
      spec.d = d;
    }
  }
  spec.envelope_slack = best;
  return spec;
}

}  // namespace obsmeas
