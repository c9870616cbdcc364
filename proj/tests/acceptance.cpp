// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from closed forms or from the quadrature
// oracles in support/, never from the library's own closed forms.

#include "obsmeas/analytic_bounds.hpp"
#include "obsmeas/cli/run.hpp"
#include "obsmeas/gramian.hpp"
#include "obsmeas/measurable_sets.hpp"
#include "obsmeas/optimal_control.hpp"
#include "obsmeas/polynomial.hpp"
#include "obsmeas/spectral_hypothesis.hpp"
#include "obsmeas/telescoping.hpp"

#include <oracles.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace obsmeas;
namespace fs = std::filesystem;

namespace {

const std::string kData = OBSMEAS_DATA_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Eigen::VectorXd> random_states(std::size_t n, std::size_t count, std::uint64_t seed) {
  const auto family = trial_family(n, count, seed);
  return {family.begin(), family.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::vector<double> unit_t_grid() {
  std::vector<double> t;
  for (int i = 1; i <= 10; ++i) t.push_back(0.1 * i);
  return t;
}

IntervalBoundSpec root_spec(double d, double k) {
  IntervalBoundSpec s;
  s.d = d;
  s.k = k;
  s.form = IntervalBoundSpec::Form::root;
  return s;
}

Verdict ac1() {
  Verdict v;
  auto [model, B] = make_heat_1d(16, 0.3, 0.8);
  const TimeSet E(1.0, {{0.1, 0.4}, {0.6, 0.9}});
  const auto states = random_states(16, 50, kSuiteSeed);
  const auto start = std::chrono::steady_clock::now();
  const Eigen::MatrixXd G = gramian_l2(model, B, E);
  std::vector<double> closed;
  for (const auto& u : states) closed.push_back(u.dot(G * u));
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    double ref = 0.0;
    for (const auto& iv : E.intervals()) {
      ref += oracle::piecewise_simpson(
          [&](double t) { return observation_intensity(model, B, t, states[i]); }, iv.lo, iv.hi,
          1e-15, 64);
    }
    worst = std::max(worst, std::abs(closed[i] - ref) / ref);
  }
  v.require(worst <= 1e-10, "max relative error " + num(worst));
  v.require(elapsed < 5.0, "runtime " + num(elapsed) + " s");
  v.note("max rel err " + num(worst) + ", " + num(elapsed) + " s");
  return v;
}

Verdict ac2() {
  Verdict v;
  const auto rep = obs_constant_l2(make_diagonal({1.0}), ObservationOperator::identity(1),
                                   TimeSet(1.0, {{0.0, 1.0}}), 1.0);
  const double exact = 2.0 / (std::exp(2.0) - 1.0);
  const double err = std::abs(rep.constant() - exact);
  v.require(err <= 1e-12, "error " + num(err));
  v.note("C = " + num(rep.constant()) + ", |C - 2/(e^2-1)| = " + num(err));
  return v;
}

Verdict ac3() {
  Verdict v;
  auto [model, B] = make_heat_1d(16, 0.3, 0.8);
  const TimeSet E(1.0, {{0.1, 0.4}, {0.6, 0.9}});
  VerificationOptions opts;
  opts.random_states = 1000;
  const auto rep = obs_constant_l2(model, B, E, 1.0, opts);
  const auto& w = rep.witness_state;
  const Eigen::MatrixXd G = gramian_l2(model, B, E);
  const double witness_ratio = semigroup_apply(model, 1.0, w).squaredNorm() / w.dot(G * w);
  const double sharp = std::abs(witness_ratio / rep.constant() - 1.0);
  v.require(sharp <= 1e-9, "witness gap " + num(sharp));
  double worst = 0.0;
  for (const auto& u : random_states(16, 1000, kSuiteSeed)) {
    const double r = semigroup_apply(model, 1.0, u).squaredNorm() / u.dot(G * u);
    worst = std::max(worst, r / rep.constant() - 1.0);
  }
  v.require(worst <= 1e-9, "random state exceeds constant by " + num(worst));
  v.require(rep.violations == 0, "report counts violations");
  v.note("witness gap " + num(sharp) + ", worst random excess " + num(worst));
  return v;
}

Verdict ac4() {
  Verdict v;
  const auto reference = telescope_l2_to_l1(root_spec(1.0, 1.0), 1.0, 1.0, 0.0, 1.0);
  v.require(*reference.q_prop24 == 0.75, "q = " + num(*reference.q_prop24));

  const auto scalar = make_diagonal({1.0});
  const auto I = ObservationOperator::identity(1);
  auto [heat, B] = make_heat_1d(16, 0.3, 0.8);
  const auto fitted = fit_interval_bound(heat, B, log_spaced(0.05, 1.0, 12));
  const double excess = interval_bound_excess(heat, B, fitted, log_spaced(1e-3, 1.0, 40));
  v.require(excess <= 0.0, "fitted heat bound fails its hypothesis by " + num(excess));
  const double scalar_excess =
      interval_bound_excess(scalar, I, root_spec(1.0, 1.0), log_spaced(1e-3, 1.0, 40));
  v.require(scalar_excess <= 0.0, "scalar bound fails its hypothesis");
  for (double T : {0.25, 0.5, 1.0}) {
    const auto cs = telescope_l2_to_l1(root_spec(1.0, 1.0), 1.0, 1.0, 0.0, T);
    const auto rs = verify_l1_interval(scalar, I, T, *cs.log_c_prop24);
    v.require(rs.valid() && rs.states_checked >= 500, "scalar T = " + num(T));
    const auto ch = telescope_l2_to_l1(fitted, B.operator_norm(), 1.0, 0.0, T);
    const auto rh = verify_l1_interval(heat, B, T, *ch.log_c_prop24);
    v.require(rh.valid() && rh.states_checked >= 500, "heat-n16 T = " + num(T));
  }
  v.note("q = " + num(*reference.q_prop24) + ", heat fit d = " + num(fitted.d) +
         " k = " + num(fitted.k));
  return v;
}

Verdict ac5() {
  Verdict v;
  auto [model, B] = make_heat_1d(8, 0.3, 0.8);
  const TimeSet E(1.0, {{0.1, 0.2}, {0.45, 0.55}, {0.8, 0.9}});
  const auto start = std::chrono::steady_clock::now();
  const auto cert = certify_hypothesis_h(model, B, 0.5);
  const auto res = obs_measurable_theorem2(model, B, cert, E, 1.0);
  const double elapsed = seconds_since(start);
  const double N = cert.bigN;
  const double q_expected = std::pow((N + 0.5) / (N + 1.0), (1.0 - 0.5) / 0.5);
  v.require(std::abs(E.measure() - 0.3) <= 1e-15, "|E| = " + num(E.measure()));
  v.require(res.report.valid(), "inequality violated on " + std::to_string(res.report.violations) + " states");
  v.require(res.report.states_checked >= 500, "too few states");
  v.require(*res.constants.q_thm2 == q_expected, "q mismatch");
  v.require(elapsed < 30.0, "runtime " + num(elapsed) + " s");
  v.note("N = " + num(N) + ", q = " + num(*res.constants.q_thm2) + ", log C = " +
         num(res.report.log_constant) + ", " + num(elapsed) + " s");
  return v;
}

Verdict ac6() {
  Verdict v;
  auto [model, B] = make_heat_1d(8, 0.3, 0.8);
  const auto cert = certify_hypothesis_h(model, B, 0.5);
  for (double t : {0.05, 0.1, 0.5, 1.0}) {
    const auto interp = interpolation_one_time(cert, B.operator_norm(), 1.0, t);
    const auto rep = verify_one_time_interpolation(model, B, interp, t);
    v.require(rep.valid() && rep.states_checked >= 500, "t = " + num(t));
  }
  const double lhs = lambda_optimization_max(1.0, 0.5, 2.0, 1.0);
  const double rhs = lambda_optimization_bound(1.0, 0.5, 2.0, 1.0);
  v.require(lhs == 0.25 && rhs == 0.5 && lhs <= rhs, "lambda optimization " + num(lhs) + " vs " + num(rhs));
  v.note("lambda check " + num(lhs) + " <= " + num(rhs));
  return v;
}

Verdict ac7() {
  Verdict v;
  auto [heat, B] = make_heat_1d(20, 0.3, 0.8);
  const auto family = random_states(20, 20, kSuiteSeed);
  const auto cert = derivative_bound_certify(heat, B, family, 0.0, unit_t_grid(), 8);
  v.require(cert.valid(), "heat certificate has slack " + num(cert.min_slack()));

  const auto scalar = make_diagonal({1.0});
  const auto I = ObservationOperator::identity(1);
  const auto sfam = trial_family(1, 20, kSuiteSeed);
  const auto check = derivative_bound_check(scalar, I, sfam, 0.0, unit_t_grid(), 8, 1.0, 0.5);
  v.require(check.valid(), "scalar K = 1, rho = 1/2 fails");
  // independent closed form: |g^(b)(t)| = 2^b e^{-2t} |u|^2 against t^-2 b! (t/2)^-b
  bool closed_ok = true;
  for (int b = 0; b <= 8; ++b) {
    for (double t : unit_t_grid()) {
      closed_ok = closed_ok && std::pow(2.0, b) * std::exp(-2 * t) <= std::tgamma(b + 1.0) * std::pow(t, -2.0 - b) * std::pow(2.0, b);
    }
  }
  v.require(closed_ok, "closed-form scalar bound");
  v.note("heat K = " + num(cert.bigK) + ", rho = " + num(cert.rho) + ", min slack " +
         num(cert.min_slack()));
  return v;
}

Verdict ac8() {
  Verdict v;
  constexpr double kRho = 0.5;
  std::mt19937_64 rng(kSuiteSeed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  std::size_t oracle_violations = 0;
  std::size_t invalid = 0;
  std::size_t total = 0;
  for (int degree = 0; degree <= 6; ++degree) {
    for (double ratio : {0.25, 0.5, 0.75}) {
      std::vector<SmallnessMeasurement> measured;
      for (int i = 0; i < 200; ++i) {
        Coefficients c;
        for (int j = 0; j <= degree; ++j) c.push_back(normal(rng));
        const double first = ratio * uniform(rng);
        const double start = (1.0 - ratio) * uniform(rng);
        const double gap = (1.0 - ratio - start) * uniform(rng);
        const std::vector<Interval> E = {{start, start + first}, {start + first + gap, start + ratio + gap}};
        const auto remez = remez_oracle(c, 0.0, 1.0, E);
        // independent dense sample of sup |p| on [0, 1], Horner evaluation
        double sampled = 0.0;
        for (int s = 0; s <= 20000; ++s) {
          const double x = s / 20000.0;
          double p = 0.0;
          for (auto it = c.rbegin(); it != c.rend(); ++it) p = p * x + *it;
          sampled = std::max(sampled, std::abs(p));
        }
        if (sampled > remez.bound * (1.0 + 1e-12)) ++oracle_violations;
        SmallnessInput in;
        in.f = [c](double x) { return poly_eval(c, x); };
        in.M = std::max(poly_taylor_constant(c, 0.0, 1.0, kRho), 1e-300);
        in.rho = kRho;
        in.E = E;
        in.polynomial = c;
        measured.push_back(measure_smallness(in));
        ++total;
      }
      for (const auto& r : smallness_fit(measured)) {
        if (!r.valid) ++invalid;
      }
    }
  }
  v.require(oracle_violations == 0, std::to_string(oracle_violations) + " Remez violations");
  v.require(invalid == 0, std::to_string(invalid) + " invalid smallness fits");
  v.note(std::to_string(total) + " polynomials");
  return v;
}

Verdict ac9() {
  Verdict v;
  Eigen::VectorXd z0(1);
  z0 << 1.0;
  for (auto [M, expected] : {std::pair{1.0, std::log(2.0)}, std::pair{0.2, std::log(6.0)}}) {
    const TimeOptimalProblem p{make_diagonal({1.0}), ObservationOperator::identity(1), z0, M, std::nullopt};
    const auto start = std::chrono::steady_clock::now();
    const auto r = optimal_time(p);
    const double elapsed = seconds_since(start);
    v.require(std::abs(r.time - expected) <= 1e-3, "T(" + num(M) + ") = " + num(r.time));
    v.require(elapsed < 10.0, "solve took " + num(elapsed) + " s");
    v.note("T(" + num(M) + ") = " + num(r.time) + " in " + num(elapsed) + " s");
  }
  return v;
}

Verdict ac10() {
  Verdict v;
  auto [model, B] = make_heat_1d(8, 0.3, 0.8);
  const TimeOptimalProblem p{model, B, Eigen::VectorXd::Unit(8, 0), 1.0, std::nullopt};
  const auto r = optimal_time(p);
  const auto bb = bang_bang_check(r.solution, p.bound_M, 1e-2);
  v.require(bb.fraction_on_bound >= 0.99, "on-bound fraction " + num(bb.fraction_on_bound));
  v.require(r.solution.terminal_residual <= 1e-3 * p.z0.norm(),
            "terminal residual " + num(r.solution.terminal_residual));
  v.require(bb.vanishing_fraction < 0.01, "vanishing fraction " + num(bb.vanishing_fraction));
  v.note("T = " + num(r.time) + ", fraction " + num(bb.fraction_on_bound) + ", residual " +
         num(r.solution.terminal_residual));
  return v;
}

Verdict ac11() {
  Verdict v;
  auto [model, B] = make_heat_1d(8, 0.3, 0.8);
  const TimeOptimalProblem p{model, B, Eigen::VectorXd::Unit(8, 0), 1.0, std::nullopt};
  std::vector<double> norms;
  for (double T : {0.25, 0.5, 1.0, 2.0}) norms.push_back(min_norm_value(p, T));
  for (std::size_t i = 1; i < norms.size(); ++i) {
    v.require(norms[i] < norms[i - 1] - 1e-6 * norms[i - 1], "M* not strictly decreasing at " + std::to_string(i));
  }
  const double T = 1.0;
  std::vector<double> constants;
  for (double delta : {0.4, 0.2, 0.1, 0.05}) {
    constants.push_back(obs_constant_l2(model, B, TimeSet(T, {{T - delta, T}}), T).log_constant);
  }
  for (std::size_t i = 1; i < constants.size(); ++i) {
    v.require(constants[i] >= constants[i - 1], "constant decreased as E shrank");
  }
  v.note("M* = " + num(norms[0]) + ", " + num(norms[1]) + ", " + num(norms[2]) + ", " + num(norms[3]));
  return v;
}

struct CliCase {
  std::string command;
  std::function<void(cli::RunConfig&)> setup;
};

std::vector<CliCase> full_suite() {
  return {
      {"gramian", [](auto& c) { c.preset = "heat-n8"; c.set_path = kData + "/sets/three_intervals.json"; }},
      {"obs-l2", [](auto& c) { c.preset = "heat-n16"; c.set_path = kData + "/sets/split.json"; }},
      {"fit-interval", [](auto& c) { c.preset = "heat-n8"; }},
      {"certify-h", [](auto& c) { c.preset = "heat-n8"; }},
      {"interp", [](auto& c) { c.preset = "heat-n8"; c.times = {0.05, 0.1, 0.5, 1.0}; c.set_path = kData + "/sets/three_intervals.json"; }},
      {"thm1", [](auto& c) { c.preset = "scalar"; c.set_path = kData + "/sets/split.json"; }},
      {"thm2", [](auto& c) { c.model_path = kData + "/models/heat_n8.json"; c.set_path = kData + "/sets/three_intervals.json"; }},
      {"telescope", [](auto& c) { c.preset = "heat-n16"; c.values = {0.25, 0.5, 1.0}; }},
      {"lemma21", [](auto& c) { c.preset = "heat-n16"; }},
      {"lemma22", [](auto& c) { c.poly_count = 50; }},
      {"tp-solve", [](auto& c) { c.problem_path = kData + "/problems/scalar.json"; }},
      {"bangbang", [](auto& c) { c.problem_path = kData + "/problems/heat_bangbang.json"; }},
      {"sweep", [](auto& c) { c.preset = "heat-n8"; c.axis = "measure"; c.values = {0.1, 0.2, 0.3}; }},
  };
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict ac12() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "obsmeas_acceptance_determinism";
  fs::remove_all(root);
  for (const char* run_name : {"a", "b"}) {
    for (const auto& c : full_suite()) {
      cli::RunConfig cfg;
      cfg.command = c.command;
      cfg.out_dir = (root / run_name).string();
      c.setup(cfg);
      std::ostringstream out, err;
      const int code = cli::run(cfg, out, err);
      if (code != cli::kExitVerified) v.require(false, c.command + " exited " + std::to_string(code) + " " + err.str());
    }
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    v.require(fs::exists(other), "missing " + other.filename().string());
    if (fs::exists(other)) {
      v.require(slurp(entry.path()) == slurp(other), entry.path().filename().string() + " differs");
    }
    ++files;
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& entry : fs::directory_iterator(root / "b")) ++files_b;
  v.require(files == files_b && files > 0, "file counts differ");
  v.note(std::to_string(files) + " files byte-identical across two runs");
  fs::remove_all(root);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"Gramian exactness", ac1},
      {"scalar L2 constant", ac2},
      {"L2 sharpness", ac3},
      {"L2-to-L1 upgrade", ac4},
      {"spectral pipeline on measurable set", ac5},
      {"one-time interpolation", ac6},
      {"derivative bounds", ac7},
      {"Remez and smallness", ac8},
      {"scalar minimal time", ac9},
      {"bang-bang", ac10},
      {"monotonicity", ac11},
      {"determinism", ac12},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict verdict;
    try {
      verdict = criteria[i].second();
    } catch (const std::exception& e) {
      verdict.pass = false;
      verdict.detail = std::string("exception: ") + e.what();
    }
    if (!verdict.pass) ++failures;
    std::cout << (verdict.pass ? "PASS" : "FAIL") << " AC" << (i + 1) << " " << criteria[i].first
              << ": " << verdict.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
