#include "obsmeas/cli/run.hpp"

#include "obsmeas/analytic_bounds.hpp"
#include "obsmeas/cli/descriptors.hpp"
#include "obsmeas/cli/report_json.hpp"
#include "obsmeas/errors.hpp"
#include "obsmeas/interpolation.hpp"
#include "obsmeas/measurable_sets.hpp"
#include "obsmeas/optimal_control.hpp"
#include "obsmeas/parallel.hpp"
#include "obsmeas/polynomial.hpp"
#include "obsmeas/spectral_hypothesis.hpp"
#include "obsmeas/telescoping.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace obsmeas::cli {

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool verified = true;
  std::string summary;
  Json body = Json::object();
  std::optional<Json> witness;
};

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  VerificationOptions options;

  std::string path(const std::string& file) const { return (dir / file).string(); }
};

std::string hex_seed(std::uint64_t seed) {
  std::ostringstream os;
  os << "0x" << std::hex << seed;
  return os.str();
}

std::string fmt(double value) {
  std::ostringstream os;
  os.precision(6);
  os << value;
  return os.str();
}

LoadedModel resolve_model(const RunConfig& cfg) {
  if (!cfg.model_path.empty()) {
    if (!cfg.preset.empty()) throw ConfigError("give either --model or --preset, not both");
    return parse_model(load_json(cfg.model_path), cfg.model_path);
  }
  return model_preset(cfg.preset.empty() ? "scalar" : cfg.preset);
}

TimeSet resolve_set(const RunConfig& cfg) {
  if (!cfg.set_path.empty()) return parse_time_set(load_json(cfg.set_path), cfg.set_path);
  return make_time_set(cfg.T, {{0.0, cfg.T}});
}

Json set_json(const TimeSet& E) {
  Json intervals = Json::array();
  for (const auto& iv : E.intervals()) intervals.push_back({iv.lo, iv.hi});
  return {{"T", E.horizon()}, {"intervals", intervals}, {"measure", E.measure()}};
}

std::vector<double> default_L_grid() { return log_spaced(0.05, 1.0, 12); }

IntervalBoundSpec resolve_spec(const RunConfig& cfg, const LoadedModel& m) {
  if (!cfg.spec_path.empty()) return parse_bound_spec(load_json(cfg.spec_path), cfg.spec_path);
  if (cfg.d || cfg.k) {
    IntervalBoundSpec spec;
    spec.d = cfg.d.value_or(1.0);
    spec.k = cfg.k.value_or(1.0);
    spec.form = IntervalBoundSpec::Form::root;
    spec.validate();
    return spec;
  }
  if (m.model.is_unitary()) {
    IntervalBoundSpec spec;
    spec.form = IntervalBoundSpec::Form::root;
    return spec;
  }
  return fit_interval_bound(m.model, m.observation, cfg.L_grid.empty() ? default_L_grid() : cfg.L_grid);
}

Json witness_of(const ObservabilityReport& report) {
  return {{"kind", to_string(report.kind)},
          {"witness_state", vector_json(report.witness_state)},
          {"log_worst_ratio", number_json(report.log_worst_ratio)},
          {"log_constant", number_json(report.log_constant)}};
}

std::string direction_of(const std::vector<double>& column) {
  bool up = true, down = true, strict_up = true, strict_down = true;
  for (std::size_t i = 1; i < column.size(); ++i) {
    const double diff = column[i] - column[i - 1];
    if (diff < 0) up = strict_up = false;
    if (diff > 0) down = strict_down = false;
    if (diff == 0) strict_up = strict_down = false;
  }
  if (strict_up) return "increasing";
  if (strict_down) return "decreasing";
  if (up) return "nondecreasing";
  if (down) return "nonincreasing";
  return "mixed";
}

Outcome cmd_gramian(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const TimeSet E = resolve_set(ctx.cfg);
  Outcome out;
  Eigen::MatrixXd real;
  Eigen::MatrixXd imag;
  double low = 0.0;
  double high = 0.0;
  if (m.model.is_unitary()) {
    const Eigen::MatrixXcd G = gramian_l2_complex(m.model, m.observation, E);
    real = G.real();
    imag = G.imag();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G, Eigen::EigenvaluesOnly);
    low = eig.eigenvalues().minCoeff();
    high = eig.eigenvalues().maxCoeff();
    out.body["gramian_imag"] = matrix_json(imag);
  } else {
    real = gramian_l2(m.model, m.observation, E);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(real, Eigen::EigenvaluesOnly);
    low = eig.eigenvalues().minCoeff();
    high = eig.eigenvalues().maxCoeff();
  }
  out.body["set"] = set_json(E);
  out.body["gramian"] = matrix_json(real);
  out.body["eigenvalue_min"] = number_json(low);
  out.body["eigenvalue_max"] = number_json(high);
  out.verified = low >= -1e-12 * std::max(high, 0.0);

  std::vector<std::string> header{"row"};
  for (Eigen::Index c = 0; c < real.cols(); ++c) header.push_back("g" + std::to_string(c + 1));
  CsvTable table(header);
  for (Eigen::Index r = 0; r < real.rows(); ++r) {
    std::vector<double> row{static_cast<double>(r + 1)};
    for (Eigen::Index c = 0; c < real.cols(); ++c) row.push_back(real(r, c));
    table.add_row(row);
  }
  write_text(ctx.path("gramian.csv"), table.str());
  out.summary = "eigenvalues in [" + fmt(low) + ", " + fmt(high) + "]";
  return out;
}

Outcome cmd_obs_l2(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const TimeSet E = resolve_set(ctx.cfg);
  const auto report = obs_constant_l2(m.model, m.observation, E, E.horizon(), ctx.options);
  Outcome out;
  out.body["set"] = set_json(E);
  out.body["report"] = report_json(report);
  out.verified = report.valid();
  if (!out.verified) out.witness = witness_of(report);
  out.summary = "C = " + fmt(report.constant()) + ", worst ratio " + fmt(report.worst_ratio());
  return out;
}

Outcome cmd_fit_interval(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const auto grid = ctx.cfg.L_grid.empty() ? default_L_grid() : ctx.cfg.L_grid;
  const auto spec = fit_interval_bound(m.model, m.observation, grid);
  Outcome out;
  out.body["spec"] = bound_spec_json(spec);
  CsvTable table({"L", "C", "log_C", "log_envelope"});
  for (const auto& [L, C] : spec.samples) {
    const double envelope = spec.d / std::pow(L, spec.k);
    table.add_row({L, C, std::log(C), envelope});
    if (std::log(C) > envelope + 1e-9) out.verified = false;
  }
  write_text(ctx.path("fit_interval.csv"), table.str());
  out.summary = "d = " + fmt(spec.d) + ", k = " + fmt(spec.k) + (spec.degenerate ? " (degenerate)" : "");
  return out;
}

Outcome cmd_certify_h(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const auto cert = certify_hypothesis_h(m.model, m.observation, ctx.cfg.gamma);
  Outcome out;
  out.body["certificate"] = certificate_json(cert);
  CsvTable table({"m", "lambda", "N_m", "log_N_m", "log_envelope"});
  for (std::size_t i = 0; i < cert.per_mode_constants.size(); ++i) {
    const double Nm = cert.per_mode_constants[i];
    const double envelope = cert.log_envelope(i + 1);
    table.add_row({static_cast<double>(i + 1), cert.lambdas[i], Nm, std::log(Nm), envelope});
    if (std::log(Nm) > envelope + 1e-9) out.verified = false;
  }
  write_text(ctx.path("certify_h.csv"), table.str());
  out.summary = "N = " + fmt(cert.bigN) + " at gamma = " + fmt(cert.gamma);
  return out;
}

Outcome cmd_interp(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  Outcome out;
  // reference check of the lambda optimization: N = 1, gamma = 1/2, mu = 2, t = 1
  const double ref_max = lambda_optimization_max(1.0, 0.5, 2.0, 1.0);
  const double ref_bound = lambda_optimization_bound(1.0, 0.5, 2.0, 1.0);
  out.body["lambda_optimization_reference"] = {
      {"max", ref_max}, {"bound", ref_bound}, {"holds", ref_max <= ref_bound}};
  out.verified = ref_max <= ref_bound;

  const auto cert = certify_hypothesis_h(m.model, m.observation, ctx.cfg.gamma);
  out.body["certificate"] = certificate_json(cert);
  const std::vector<double> times =
      ctx.cfg.times.empty() ? std::vector<double>{0.05, 0.1, 0.5, 1.0} : ctx.cfg.times;
  Json one_time = Json::array();
  CsvTable table({"t", "C", "log_bound", "log_worst_ratio", "lambda_max", "lambda_bound"});
  for (double t : times) {
    const auto interp = interpolation_one_time(cert, m.observation.operator_norm(), 1.0, t);
    const auto report = verify_one_time_interpolation(m.model, m.observation, interp, t, ctx.options);
    const double lmax = lambda_optimization_max(cert.bigN, cert.gamma, cert.mu, t);
    const double lbound = lambda_optimization_bound(cert.bigN, cert.gamma, cert.mu, t);
    one_time.push_back({{"t", t},
                        {"interpolation", interpolation_json(interp)},
                        {"report", report_json(report)},
                        {"lambda_optimization", {{"max", lmax}, {"bound", lbound}}}});
    table.add_row({t, interp.C, report.log_constant, report.log_worst_ratio, lmax, lbound});
    if (!report.valid() || lmax > lbound) {
      out.verified = false;
      if (!out.witness) out.witness = witness_of(report);
    }
  }
  out.body["one_time"] = one_time;

  if (ctx.cfg.t1 || ctx.cfg.t2) {
    if (!ctx.cfg.t1 || !ctx.cfg.t2) throw ConfigError("--t1 and --t2 go together");
    const TimeSet E = resolve_set(ctx.cfg);
    const auto spec = resolve_spec(ctx.cfg, m);
    const auto report = interpolation_two_times(m.model, m.observation, spec, *ctx.cfg.t1,
                                                *ctx.cfg.t2, E, ctx.cfg.eta, ctx.options);
    out.body["two_times"] = report_json(report);
    if (!report.valid()) {
      out.verified = false;
      if (!out.witness) out.witness = witness_of(report);
    }
  }
  write_text(ctx.path("interp.csv"), table.str());
  out.summary = std::to_string(times.size()) + " one-time checks, N = " + fmt(cert.bigN);
  return out;
}

void add_empirical(Outcome& out, const LoadedModel& m, const TimeSet& E, const Context& ctx,
                   double log_constant) {
  const auto best = optimal_l1_ratio(m.model, m.observation, E, E.horizon(), ctx.options);
  out.body["empirical_log_ratio"] = number_json(std::log(best.ratio));
  out.body["empirical_state"] = vector_json(best.state);
  if (std::log(best.ratio) > log_constant + std::log1p(kRatioSlack)) {
    out.verified = false;
    out.witness = Json{{"witness_state", vector_json(best.state)},
                       {"log_ratio", number_json(std::log(best.ratio))},
                       {"log_constant", number_json(log_constant)}};
  }
}

Json sequence_json(const TelescopeSequence& seq) {
  return {{"limit", seq.limit},
          {"ratio", seq.ratio},
          {"point_count", seq.points.size()},
          {"first_point", seq.points.empty() ? 0.0 : seq.points.front()},
          {"first_gap", seq.gap_count() ? seq.gap(0) : 0.0},
          {"min_measure_fraction",
           seq.measure_fractions.empty()
               ? 1.0
               : *std::min_element(seq.measure_fractions.begin(), seq.measure_fractions.end())}};
}

Outcome cmd_thm1(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const TimeSet E = resolve_set(ctx.cfg);
  const auto spec = resolve_spec(ctx.cfg, m);
  const auto result = obs_measurable_theorem1(m.model, m.observation, spec, E, E.horizon(), ctx.options);
  Outcome out;
  out.body["set"] = set_json(E);
  out.body["spec"] = bound_spec_json(spec);
  out.body["report"] = report_json(result.report);
  out.body["constants"] = constants_json(result.constants);
  out.body["sequence"] = sequence_json(result.sequence);
  out.verified = result.report.valid();
  if (!out.verified) out.witness = witness_of(result.report);
  add_empirical(out, m, E, ctx, result.report.log_constant);
  out.summary = "log C = " + fmt(result.report.log_constant) + ", q = " + fmt(*result.constants.q_thm1);
  return out;
}

Outcome cmd_thm2(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const TimeSet E = resolve_set(ctx.cfg);
  const auto cert = certify_hypothesis_h(m.model, m.observation, ctx.cfg.gamma);
  const auto result = obs_measurable_theorem2(m.model, m.observation, cert, E, E.horizon(), ctx.options);
  Outcome out;
  out.body["set"] = set_json(E);
  out.body["certificate"] = certificate_json(cert);
  out.body["report"] = report_json(result.report);
  out.body["constants"] = constants_json(result.constants);
  out.body["sequence"] = sequence_json(result.sequence);
  out.verified = result.report.valid();
  if (!out.verified) out.witness = witness_of(result.report);
  add_empirical(out, m, E, ctx, result.report.log_constant);
  out.summary = "log C = " + fmt(result.report.log_constant) + ", q = " + fmt(*result.constants.q_thm2) +
                ", N = " + fmt(cert.bigN);
  return out;
}

Outcome cmd_telescope(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const auto spec = resolve_spec(ctx.cfg, m);
  const std::vector<double> horizons = ctx.cfg.values.empty() ? std::vector<double>{ctx.cfg.T} : ctx.cfg.values;
  Outcome out;
  out.body["spec"] = bound_spec_json(spec);
  const double top = *std::max_element(horizons.begin(), horizons.end());
  const double excess = interval_bound_excess(m.model, m.observation, spec, log_spaced(1e-3, top, 40));
  out.body["hypothesis_log_excess"] = number_json(excess);
  if (excess > 0.0) out.verified = false;

  Json runs = Json::array();
  CsvTable table({"T", "q", "F_T", "N", "log_constant", "log_worst_ratio"});
  for (double T : horizons) {
    const auto c = telescope_l2_to_l1(spec, m.observation.operator_norm(), 1.0, 0.0, T);
    const auto report = verify_l1_interval(m.model, m.observation, T, *c.log_c_prop24, ctx.options);
    runs.push_back({{"T", T}, {"constants", constants_json(c)}, {"report", report_json(report)}});
    table.add_row({T, *c.q_prop24, *c.f_T, *c.n_prop24, *c.log_c_prop24, report.log_worst_ratio});
    if (!report.valid()) {
      out.verified = false;
      if (!out.witness) out.witness = witness_of(report);
    }
  }
  out.body["runs"] = runs;
  if (!out.verified && !out.witness) out.witness = Json{{"hypothesis_log_excess", number_json(excess)}};
  write_text(ctx.path("telescope.csv"), table.str());
  const auto root = spec.root_form();
  out.summary = "q = " + fmt(std::pow((2 * root.d + 1) / (2 * root.d + 2), 1.0 / root.k)) + " over " +
                std::to_string(horizons.size()) + " horizons";
  return out;
}

Outcome cmd_lemma21(const Context& ctx) {
  const auto m = resolve_model(ctx.cfg);
  const auto family = trial_family(m.model.mode_count(), ctx.cfg.family, ctx.cfg.seed);
  std::vector<double> t_grid = ctx.cfg.times;
  if (t_grid.empty()) {
    for (int i = 1; i <= 10; ++i) t_grid.push_back(0.1 * i);
  }
  const auto cert = derivative_bound_certify(m.model, m.observation, family, 0.0, t_grid, ctx.cfg.beta_max);
  const auto reference = derivative_bound_check(m.model, m.observation, family, 0.0, t_grid,
                                                ctx.cfg.beta_max, 1.0, 0.5);
  Outcome out;
  out.body["certificate"] = derivative_certificate_json(cert);
  out.body["reference_pair"] = derivative_certificate_json(reference);
  CsvTable table({"beta", "t", "log_bound", "log_value", "log_slack"});
  for (const auto& r : cert.residuals) table.add_row({static_cast<double>(r.beta), r.t, r.log_bound, r.log_value, r.slack()});
  write_text(ctx.path("lemma21.csv"), table.str());
  out.verified = cert.valid();
  if (!out.verified) out.body["note"] = "negative residual in lemma21.csv";
  out.summary = "K = " + fmt(cert.bigK) + ", rho = " + fmt(cert.rho);
  return out;
}

Outcome cmd_lemma22(const Context& ctx) {
  const std::vector<double> ratios =
      ctx.cfg.values.empty() ? std::vector<double>{0.25, 0.5, 0.75} : ctx.cfg.values;
  constexpr double kRho = 0.5;
  Outcome out;
  Json groups = Json::array();
  CsvTable table({"degree", "ratio", "oracle_violations", "max_sup_over_oracle", "fitted_C",
                  "fitted_theta", "invalid_members"});
  std::mt19937_64 rng(ctx.cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int degree = 0; degree <= ctx.cfg.degree_max; ++degree) {
    for (double ratio : ratios) {
      if (!(ratio > 0.0 && ratio <= 1.0)) throw ConfigError("lemma22: ratios must lie in (0, 1]");
      struct Member {
        Coefficients c;
        std::vector<Interval> E;
      };
      std::vector<Member> members;
      for (std::size_t i = 0; i < ctx.cfg.poly_count; ++i) {
        Member mem;
        for (int j = 0; j <= degree; ++j) mem.c.push_back(normal(rng));
        const double first = ratio * uniform(rng);
        const double start = (1.0 - ratio) * uniform(rng);
        const double gap = (1.0 - ratio - start) * uniform(rng);
        mem.E.push_back({start, start + first});
        mem.E.push_back({start + first + gap, start + ratio + gap});
        members.push_back(std::move(mem));
      }
      const auto measured = parallel_map<SmallnessMeasurement>(members.size(), [&](std::size_t i) {
        const auto& mem = members[i];
        SmallnessInput input;
        input.f = [&mem](double x) { return poly_eval(mem.c, x); };
        input.M = std::max(poly_taylor_constant(mem.c, 0.0, 1.0, kRho), 1e-300);
        input.rho = kRho;
        input.E = mem.E;
        input.polynomial = mem.c;
        return measure_smallness(input, 4096);
      });
      std::size_t violations = 0;
      double worst = 0.0;
      for (const auto& mm : measured) {
        const double share = *mm.oracle_bound > 0.0 ? mm.sup_norm / *mm.oracle_bound : 0.0;
        worst = std::max(worst, share);
        if (mm.sup_norm > *mm.oracle_bound * (1.0 + 1e-12)) ++violations;
      }
      const auto fitted = smallness_fit(measured);
      const auto invalid = static_cast<std::size_t>(
          std::count_if(fitted.begin(), fitted.end(), [](const SmallnessResult& r) { return !r.valid; }));
      table.add_row({static_cast<double>(degree), ratio, static_cast<double>(violations), worst,
                     fitted.front().fitted_C, fitted.front().fitted_theta, static_cast<double>(invalid)});
      groups.push_back({{"degree", degree},
                        {"ratio", ratio},
                        {"oracle_violations", violations},
                        {"max_sup_over_oracle", number_json(worst)},
                        {"fitted_C", number_json(fitted.front().fitted_C)},
                        {"fitted_theta", number_json(fitted.front().fitted_theta)},
                        {"invalid_members", invalid}});
      if (violations > 0 || invalid > 0) out.verified = false;
    }
  }
  out.body["groups"] = groups;
  out.body["rho"] = kRho;
  write_text(ctx.path("lemma22.csv"), table.str());
  out.summary = std::to_string(groups.size()) + " polynomial groups";
  return out;
}

LoadedProblem resolve_problem(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.problem_path.empty()) {
    auto loaded = parse_problem(load_json(cfg.problem_path), cfg.problem_path);
    if (cfg.tol) loaded.time_tol = *cfg.tol;
    return loaded;
  }
  auto m = resolve_model(cfg);
  TimeOptimalProblem problem{m.model, m.observation,
                             Eigen::VectorXd::Unit(static_cast<Eigen::Index>(m.model.mode_count()), 0),
                             cfg.M, std::nullopt};
  problem.validate();
  return {problem, m.name, cfg.tol.value_or(1e-4)};
}

void write_control_csv(const std::string& path, const MinNormSolution& sol) {
  const auto& grid = sol.control;
  std::vector<std::string> header{"t_start", "t_end"};
  for (Eigen::Index j = 0; j < grid.values.cols(); ++j) header.push_back("f" + std::to_string(j + 1));
  header.push_back("norm");
  CsvTable table(header);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    std::vector<double> row{grid.times[i], grid.times[i + 1]};
    const auto r = grid.values.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index j = 0; j < r.size(); ++j) row.push_back(r(j));
    row.push_back(r.norm());
    table.add_row(row);
  }
  write_text(path, table.str());
}

Outcome cmd_tp_solve(const Context& ctx, bool bang_bang) {
  const auto loaded = resolve_problem(ctx);
  const auto result = optimal_time(loaded.problem, loaded.time_tol);
  Outcome out;
  out.body["problem"] = {{"source", loaded.name},
                         {"M", loaded.problem.bound_M},
                         {"z0", vector_json(loaded.problem.z0)},
                         {"time_tol", loaded.time_tol}};
  out.body["optimal_time"] = result.time;
  out.body["bracket"] = {result.bracket_lo, result.bracket_hi};
  out.body["bisection_steps"] = result.bisection_steps;
  out.body["solution"] = solution_json(result.solution);
  write_control_csv(ctx.path(bang_bang ? "bangbang_control.csv" : "tp_control.csv"), result.solution);
  out.verified = result.solution.within_tolerance();
  out.summary = "T(M) = " + fmt(result.time) + ", residual " + fmt(result.solution.terminal_residual);
  if (bang_bang) {
    const auto bb = bang_bang_check(result.solution, loaded.problem.bound_M, ctx.cfg.bb_tol);
    out.body["bang_bang"] = bang_bang_json(bb);
    out.body["bang_bang_tol"] = ctx.cfg.bb_tol;
    out.verified = out.verified && bb.fraction_on_bound >= 0.99 && bb.vanishing_fraction < 0.01;
    out.summary += ", on-bound fraction " + fmt(bb.fraction_on_bound);
  }
  if (!out.verified) {
    out.witness = Json{{"terminal_state", vector_json(result.solution.terminal_state)},
                       {"dual_vector", vector_json(result.solution.dual_vector)}};
  }
  return out;
}

Outcome cmd_sweep(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.values.empty()) throw ConfigError("sweep: empty axis, give --values");
  std::string column;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  VerificationOptions quiet = ctx.options;
  quiet.random_states = std::min<std::size_t>(quiet.random_states, 100);

  if (cfg.axis == "measure") {
    const auto m = resolve_model(cfg);
    header = {"delta", "log_constant", "log_worst_ratio"};
    for (double delta : cfg.values) {
      const TimeSet E = make_time_set(cfg.T, {{cfg.T - delta, cfg.T}});
      const auto rep = obs_constant_l2(m.model, m.observation, E, cfg.T, quiet);
      rows.push_back({delta, rep.log_constant, rep.log_worst_ratio});
    }
  } else if (cfg.axis == "T") {
    const auto loaded = resolve_problem(ctx);
    header = {"T", "min_norm"};
    for (double T : cfg.values) rows.push_back({T, min_norm_value(loaded.problem, T)});
  } else if (cfg.axis == "M") {
    auto loaded = resolve_problem(ctx);
    header = {"M", "optimal_time"};
    for (double M : cfg.values) {
      loaded.problem.bound_M = M;
      rows.push_back({M, optimal_time(loaded.problem, loaded.time_tol).time});
    }
  } else if (cfg.axis == "n" || cfg.axis == "width") {
    const TimeSet E = resolve_set(cfg);
    header = {cfg.axis, "log_constant", "log_worst_ratio"};
    for (double v : cfg.values) {
      const bool by_n = cfg.axis == "n";
      if (by_n && !(v >= 1.0 && v == std::floor(v))) throw ConfigError("sweep: n must be a positive integer");
      if (!by_n && !(v > 0.0 && v <= 0.9)) throw ConfigError("sweep: width must lie in (0, 0.9]");
      const std::size_t n = by_n ? static_cast<std::size_t>(v) : 8;
      const double a = by_n ? 0.3 : 0.55 - v / 2;
      const double b = by_n ? 0.8 : 0.55 + v / 2;
      auto [model, B] = make_heat_1d(n, a, b);
      const auto rep = obs_constant_l2(model, B, E, E.horizon(), quiet);
      rows.push_back({v, rep.log_constant, rep.log_worst_ratio});
    }
  } else {
    throw ConfigError("sweep: --axis must be one of measure, T, M, n, width");
  }

  Outcome out;
  CsvTable table(header);
  Json json_rows = Json::array();
  std::vector<double> main_column;
  for (const auto& row : rows) {
    table.add_row(row);
    Json r = Json::object();
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = number_json(row[i]);
    json_rows.push_back(r);
    main_column.push_back(row[1]);
  }
  out.body["axis"] = cfg.axis;
  out.body["rows"] = json_rows;
  if (rows.size() > 1) {
    const std::string direction = direction_of(main_column);
    out.body["monotonicity"] = {{"column", header[1]}, {"along", "axis order"}, {"direction", direction}};
    table.add_comment("monotonicity of " + header[1] + " along the axis order: " + direction);
    out.summary = header[1] + " " + direction;
  } else {
    out.summary = "single point";
  }
  write_text(ctx.path("sweep.csv"), table.str());
  return out;
}

using Handler = std::function<Outcome(const Context&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"gramian", cmd_gramian},
      {"obs-l2", cmd_obs_l2},
      {"fit-interval", cmd_fit_interval},
      {"certify-h", cmd_certify_h},
      {"interp", cmd_interp},
      {"thm1", cmd_thm1},
      {"thm2", cmd_thm2},
      {"telescope", cmd_telescope},
      {"lemma21", cmd_lemma21},
      {"lemma22", cmd_lemma22},
      {"tp-solve", [](const Context& c) { return cmd_tp_solve(c, false); }},
      {"bangbang", [](const Context& c) { return cmd_tp_solve(c, true); }},
      {"sweep", cmd_sweep},
  };
  return table;
}

std::string file_stem(const std::string& command) {
  std::string out = command;
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [name, handler] : handlers()) out.push_back(name);
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(config.command);
  if (it == handlers().end()) {
    err << "error: unknown command \"" << config.command << "\"\n";
    return kExitUsage;
  }
  try {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw ConfigError(config.out_dir + ": cannot create output directory");
    Context ctx{config, fs::path(config.out_dir), VerificationOptions{}};
    ctx.options.random_states = config.states;
    ctx.options.seed = config.seed;

    Outcome outcome = it->second(ctx);
    const std::string stem = file_stem(config.command);
    Json report = {{"schema", kSchemaVersion},
                   {"command", config.command},
                   {"status", outcome.verified ? "verified" : "violated"},
                   {"seed", hex_seed(config.seed)}};
    if (!config.model_path.empty()) {
      report["model"] = config.model_path;
    } else if (config.command != "lemma22") {
      report["model"] = config.preset.empty() ? "scalar" : config.preset;
    }
    for (auto& [key, value] : outcome.body.items()) report[key] = value;
    write_json(ctx.path(stem + ".json"), report);
    if (!outcome.verified && outcome.witness) {
      Json witness = {{"schema", kSchemaVersion}, {"command", config.command}};
      for (auto& [key, value] : outcome.witness->items()) witness[key] = value;
      write_json(ctx.path(stem + "_witness.json"), witness);
    }
    out << config.command << ": " << (outcome.verified ? "verified" : "violated") << " ("
        << outcome.summary << ")\n";
    return outcome.verified ? kExitVerified : kExitViolated;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const obsmeas::Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Observability constants and time-optimal control on spectral models", "obsmeas"};
  RunConfig cfg;
  std::string seed_text;
  std::vector<std::string> commands = command_names();
  app.add_option("command", cfg.command, "Command to run")->required()->check(CLI::IsMember(commands));
  app.add_option("--model", cfg.model_path, "Model descriptor JSON");
  app.add_option("--preset", cfg.preset, "Built-in model: scalar, heat-n8, heat-n16, heat-n32, unitary-scalar");
  app.add_option("--set", cfg.set_path, "Time set JSON");
  app.add_option("--problem", cfg.problem_path, "Time-optimal problem JSON");
  app.add_option("--spec", cfg.spec_path, "Interval bound JSON");
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--seed", seed_text, "Seed in hex");
  app.add_option("--tol", cfg.tol, "Time tolerance of the optimal-time bisection");
  app.add_option("--states", cfg.states, "Random states in the verification family");
  app.add_option("--T", cfg.T, "Horizon when no set file is given");
  app.add_option("--gamma", cfg.gamma, "Exponent of the spectral hypothesis");
  app.add_option("--t", cfg.times, "Times (interp) or t grid (lemma21)");
  app.add_option("--L-grid", cfg.L_grid, "Interval lengths for the interval-bound fit");
  app.add_option("--d", cfg.d, "d of a root-form interval bound");
  app.add_option("--k", cfg.k, "k of a root-form interval bound");
  app.add_option("--M", cfg.M, "Control bound");
  app.add_option("--beta-max", cfg.beta_max, "Highest derivative order");
  app.add_option("--family", cfg.family, "States in the derivative-bound family");
  app.add_option("--degree-max", cfg.degree_max, "Highest polynomial degree");
  app.add_option("--poly-count", cfg.poly_count, "Polynomials per degree and ratio");
  app.add_option("--bb-tol", cfg.bb_tol, "Relative tolerance of the bang-bang check");
  app.add_option("--t1", cfg.t1, "Start of the two-time window");
  app.add_option("--t2", cfg.t2, "End of the two-time window");
  app.add_option("--eta", cfg.eta, "Density demanded on the two-time window");
  app.add_option("--axis", cfg.axis, "Sweep axis: measure, T, M, n, width");
  app.add_option("--values", cfg.values, "Sweep values, or horizons for telescope, ratios for lemma22");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitVerified;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!seed_text.empty()) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(seed_text, &used, 16);
      if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      err << "error: --seed must be hexadecimal\n";
      return kExitUsage;
    }
  }
  return run(cfg, out, err);
}

}  // namespace obsmeas::cli
