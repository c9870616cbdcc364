#include "obsmeas/cli/descriptors.hpp"
#include "obsmeas/cli/report_json.hpp"
#include "obsmeas/cli/run.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace obsmeas;
using namespace obsmeas::cli;
namespace fs = std::filesystem;

namespace {
const std::string kData = OBSMEAS_DATA_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("obsmeas_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json read(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

int run_args(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "obsmeas");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}
}  // namespace

TEST_CASE("presets load") {
  for (const auto& name : preset_names()) CHECK_NOTHROW(model_preset(name));
  const auto heat = model_preset("heat-n8");
  CHECK(heat.model.mode_count() == 8);
  CHECK(model_preset("unitary-scalar").model.is_unitary());
  CHECK_THROWS_AS(model_preset("nope"), ConfigError);
}

TEST_CASE("descriptor parsing") {
  const auto m = parse_model(Json::parse(R"({"kind": "diagonal", "eigenvalues": [1, 2],
                                             "observation": [[1, 0], [0, 2]]})"),
                             "inline");
  CHECK(m.model.eigenvalue(1) == 2.0);
  CHECK(m.observation.operator_norm() == doctest::Approx(2.0));
  CHECK_THROWS_AS(parse_model(Json::parse(R"({"kind": "diagonal"})"), "inline"), ConfigError);
  CHECK_THROWS(parse_model(Json::parse(R"({"kind": "diagonal", "eigenvalues": [2, 1]})"), "inline"));

  const auto E = parse_time_set(load_json(kData + "/sets/three_intervals.json"), "set");
  CHECK(E.measure() == doctest::Approx(0.3));
  CHECK(E.horizon() == 1.0);

  const auto spec = parse_bound_spec(load_json(kData + "/specs/d1_k1.json"), "spec");
  CHECK(spec.form == IntervalBoundSpec::Form::root);
  CHECK(spec.d == 1.0);
  const auto table = parse_bound_spec(Json::parse(R"({"d": 2, "k": 1, "theta": [[0.1, 1], [0.5, 2]]})"), "t");
  CHECK(table.theta(0.7) == 2.0);
  CHECK(table.form == IntervalBoundSpec::Form::root);

  const auto prob = parse_problem(load_json(kData + "/problems/heat_bangbang.json"), "p");
  CHECK(prob.problem.z0.size() == 8);
  CHECK(prob.problem.bound_M == 1.0);
  CHECK(prob.time_tol == 1e-4);
}

TEST_CASE("parse errors carry line numbers") {
  const auto dir = scratch("parse");
  const auto path = dir / "bad.json";
  std::ofstream(path) << "{\n  \"kind\": \"diagonal\",\n  \"eigenvalues\": [1,, 2]\n}\n";
  try {
    (void)load_json(path.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  CHECK_THROWS_AS(load_json((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("usage errors exit with 1") {
  const auto dir = scratch("usage");
  std::string err;
  CHECK(run_args({"gramian", "--model", (dir / "missing.json").string(), "--out", dir.string()}, &err) ==
        kExitUsage);
  CHECK(err.find("cannot open") != std::string::npos);
  CHECK(run_args({"frobnicate"}) == kExitUsage);
  CHECK(run_args({"gramian", "--seed", "xyz", "--out", dir.string()}) == kExitUsage);
  CHECK(run_args({"gramian", "--preset", "nope", "--out", dir.string()}) == kExitUsage);
}

TEST_CASE("gramian command writes a versioned report") {
  const auto dir = scratch("gramian");
  CHECK(run_args({"gramian", "--preset", "scalar", "--out", dir.string()}) == kExitVerified);
  const auto j = read(dir / "gramian.json");
  CHECK(j["schema"] == 1);
  CHECK(j["status"] == "verified");
  CHECK(j["seed"] == "0xb5e3a5");
  CHECK(fs::exists(dir / "gramian.csv"));
}

TEST_CASE("obs-l2 on the scalar preset") {
  const auto dir = scratch("obsl2");
  RunConfig cfg;
  cfg.command = "obs-l2";
  cfg.out_dir = dir.string();
  std::ostringstream out, err;
  CHECK(run(cfg, out, err) == kExitVerified);
  const auto j = read(dir / "obs_l2.json");
  const double c = j["report"]["constant"].get<double>();
  CHECK(c == doctest::Approx(2.0 / (std::exp(2.0) - 1.0)).epsilon(1e-12));
}

TEST_CASE("tp-solve on the scalar problem") {
  const auto dir = scratch("tp");
  CHECK(run_args({"tp-solve", "--problem", kData + "/problems/scalar.json", "--out", dir.string()}) ==
        kExitVerified);
  const auto j = read(dir / "tp_solve.json");
  CHECK(std::abs(j["optimal_time"].get<double>() - std::log(2.0)) <= 1e-3);
  CHECK(fs::exists(dir / "tp_control.csv"));
}

TEST_CASE("thm2 on heat verifies") {
  const auto dir = scratch("thm2");
  CHECK(run_args({"thm2", "--model", kData + "/models/heat_n8.json", "--set",
                  kData + "/sets/three_intervals.json", "--states", "100", "--out", dir.string()}) ==
        kExitVerified);
  const auto j = read(dir / "thm2.json");
  CHECK(j["status"] == "verified");
  CHECK_FALSE(fs::exists(dir / "thm2_witness.json"));
}

TEST_CASE("a violated bound exits with 2 and dumps a witness") {
  const auto dir = scratch("violated");
  const auto spec = dir / "tiny.json";
  std::ofstream(spec) << R"({"d": 0.001, "k": 1, "form": "root"})";
  const int code = run_args({"telescope", "--preset", "heat-n8", "--spec", spec.string(), "--states",
                             "50", "--out", dir.string()});
  CHECK(code == kExitViolated);
  CHECK(fs::exists(dir / "telescope_witness.json"));
  CHECK(read(dir / "telescope.json")["status"] == "violated");
}

TEST_CASE("sweep with a single point has no monotonicity summary") {
  const auto dir = scratch("sweep");
  CHECK(run_args({"sweep", "--preset", "heat-n8", "--axis", "T", "--values", "0.5", "--out",
                  dir.string()}) == kExitVerified);
  const auto j = read(dir / "sweep.json");
  CHECK_FALSE(j.contains("monotonicity"));
}

TEST_CASE("number formatting") {
  CHECK(number_json(std::nan("")).is_null());
  CHECK(number_json(1.5) == 1.5);
  CHECK(format_number(0.1) == "0.10000000000000001");
}
