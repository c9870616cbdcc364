#include "obsmeas/errors.hpp"
#include "obsmeas/telescoping.hpp"

#include <doctest.h>

#include <cmath>

using namespace obsmeas;

namespace {
IntervalBoundSpec root_spec(double d, double k) {
  IntervalBoundSpec s;
  s.d = d;
  s.k = k;
  s.form = IntervalBoundSpec::Form::root;
  return s;
}
}  // namespace

TEST_CASE("upgrade constants for d = k = 1") {
  const auto c = telescope_l2_to_l1(root_spec(1.0, 1.0), 1.0, 1.0, 0.0, 1.0);
  CHECK(*c.q_prop24 == 0.75);
  CHECK(*c.n_prop24 == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(*c.f_T == 1.0);
  CHECK(*c.log_c_prop24 == doctest::Approx(12.0).epsilon(1e-14));
  const auto half = telescope_l2_to_l1(root_spec(1.0, 1.0), 1.0, 1.0, 0.0, 0.5);
  CHECK(*half.log_c_prop24 == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("upgrade ratio formula and squared-form conversion") {
  for (double d : {0.1, 0.5, 2.0, 7.0}) {
    for (double k : {0.5, 1.0, 2.0}) {
      const auto c = telescope_l2_to_l1(root_spec(d, k), 2.0, 1.5, 0.25, 0.8);
      CHECK(*c.q_prop24 == doctest::Approx(std::pow((2 * d + 1) / (2 * d + 2), 1 / k)).epsilon(1e-15));
      CHECK(*c.n_prop24 == doctest::Approx((2 * d + 1) / std::pow(1 - *c.q_prop24, k)).epsilon(1e-13));
      CHECK(*c.f_T == doctest::Approx(2.0 * 1.5 * std::exp(0.2)).epsilon(1e-15));
      IntervalBoundSpec sq = root_spec(2 * d, k);
      sq.form = IntervalBoundSpec::Form::squared;
      CHECK(*telescope_l2_to_l1(sq, 2.0, 1.5, 0.25, 0.8).q_prop24 == *c.q_prop24);
    }
  }
  CHECK_THROWS_AS(telescope_l2_to_l1(root_spec(1, 1), 1.0, 1.0, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(telescope_l2_to_l1(root_spec(1, 1), 0.0, 1.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("theta enters squared") {
  auto s = root_spec(1.0, 1.0);
  s.theta_constant = 3.0;
  CHECK(*telescope_l2_to_l1(s, 1.0, 1.0, 0.0, 1.0).f_T == doctest::Approx(9.0));
}

TEST_CASE("upgrade validates on the scalar model") {
  const auto m = make_diagonal({1.0});
  const auto I = ObservationOperator::identity(1);
  const auto spec = root_spec(1.0, 1.0);
  CHECK(interval_bound_excess(m, I, spec, log_spaced(1e-3, 1.0, 40)) <= 0.0);
  for (double T : {0.25, 0.5, 1.0}) {
    const auto c = telescope_l2_to_l1(spec, 1.0, 1.0, 0.0, T);
    const auto rep = verify_l1_interval(m, I, T, *c.log_c_prop24);
    CHECK(rep.valid());
    CHECK(rep.log_worst_ratio == doctest::Approx(std::log(std::exp(-T) / -std::expm1(-T))).epsilon(1e-10));
  }
}

TEST_CASE("upgrade validates on heat with a fitted bound") {
  auto [model, B] = make_heat_1d(16, 0.3, 0.8);
  const auto spec = fit_interval_bound(model, B, log_spaced(0.05, 1.0, 12));
  CHECK(interval_bound_excess(model, B, spec, log_spaced(1e-3, 1.0, 40)) <= 0.0);
  for (double T : {0.25, 0.5, 1.0}) {
    const auto c = telescope_l2_to_l1(spec, B.operator_norm(), 1.0, 0.0, T);
    const auto rep = verify_l1_interval(model, B, T, *c.log_c_prop24);
    CHECK(rep.valid());
    CHECK(rep.states_checked == 516);
  }
}

TEST_CASE("unitary scalar upgrade uses complex states") {
  const auto w = make_diagonal({1.0}, GeneratorKind::unitary);
  const auto I = ObservationOperator::identity(1);
  const auto spec = root_spec(1.0, 1.0);
  CHECK(interval_bound_excess(w, I, spec, log_spaced(1e-3, 1.0, 40)) <= 0.0);
  const auto c = telescope_l2_to_l1(spec, 1.0, 1.0, 0.0, 1.0);
  const auto rep = verify_l1_interval(w, I, 1.0, *c.log_c_prop24);
  CHECK(rep.valid());
  // |S(T)u| = |u| and the observation integral is T |u|
  CHECK(rep.log_worst_ratio == doctest::Approx(0.0).scale(1.0));
  CHECK(rep.witness_state.minCoeff() >= 0.0);
}

TEST_CASE("excess detects a bound that is too small") {
  auto [model, B] = make_heat_1d(8, 0.3, 0.8);
  CHECK(interval_bound_excess(model, B, root_spec(1e-3, 1.0), log_spaced(0.01, 1.0, 10)) > 0.0);
}
