#include "obsmeas/errors.hpp"
#include "obsmeas/spectral_model.hpp"

#include <oracles.hpp>

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace obsmeas;

namespace {
Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}
}  // namespace

TEST_CASE("make_diagonal validates the spectrum") {
  CHECK_NOTHROW(make_diagonal({1.0}, GeneratorKind::dissipative));
  CHECK_NOTHROW(make_diagonal({1.0, 1.0, 2.0}, GeneratorKind::dissipative));
  CHECK_THROWS_AS(make_diagonal({0.0, 1.0}, GeneratorKind::dissipative), ValidationError);
  CHECK_THROWS_AS(make_diagonal({2.0, 1.0}, GeneratorKind::dissipative), ValidationError);
  CHECK_THROWS_AS(make_diagonal({}, GeneratorKind::dissipative), ValidationError);
  const auto m = make_diagonal({1.0, 2.0}, GeneratorKind::dissipative);
  CHECK(m.decay_mu() == 1.0);
  CHECK(m.mode_count() == 2);
}

TEST_CASE("heat model has the Dirichlet spectrum") {
  auto [model, B] = make_heat_1d(8, 0.3, 0.8);
  CHECK(model.lambda1() == doctest::Approx(M_PI * M_PI).epsilon(1e-15));
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(model.eigenvalue(k) == doctest::Approx(std::pow((k + 1) * M_PI, 2)).epsilon(1e-15));
  }
  CHECK(B.input_dim() == 8);
  CHECK(B.output_dim() == 64);
}

TEST_CASE("heat observation norms match closed forms") {
  auto [m1, full] = make_heat_1d(1, 0.0, 1.0, 32);
  CHECK(full.gram()(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  auto [m2, half] = make_heat_1d(1, 0.0, 0.5, 32);
  CHECK(half.gram()(0, 0) == doctest::Approx(0.5).epsilon(1e-10));
  auto [m3, two] = make_heat_1d(2, 0.3, 0.8);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(two.matrix());
  CHECK(svd.singularValues().minCoeff() > 0.0);
}

TEST_CASE("heat observation Gram matrix matches dense quadrature") {
  auto [model, B] = make_heat_1d(2, 0.3, 0.8);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const double ref = oracle::composite_simpson(
          [&](double x) { return heat_eigenfunction(j + 1, x) * heat_eigenfunction(k + 1, x); }, 0.3,
          0.8, 4000);
      CHECK(B.gram()(j, k) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("make_heat_1d rejects bad input") {
  CHECK_THROWS_AS(make_heat_1d(0, 0.3, 0.8), ValidationError);
  CHECK_THROWS_AS(make_heat_1d(4, 0.5, 0.5), ValidationError);
  CHECK_THROWS_AS(make_heat_1d(4, 0.3, 0.8, 1), ValidationError);
}

TEST_CASE("operator norm is the top singular value") {
  Eigen::MatrixXd M(2, 3);
  M << 1, 2, 0, 0, 1, 3;
  const auto B = ObservationOperator::custom(M);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  CHECK(B.operator_norm() == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
  CHECK(ObservationOperator::identity(4).operator_norm() == 1.0);
}

TEST_CASE("semigroup scalar values") {
  const auto m = make_diagonal({1.0}, GeneratorKind::dissipative);
  Eigen::VectorXd u(1);
  u << 1.0;
  CHECK(semigroup_apply(m, 1.0, u)(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(semigroup_apply(m, 0.0, u)(0) == 1.0);
  CHECK_THROWS_AS(semigroup_apply(m, -1.0, u), ValidationError);

  const auto w = make_diagonal({1.0}, GeneratorKind::unitary);
  Eigen::VectorXcd z(1);
  z << 1.0;
  const auto out = semigroup_apply(w, M_PI, z);
  CHECK(out(0).real() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(out(0).imag()) < 1e-15);
}

TEST_CASE("semigroup law and decay off the leading modes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 2.0);
  auto [model, B] = make_heat_1d(6, 0.3, 0.8);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd u = random_vector(rng, 6);
    const double t = uni(rng);
    const double s = uni(rng);
    const Eigen::VectorXd lhs = semigroup_apply(model, t + s, u);
    const Eigen::VectorXd rhs = semigroup_apply(model, t, semigroup_apply(model, s, u));
    CHECK((lhs - rhs).norm() <= 1e-12 * u.norm());
    for (std::size_t m = 0; m + 1 < 6; ++m) {
      Eigen::VectorXd g = u;
      g.head(static_cast<Eigen::Index>(m + 1)).setZero();
      const double bound = std::exp(-model.eigenvalue(m + 1) * t) * g.norm();
      CHECK(semigroup_apply(model, t, g).norm() <= bound * (1 + 1e-12));
      CHECK(bound <= std::exp(-model.eigenvalue(m) * t) * g.norm() * (1 + 1e-12));
    }
  }
}

TEST_CASE("unitary semigroup is an isometry") {
  const auto m = make_diagonal({1.0, 4.0, 9.0}, GeneratorKind::unitary);
  Eigen::VectorXcd z(3);
  z << std::complex<double>(1, 2), std::complex<double>(-0.5, 0.1), 3.0;
  for (double t : {0.1, 1.0, 7.3}) CHECK(semigroup_apply(m, t, z).norm() == doctest::Approx(z.norm()).epsilon(1e-12));
  Eigen::VectorXd r = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(semigroup_apply(m, 1.0, r), ValidationError);
}

TEST_CASE("state derivatives") {
  const auto m = make_diagonal({2.0}, GeneratorKind::dissipative);
  Eigen::VectorXd u(1);
  u << 1.0;
  CHECK(state_derivative(m, 1.0, u, 1)(0) == doctest::Approx(-2.0 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(state_derivative(m, 0.0, u, 0)(0) == 1.0);
  CHECK_THROWS_AS(state_derivative(m, 0.0, u, 1), ValidationError);

  const auto m3 = make_diagonal({1.0, 2.5, 4.0}, GeneratorKind::dissipative);
  Eigen::VectorXd v(3);
  v << 0.3, -1.2, 0.8;
  // order 4 against a central difference of order-3 derivatives
  const double h = 1e-3;
  const Eigen::VectorXd fd =
      (state_derivative(m3, 0.5 + h, v, 3) - state_derivative(m3, 0.5 - h, v, 3)) / (2 * h);
  const Eigen::VectorXd exact = state_derivative(m3, 0.5, v, 4);
  CHECK((fd - exact).norm() <= 1e-5 * exact.norm());

  // m-fold splitting: S^{(m)}(t) = (A S(t/m))^m
  for (int order = 1; order <= 6; ++order) {
    Eigen::VectorXd w = v;
    for (int i = 0; i < order; ++i) w = state_derivative(m3, 0.5 / order, w, 1);
    const Eigen::VectorXd direct = state_derivative(m3, 0.5, v, order);
    CHECK((w - direct).norm() <= 1e-9 * direct.norm());
  }
}

TEST_CASE("observation intensity") {
  const auto m = make_diagonal({1.0}, GeneratorKind::dissipative);
  const auto I = ObservationOperator::identity(1);
  Eigen::VectorXd u(1);
  u << 1.0;
  CHECK(observation_intensity(m, I, 1.0, u) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(observation_intensity(m, I, 1.0, Eigen::VectorXd(Eigen::VectorXd::Zero(1))) == 0.0);

  auto [heat, B] = make_heat_1d(2, 0.3, 0.8);
  Eigen::VectorXd c(2);
  c << 1.0, 1.0;
  const double ref = oracle::heat_window_energy(c, 0.3, 0.8, 0.1);
  CHECK(observation_intensity(heat, B, 0.1, c) == doctest::Approx(ref).epsilon(1e-8));
  CHECK_THROWS_AS(observation_intensity(heat, ObservationOperator::identity(3), 0.1, c), DimensionError);
}
