#include "obsmeas/spectral_model.hpp"

#include "obsmeas/errors.hpp"
#include "obsmeas/quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace obsmeas {

std::string to_string(GeneratorKind kind) {
  return kind == GeneratorKind::unitary ? "unitary" : "dissipative";
}

std::string to_string(ObservationProvenance::Kind kind) {
  switch (kind) {
    case ObservationProvenance::Kind::identity: return "identity";
    case ObservationProvenance::Kind::window: return "window";
    case ObservationProvenance::Kind::custom: return "custom";
  }
  return "custom";
}

SpectralModel::SpectralModel(std::vector<double> eigenvalues, GeneratorKind kind)
    : eigenvalues_(std::move(eigenvalues)), kind_(kind) {
  if (eigenvalues_.empty()) throw ValidationError("spectral model needs at least one eigenvalue");
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    const double v = eigenvalues_[k];
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << "eigenvalue " << k << " = " << v << " is not strictly positive";
      throw ValidationError(os.str());
    }
    if (k > 0 && v < eigenvalues_[k - 1]) {
      std::ostringstream os;
      os << "eigenvalues must be nondecreasing (index " << k << ")";
      throw ValidationError(os.str());
    }
  }
  lambda_ = Eigen::Map<const Eigen::VectorXd>(eigenvalues_.data(),
                                              static_cast<Eigen::Index>(eigenvalues_.size()));
}

ObservationOperator::ObservationOperator(Eigen::MatrixXd matrix, ObservationProvenance provenance)
    : matrix_(std::move(matrix)), provenance_(provenance) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) {
    throw ValidationError("observation matrix must be non-empty");
  }
  if (!matrix_.allFinite()) throw ValidationError("observation matrix has non-finite entries");
  gram_ = matrix_.transpose() * matrix_;
  if (provenance_.kind == ObservationProvenance::Kind::identity) {
    norm_ = 1.0;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_);
    norm_ = svd.singularValues()(0);
  }
}

ObservationOperator ObservationOperator::identity(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(n);
  ObservationProvenance p;
  p.kind = ObservationProvenance::Kind::identity;
  return ObservationOperator(Eigen::MatrixXd::Identity(dim, dim), p);
}

ObservationOperator ObservationOperator::custom(Eigen::MatrixXd matrix) {
  return ObservationOperator(std::move(matrix), ObservationProvenance{});
}

double ObservationOperator::restricted_min_singular_value(std::size_t m) const {
  if (m == 0 || m > input_dim()) throw ValidationError("restricted singular value: m out of range");
  if (m > output_dim()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_.leftCols(static_cast<Eigen::Index>(m)));
  const auto& s = svd.singularValues();
  return s(s.size() - 1);
}

SpectralModel make_diagonal(std::vector<double> eigenvalues, GeneratorKind kind) {
  return SpectralModel(std::move(eigenvalues), kind);
}

double heat_eigenfunction(std::size_t k, double x) {
  return std::numbers::sqrt2 * std::sin(static_cast<double>(k) * std::numbers::pi * x);
}

std::pair<SpectralModel, ObservationOperator> make_heat_1d(std::size_t n, double a, double b,
                                                           int quad_order) {
  if (n == 0) throw ValidationError("make_heat_1d: mode count must be positive");
  if (!(a >= 0.0 && a < b && b <= 1.0)) {
    throw ValidationError("make_heat_1d: window must satisfy 0 <= a < b <= 1");
  }
  if (quad_order < 2) throw ValidationError("make_heat_1d: quad_order must be >= 2");

  std::vector<double> lambda(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k + 1) * std::numbers::pi;
    lambda[k] = kk * kk;
  }

  const auto nodes = gauss_on(a, b, quad_order);
  Eigen::MatrixXd m(quad_order, static_cast<Eigen::Index>(n));
  for (int q = 0; q < quad_order; ++q) {
    const double sw = std::sqrt(nodes[q].w);
    for (std::size_t k = 0; k < n; ++k) {
      m(q, static_cast<Eigen::Index>(k)) = sw * heat_eigenfunction(k + 1, nodes[q].t);
    }
  }
  ObservationProvenance p;
  p.kind = ObservationProvenance::Kind::window;
  p.a = a;
  p.b = b;
  p.quad_order = quad_order;
  return {SpectralModel(std::move(lambda), GeneratorKind::dissipative),
          ObservationOperator(std::move(m), p)};
}

void check_dimensions(const SpectralModel& model, const ObservationOperator& B) {
  if (B.input_dim() != model.mode_count()) {
    std::ostringstream os;
    os << "observation operator has " << B.input_dim() << " columns but the model has "
       << model.mode_count() << " modes";
    throw DimensionError(os.str());
  }
}

void check_dimensions(const SpectralModel& model, std::size_t state_size) {
  if (state_size != model.mode_count()) {
    std::ostringstream os;
    os << "state has " << state_size << " coefficients but the model has " << model.mode_count()
       << " modes";
    throw DimensionError(os.str());
  }
}

void require_dissipative(const SpectralModel& model, const char* operation) {
  if (model.is_unitary()) {
    throw ValidationError(std::string(operation) +
                          ": unitary models have no decay and are not supported here");
  }
}

namespace {
void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be nonnegative");
}
}  // namespace

Eigen::VectorXd semigroup_apply(const SpectralModel& model, double t, const Eigen::VectorXd& u0) {
  check_time(t);
  check_dimensions(model, static_cast<std::size_t>(u0.size()));
  require_dissipative(model, "semigroup_apply(real state)");
  return (-model.eigenvalue_vector().array() * t).exp().matrix().cwiseProduct(u0);
}

Eigen::VectorXcd semigroup_apply(const SpectralModel& model, double t,
                                 const Eigen::VectorXcd& u0) {
  check_time(t);
  check_dimensions(model, static_cast<std::size_t>(u0.size()));
  Eigen::VectorXcd out(u0.size());
  for (Eigen::Index k = 0; k < u0.size(); ++k) {
    const double lt = model.eigenvalue_vector()(k) * t;
    const std::complex<double> factor =
        model.is_unitary() ? std::polar(1.0, -lt) : std::complex<double>(std::exp(-lt), 0.0);
    out(k) = factor * u0(k);
  }
  return out;
}

Eigen::VectorXd state_derivative(const SpectralModel& model, double t, const Eigen::VectorXd& u0,
                                 int order) {
  if (order < 0) throw ValidationError("state_derivative: order must be >= 0");
  check_time(t);
  if (order >= 1 && t == 0.0) {
    throw ValidationError("state_derivative: derivatives of order >= 1 require t > 0");
  }
  Eigen::VectorXd u = semigroup_apply(model, t, u0);
  const Eigen::ArrayXd neg = -model.eigenvalue_vector().array();
  return (neg.pow(static_cast<double>(order)) * u.array()).matrix();
}

double observation_intensity(const SpectralModel& model, const ObservationOperator& B, double t,
                             const Eigen::VectorXd& u0) {
  check_dimensions(model, B);
  return (B.matrix() * semigroup_apply(model, t, u0)).squaredNorm();
}

double observation_intensity(const SpectralModel& model, const ObservationOperator& B, double t,
                             const Eigen::VectorXcd& u0) {
  check_dimensions(model, B);
  return (B.matrix().cast<std::complex<double>>() * semigroup_apply(model, t, u0)).squaredNorm();
}

}  // namespace obsmeas
