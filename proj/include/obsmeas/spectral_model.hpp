#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace obsmeas {

enum class GeneratorKind { dissipative, unitary };

std::string to_string(GeneratorKind kind);

/// Diagonal generator A = -diag(lambda) (dissipative) or A = -i diag(lambda)
/// (unitary) in an orthonormal eigenbasis. The nested subspaces used by the
/// spectral hypothesis are spans of the first m coordinates, ties between
/// repeated eigenvalues broken by index.
class SpectralModel {
 public:
  SpectralModel(std::vector<double> eigenvalues, GeneratorKind kind);

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const Eigen::VectorXd& eigenvalue_vector() const { return lambda_; }
  double eigenvalue(std::size_t k) const { return eigenvalues_[k]; }
  double lambda1() const { return eigenvalues_.front(); }
  double lambda_max() const { return eigenvalues_.back(); }

  /// Decay rate of the semigroup off the first m modes; identically 1 for the
  /// diagonal dissipative realization.
  double decay_mu() const { return 1.0; }

  GeneratorKind kind() const { return kind_; }
  bool is_unitary() const { return kind_ == GeneratorKind::unitary; }
  std::size_t mode_count() const { return eigenvalues_.size(); }

 private:
  std::vector<double> eigenvalues_;
  Eigen::VectorXd lambda_;
  GeneratorKind kind_;
};

struct ObservationProvenance {
  enum class Kind { identity, window, custom };
  Kind kind = Kind::custom;
  double a = 0.0;
  double b = 0.0;
  int quad_order = 0;
};

std::string to_string(ObservationProvenance::Kind kind);

/// Bounded observation B: R^n -> R^p stored as a p x n matrix. The Gram
/// matrix B^T B and the operator norm are cached at construction.
class ObservationOperator {
 public:
  ObservationOperator(Eigen::MatrixXd matrix, ObservationProvenance provenance);

  static ObservationOperator identity(std::size_t n);
  static ObservationOperator custom(Eigen::MatrixXd matrix);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  double operator_norm() const { return norm_; }
  const ObservationProvenance& provenance() const { return provenance_; }

  std::size_t input_dim() const { return static_cast<std::size_t>(matrix_.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  /// Smallest singular value of the restriction to the first m columns.
  double restricted_min_singular_value(std::size_t m) const;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd gram_;
  double norm_;
  ObservationProvenance provenance_;
};

SpectralModel make_diagonal(std::vector<double> eigenvalues,
                            GeneratorKind kind = GeneratorKind::dissipative);

/// Dirichlet heat equation on (0,1) truncated to n modes, with internal
/// observation on the window (a,b). Rows of the observation matrix are
/// sqrt(w_q) e_k(x_q) at Gauss-Legendre nodes of the window, so |Bf|^2 is the
/// quadrature value of the L^2(a,b) norm of f.
std::pair<SpectralModel, ObservationOperator> make_heat_1d(std::size_t n, double a, double b,
                                                           int quad_order = 64);

/// Normalized Dirichlet eigenfunction sqrt(2) sin(k pi x), k >= 1.
double heat_eigenfunction(std::size_t k, double x);

Eigen::VectorXd semigroup_apply(const SpectralModel& model, double t, const Eigen::VectorXd& u0);
Eigen::VectorXcd semigroup_apply(const SpectralModel& model, double t,
                                 const Eigen::VectorXcd& u0);

/// u^{(order)}(t) in closed form, (-lambda_k)^order e^{-lambda_k t} u0_k.
Eigen::VectorXd state_derivative(const SpectralModel& model, double t, const Eigen::VectorXd& u0,
                                 int order);

/// g(t; u0) = |B S(t) u0|^2.
double observation_intensity(const SpectralModel& model, const ObservationOperator& B, double t,
                             const Eigen::VectorXd& u0);
double observation_intensity(const SpectralModel& model, const ObservationOperator& B, double t,
                             const Eigen::VectorXcd& u0);

void check_dimensions(const SpectralModel& model, const ObservationOperator& B);
void check_dimensions(const SpectralModel& model, std::size_t state_size);
void require_dissipative(const SpectralModel& model, const char* operation);

}  // namespace obsmeas
