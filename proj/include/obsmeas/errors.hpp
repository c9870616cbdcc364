#pragma once

#include <stdexcept>
#include <string>

namespace obsmeas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad eigenvalues, empty windows, out-of-range parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree (observation matrix vs. mode count, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis required by an inequality does not hold on the given data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The observation operator fails to see some direction of the state space.
class UnobservableError : public Error {
 public:
  UnobservableError(const std::string& what, std::string kernel)
      : Error(what), kernel_direction_(std::move(kernel)) {}

  const std::string& kernel_direction() const { return kernel_direction_; }

 private:
  std::string kernel_direction_;
};

/// An iterative procedure ran out of budget or could not bracket a root.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace obsmeas
