#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace exsf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a pole (source position, origin of a wave function).
class SingularityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class LinearSolveError : public Error {
 public:
  using Error::Error;
};

/// Optimizer produced a non-finite objective. Carries the last feasible
/// iterate in the optimizer's external parametrization.
class OptimizationError : public Error {
 public:
  OptimizationError(const std::string& what, std::vector<double> last_feasible)
      : Error(what), last_feasible_(std::move(last_feasible)) {}

  const std::vector<double>& last_feasible() const noexcept { return last_feasible_; }

 private:
  std::vector<double> last_feasible_;
};

/// Malformed input file (t-design tables, serialized models).
class IngestionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input carries no signal (zero energy scene, zero reference field).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace exsf
