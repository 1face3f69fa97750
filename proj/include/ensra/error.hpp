#pragma once

#include <stdexcept>
#include <string>

namespace ensra {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or out-of-range configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mismatched vector or matrix dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A decision violates one of the model's feasibility constraints.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(std::string constraint, const std::string& detail)
      : Error(constraint + " violated: " + detail), constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A combinatorial search space exceeds its configured cap.
class ScaleError : public Error {
 public:
  using Error::Error;
};

}  // namespace ensra
