#pragma once

#include <stdexcept>
#include <string>

namespace carlab {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (non-unit sigma, grid mismatch, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration (bad JSON, theta_min = 0, negative dt, ...).
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// Evaluation at a singular configuration (v' = v, v = v_*, theta = 0).
class SingularityError : public Error {
 public:
  using Error::Error;
};

// A quadrature or iteration failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Requested radius or scale is below what the grid can resolve.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an algorithm step does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Time stepping kept producing negative densities after repeated halving.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, std::string dump)
      : Error(what), dump_(std::move(dump)) {}
  const std::string& dump() const noexcept { return dump_; }

 private:
  std::string dump_;
};

}  // namespace carlab
