#pragma once

#include <stdexcept>
#include <string>

namespace h1diff {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check failed (e.g. imaginary residue after an inverse transform).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A Lagrangian map stopped being an orientation-preserving diffeomorphism.
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, double min_jacobian)
      : Error(what), min_jacobian_(min_jacobian) {}
  double min_jacobian() const noexcept { return min_jacobian_; }

 private:
  double min_jacobian_;
};

/// NaN or Inf appeared in a time integration.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

}  // namespace h1diff
