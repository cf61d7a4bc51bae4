#pragma once

#include <stdexcept>
#include <string>

namespace smoothtest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed coefficient tree: gaps, wrong level sizes, non-finite values,
/// mismatched shapes.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Level index outside the admissible window.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Parameter combination that cannot be realised, e.g. cutoff level below J0.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Observation does not cover every level the test needs.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Requested enumeration is too large to evaluate exhaustively.
class CostError : public Error {
 public:
  using Error::Error;
};

/// No member of the separated alternative exists for the requested distance.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, double cap)
      : Error(what), cap_(cap) {}

  /// Largest separation any single-level witness can achieve.
  double cap() const noexcept { return cap_; }

 private:
  double cap_;
};

/// Regression design is not the required equispaced grid.
class DesignError : public Error {
 public:
  using Error::Error;
};

/// Requested wavelet depth exceeds what the sample size resolves.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Bisection for a detection boundary failed; the message carries the trace.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace smoothtest
