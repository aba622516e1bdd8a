#pragma once

#include <stdexcept>
#include <string>

namespace dtn {

enum class ErrorKind {
  OutOfDomain,     // argument outside the admissible range
  Extrapolation,   // tabulated evaluation outside the knot range
  Ordering,        // s >= t where s < t is required
  Numeric,         // non-finite intermediate value
  Accuracy,        // quadrature failed to reach its tolerance
  Regularization,  // an H denominator vanished
  StepFailure,     // singular 2x2 block during time marching
  Divergence,      // fixed-point iteration did not converge
  Admissibility,   // curve pair refused for the requested equation
  Parse,           // configuration or expression syntax error
  Range,           // spectral parameter too large for stable evaluation
  Io,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Quadrature did not converge; carries the best estimate reached.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_bound)
      : Error(ErrorKind::Accuracy, what),
        estimate_(estimate),
        error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, std::size_t step)
      : Error(ErrorKind::StepFailure, what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace dtn
