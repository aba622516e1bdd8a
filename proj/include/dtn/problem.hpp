#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dtn/complex.hpp"
#include "dtn/curves.hpp"
#include "dtn/expression.hpp"
#include "dtn/spline.hpp"

namespace dtn {

struct DataSample {
  Complex value{};
  Complex d1{};  // derivative with respect to the argument
};

/// A scalar datum of one variable (q0(x), f0(t) or g0(t)) with its derivative.
class DataFunction {
 public:
  using Evaluator = std::function<DataSample(double)>;

  DataFunction() = default;
  DataFunction(Evaluator eval, std::string description, bool real_valued)
      : eval_(std::move(eval)), description_(std::move(description)), real_(real_valued) {}

  /// Expression in one named variable; the derivative comes from dual numbers.
  static DataFunction from_expression(const std::string& text, const std::string& variable);
  /// Natural cubic spline through (knots, values); the derivative is the spline's.
  static DataFunction from_table(std::vector<double> knots, std::vector<Complex> values);
  static DataFunction constant(Complex c);

  DataSample operator()(double x) const { return eval_(x); }
  Complex value(double x) const { return eval_(x).value; }
  Complex derivative(double x) const { return eval_(x).d1; }

  const std::string& description() const { return description_; }
  bool real_valued() const { return real_; }
  explicit operator bool() const { return static_cast<bool>(eval_); }

 private:
  Evaluator eval_;
  std::string description_;
  bool real_ = true;
};

/// Everything that defines one initial-boundary value problem.
struct ProblemSpec {
  Equation equation = Equation::Heat;
  CurvePair pair;
  DataFunction q0;  // on [0, L]
  DataFunction f0;  // q(l1(t), t)
  DataFunction g0;  // q(l2(t), t)

  double horizon() const { return pair.horizon(); }
  double initial_width() const { return pair.initial_width(); }
  bool real_data() const { return q0.real_valued() && f0.real_valued() && g0.real_valued(); }
};

struct CompatibilityReport {
  double lower_mismatch = 0.0;  // |f0(0) - q0(0)|
  double upper_mismatch = 0.0;  // |g0(0) - q0(L)|
  bool compatible(double tol = 1e-8) const {
    return lower_mismatch <= tol && upper_mismatch <= tol;
  }
};

CompatibilityReport check_corner_compatibility(const ProblemSpec& spec);

}  // namespace dtn
