#include "dtn/problem.hpp"

#include <memory>

namespace dtn {

DataFunction DataFunction::from_expression(const std::string& text, const std::string& variable) {
  auto expr = std::make_shared<Expression>(Expression::parse(text, {variable}));
  const bool real = !expr->uses_imaginary_unit();
  auto eval = [expr](double x) {
    const Dual<Complex> r = expr->evaluate<Dual<Complex>>({Dual<Complex>(Complex(x), Complex(1.0))});
    return DataSample{r.v, r.d};
  };
  return DataFunction(eval, text, real);
}

DataFunction DataFunction::from_table(std::vector<double> knots, std::vector<Complex> values) {
  bool real = true;
  for (const auto& v : values) real = real && v.imag() == 0.0;
  auto spline = std::make_shared<CubicSpline<Complex>>(std::move(knots), std::move(values));
  auto eval = [spline](double x) {
    const auto s = (*spline)(x);
    return DataSample{s.value, s.d1};
  };
  return DataFunction(eval, "table(" + std::to_string(spline->knots().size()) + " knots)", real);
}

DataFunction DataFunction::constant(Complex c) {
  return DataFunction([c](double) { return DataSample{c, Complex(0.0)}; },
                      "constant", c.imag() == 0.0);
}

CompatibilityReport check_corner_compatibility(const ProblemSpec& spec) {
  CompatibilityReport r;
  r.lower_mismatch = std::abs(spec.f0.value(0.0) - spec.q0.value(0.0));
  r.upper_mismatch = std::abs(spec.g0.value(0.0) - spec.q0.value(spec.initial_width()));
  return r;
}

}  // namespace dtn
