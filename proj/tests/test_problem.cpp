#include <cmath>

#include "doctest.h"
#include "dtn/error.hpp"
#include "dtn/expression.hpp"
#include "dtn/problem.hpp"

using namespace dtn;

TEST_CASE("expression grammar") {
  auto e = Expression::parse("2*x^2 - 3/x + exp(x) * sin(x) - cos(pi*x) + erf(x)", {"x"});
  const double x = 0.7;
  const double want = 2 * x * x - 3 / x + std::exp(x) * std::sin(x) - std::cos(M_PI * x) + std::erf(x);
  CHECK(std::abs(e(x) - want) < 1e-14);
  CHECK_FALSE(e.uses_imaginary_unit());

  auto z = Expression::parse("exp(i*x)", {"x"});
  CHECK(z.uses_imaginary_unit());
  CHECK(std::abs(z(0.3) - std::exp(Complex(0, 0.3))) < 1e-15);

  CHECK(std::abs(Expression::parse("-2^2", {"x"})(0.0) - Complex(-4.0)) < 1e-15);
  CHECK(std::abs(Expression::parse("2^3^2", {"x"})(0.0) - Complex(512.0)) < 1e-12);
}

TEST_CASE("expression errors carry a position") {
  for (const char* bad : {"x +", "foo(x)", "(x", "y", "2 ** x", ""}) {
    try {
      Expression::parse(bad, {"x"});
      FAIL("accepted '" << bad << "'");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::Parse);
    }
  }
}

TEST_CASE("data functions carry derivatives") {
  auto f = DataFunction::from_expression("sin(2*t) + t^3", "t");
  CHECK(f.real_valued());
  CHECK(std::abs(f.derivative(0.4) - (2 * std::cos(0.8) + 3 * 0.16)) < 1e-14);

  std::vector<double> k;
  std::vector<Complex> v;
  for (int j = 0; j <= 40; ++j) {
    k.push_back(j / 40.0);
    v.emplace_back(std::exp(j / 40.0), 0.0);
  }
  auto tab = DataFunction::from_table(k, v);
  CHECK(std::abs(tab.value(0.33) - std::exp(0.33)) < 1e-6);
  CHECK(std::abs(tab.derivative(0.5) - std::exp(0.5)) < 1e-4);
}

TEST_CASE("corner compatibility") {
  CurvePair p(BoundaryCurve::linear(-1, 0), BoundaryCurve::linear(1, 1), 1.0);
  ProblemSpec ok{Equation::Heat, p, DataFunction::from_expression("x", "x"),
                 DataFunction::from_expression("-t", "t"), DataFunction::from_expression("1 + t", "t")};
  CHECK(check_corner_compatibility(ok).compatible());
  ProblemSpec off = ok;
  off.g0 = DataFunction::from_expression("2", "t");
  auto r = check_corner_compatibility(off);
  CHECK_FALSE(r.compatible());
  CHECK(r.upper_mismatch == doctest::Approx(1.0));
}
