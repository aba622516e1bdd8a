#include "dtn/heat_system.hpp"

#include <algorithm>
#include <cmath>

namespace dtn {

void check_index(int j) {
  if (j != 1 && j != 2) fail(ErrorKind::InvalidArgument, "boundary index must be 1 or 2");
}

HeatKernelSystem::HeatKernelSystem(ProblemSpec spec, KernelControls controls)
    : spec_(std::move(spec)), controls_(controls) {
  if (spec_.equation != Equation::Heat) {
    fail(ErrorKind::InvalidArgument, "heat kernel system built from a non-heat problem");
  }
  if (!spec_.q0 || !spec_.f0 || !spec_.g0) {
    fail(ErrorKind::InvalidArgument, "heat problem is missing q0, f0 or g0");
  }
  if (!spec_.real_data()) {
    fail(ErrorKind::InvalidArgument, "heat data must be real-valued");
  }
}

double HeatKernelSystem::quotient(int j, double t, double s) const {
  return difference_quotient(pair().curve(j), t, s, controls_.quotient_threshold * pair().horizon());
}

double HeatKernelSystem::kernel(int j, int m, double t, double s) const {
  check_index(j);
  check_index(m);
  if (!(s < t)) fail(ErrorKind::Ordering, "kernel requires s < t");
  const double tau = t - s;
  if (j == m) return diagonal_smooth_factor(j, t, s) / std::sqrt(tau);
  const double delta = pair().curve(j)(t).value - pair().curve(m)(s).value;
  const double e = -delta * delta / (4.0 * tau);
  if (e <= kExpUnderflow) return 0.0;
  const double k = 0.5 * kSqrtPi * (delta / tau) * std::exp(e) / std::sqrt(tau);
  if (!std::isfinite(k)) fail(ErrorKind::Numeric, "non-finite heat kernel value");
  return k;
}

double HeatKernelSystem::diagonal_smooth_factor(int j, double t, double s) const {
  check_index(j);
  if (s > t) fail(ErrorKind::Ordering, "smooth factor requires s <= t");
  const double tau = t - s;
  if (tau == 0.0) return 0.5 * kSqrtPi * pair().curve(j)(t).d1;
  const double q = quotient(j, t, s);
  return 0.5 * kSqrtPi * q * std::exp(-q * q * tau / 4.0);
}

double HeatKernelSystem::forcing(int j, double t) const {
  check_index(j);
  if (!(t > 0.0)) fail(ErrorKind::OutOfDomain, "forcing requires t > 0");
  const QuadratureOptions opt = controls_.quadrature();
  const double c = pair().curve(j)(t).value;
  const double L = spec_.initial_width();
  const double rt = std::sqrt(t);

  double initial = 0.0;
  if (L > 0.0) {
    const double a = std::max(0.0, c - 40.0 * rt);
    const double b = std::min(L, c + 40.0 * rt);
    if (a < b) {
      auto f = [&](double x) {
        const double y = x - c;
        return std::exp(-y * y / (4.0 * t)) * spec_.q0.derivative(x).real();
      };
      std::vector<double> breaks{a};
      if (c > a && c < b) breaks.push_back(c);
      breaks.push_back(b);
      initial = integrate_breaks(f, breaks, opt).value / rt;
    }
  }

  // s = t - u^2 turns the 1/sqrt(t - s) weight into 2 du
  const BoundaryCurve& lj = pair().curve(j);
  const double threshold = controls_.quotient_threshold * pair().horizon();
  auto boundary = [&](double u) {
    const double s = std::max(0.0, t - u * u);
    const double u2 = t - s;
    double e1, e2;
    if (j == 1) {
      const double q = u2 > 0.0 ? difference_quotient(lj, t, s, threshold) : lj(t).d1;
      e1 = -q * q * u2 / 4.0;
      const double d = c - pair().upper()(s).value;
      e2 = u2 > 0.0 ? -d * d / (4.0 * u2) : -INFINITY;
    } else {
      const double q = u2 > 0.0 ? difference_quotient(lj, t, s, threshold) : lj(t).d1;
      e2 = -q * q * u2 / 4.0;
      const double d = c - pair().lower()(s).value;
      e1 = u2 > 0.0 ? -d * d / (4.0 * u2) : -INFINITY;
    }
    double v = 0.0;
    if (e1 > kExpUnderflow) v += std::exp(e1) * spec_.f0.derivative(s).real();
    if (e2 > kExpUnderflow) v -= std::exp(e2) * spec_.g0.derivative(s).real();
    return 2.0 * v;
  };
  const double history = integrate(boundary, 0.0, rt, opt).value;
  return kSqrtPi * (initial - history);
}

}  // namespace dtn
