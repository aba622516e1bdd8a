#include "dtn/ls_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dtn {

namespace {

// (1 - i) sqrt(2 pi) / 4
const Complex kDiagConst = 0.5 * kFresnel;

struct UPoint {
  double s, tau, d, h, dd;  // s, u^2, X - l(s), H, l'(s) - 2 l''(s) u^2
};

UPoint at_u(const BoundaryCurve& curve, double X, double t, double u) {
  const double tau = u * u;
  const double s = std::max(0.0, t - tau);
  const CurveSample l = curve(s);
  const double d = X - l.value;
  return {s, tau, d, d - 2.0 * l.d1 * tau, l.d1 - 2.0 * l.d2 * tau};
}

PhaseSample phase_at(const UPoint& p, double u) {
  if (u <= 0.0) return {0.0, 0.0};
  return {p.d * p.d / (4.0 * p.tau), -p.d * p.h / (2.0 * p.tau * u)};
}

void check_floor(double h, double floor, double s) {
  if (!(std::abs(h) >= floor)) {
    fail(ErrorKind::Regularization,
         "H denominator " + std::to_string(h) + " below floor at s = " + std::to_string(s));
  }
}

std::vector<double> u_breaks(double t, double a, double b, const std::vector<double>& breaks) {
  std::vector<double> u{std::sqrt(t - b)};
  for (double s : breaks) {
    if (s > a && s < b) u.push_back(std::sqrt(t - s));
  }
  u.push_back(std::sqrt(t - a));
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

}  // namespace

Complex fresnel_history(const BoundaryCurve& curve, double X, double t, double a, double b,
                        const std::function<Complex(double)>& amplitude,
                        const OscillatoryOptions& opt) {
  if (!(b > a)) return 0.0;
  const double u0 = std::sqrt(std::max(0.0, t - b));
  const double u1 = std::sqrt(std::max(0.0, t - a));
  auto phase = [&](double u) { return phase_at(at_u(curve, X, t, u), u); };
  auto amp = [&](double u) { return 2.0 * amplitude(std::max(0.0, t - u * u)); };
  return integrate_oscillatory(amp, phase, u0, u1, u0 == 0.0, opt).value;
}

Complex regularized_offdiag(const BoundaryCurve& curve, double X, double t,
                            const SampledFunction& h, const std::vector<double>& breaks,
                            double a_start, double h_floor, const OscillatoryOptions& opt) {
  Complex total = 0.0;
  if (a_start > 0.0) {
    auto direct = [&](double s) {
      const double tau = t - s;
      const double d = X - curve(s).value;
      return kDiagConst * (d / tau) * unit_phase(d * d / (4.0 * tau)) / std::sqrt(tau) *
             h(s).value;
    };
    std::vector<double> b{0.0};
    for (double s : breaks) {
      if (s > 0.0 && s < a_start) b.push_back(s);
    }
    b.push_back(a_start);
    std::sort(b.begin(), b.end());
    total += integrate_breaks(direct, b, opt.quad).value;
  }

  // boundary term at s = a_start
  {
    const double tau = t - a_start;
    const CurveSample l = curve(a_start);
    const double d = X - l.value;
    const double hh = d - 2.0 * l.d1 * tau;
    check_floor(hh, h_floor, a_start);
    if (tau > 0.0) {
      total += kIbpPrefactor * unit_phase(d * d / (4.0 * tau)) * std::sqrt(tau) *
               h(a_start).value / hh;
    }
  }

  auto phase = [&](double u) { return phase_at(at_u(curve, X, t, u), u); };
  auto amp = [&](double u) {
    const UPoint p = at_u(curve, X, t, u);
    check_floor(p.h, h_floor, p.s);
    const DataSample v = h(p.s);
    const double inv = 1.0 / p.h;
    return Complex(-(inv + 2.0 * p.dd * p.tau * inv * inv)) * v.value +
           Complex(2.0 * p.tau * inv) * v.d1;
  };
  const auto u = u_breaks(t, a_start, t, breaks);
  Complex body = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    body += integrate_oscillatory(amp, phase, u[k], u[k + 1], u[k] == 0.0, opt).value;
  }
  return total + kIbpPrefactor * body;
}

LsKernelSystem::LsKernelSystem(ProblemSpec spec, LsOptions options)
    : spec_(std::move(spec)), options_(std::move(options)) {
  if (spec_.equation != Equation::LS) {
    fail(ErrorKind::InvalidArgument, "LS kernel system built from a non-LS problem");
  }
  if (!spec_.q0 || !spec_.f0 || !spec_.g0) {
    fail(ErrorKind::InvalidArgument, "LS problem is missing q0, f0 or g0");
  }
  report_ = validate_admissibility(spec_.pair, Equation::LS);
  if (options_.require_admissible && !report_.admissible()) {
    std::ostringstream os;
    os << "curve pair is not LS-admissible";
    for (const auto& v : report_.violations) os << "; " << v.description;
    fail(ErrorKind::Admissibility, os.str());
  }
}

OscillatoryOptions LsKernelSystem::oscillatory() const {
  OscillatoryOptions o;
  o.quad = options_.kernel.quadrature();
  o.asymptotic_threshold = options_.asymptotic_threshold;
  return o;
}

void LsKernelSystem::check_pair(int j, int m) const {
  check_index(j);
  check_index(m);
  if (j == m) fail(ErrorKind::InvalidArgument, "off-diagonal kernel requires j != m");
}

Complex LsKernelSystem::diagonal_smooth_factor(int j, double t, double s) const {
  check_index(j);
  if (s > t) fail(ErrorKind::Ordering, "smooth factor requires s <= t");
  const double tau = t - s;
  if (tau == 0.0) return kDiagConst * pair().curve(j)(t).d1;
  const double q = difference_quotient(pair().curve(j), t, s,
                                       options_.kernel.quotient_threshold * pair().horizon());
  return kDiagConst * q * unit_phase(q * q * tau / 4.0);
}

Complex LsKernelSystem::kernel_diag(int j, double t, double s) const {
  if (!(s < t)) fail(ErrorKind::Ordering, "kernel requires s < t");
  return diagonal_smooth_factor(j, t, s) / std::sqrt(t - s);
}

Complex LsKernelSystem::kernel_offdiag_eps(int j, int m, double t, double s, double eps) const {
  check_pair(j, m);
  if (!(eps > 0.0)) fail(ErrorKind::OutOfDomain, "regularization parameter must be positive");
  if (!(s < t)) fail(ErrorKind::Ordering, "kernel requires s < t");
  const double d = pair().curve(j)(t).value - pair().curve(m)(s).value;
  const Complex sigma(t - s, -eps);
  const Complex k = kDiagConst * (d / sigma) * std::exp(kI * d * d / (4.0 * sigma)) / std::sqrt(sigma);
  if (!is_finite(k)) fail(ErrorKind::Numeric, "non-finite LS kernel value");
  return k;
}

double LsKernelSystem::h_value(int j, int m, double t, double s) const {
  const CurveSample lm = pair().curve(m)(s);
  return pair().curve(j)(t).value - lm.value - 2.0 * lm.d1 * (t - s);
}

Complex LsKernelSystem::offdiag_apply(int j, int m, double t, const SampledFunction& h,
                                      const std::vector<double>& breaks) const {
  check_pair(j, m);
  if (!(t > 0.0)) return 0.0;
  return regularized_offdiag(pair().curve(m), pair().curve(j)(t).value, t, h, breaks, 0.0,
                             h_floor_abs(), oscillatory());
}

Complex LsKernelSystem::offdiag_boundary_weight(int j, int m, double t) const {
  check_pair(j, m);
  const CurveSample l = pair().curve(m)(0.0);
  const double d = pair().curve(j)(t).value - l.value;
  const double hh = d - 2.0 * l.d1 * t;
  check_floor(hh, h_floor_abs(), 0.0);
  return kIbpPrefactor * unit_phase(d * d / (4.0 * t)) * std::sqrt(t) / hh;
}

PanelWeights LsKernelSystem::offdiag_panel(int j, int m, double t, double s_a, double s_b) const {
  check_pair(j, m);
  if (!(s_a < s_b) || s_b > t) fail(ErrorKind::Ordering, "panel must satisfy s_a < s_b <= t");
  const BoundaryCurve& curve = pair().curve(m);
  const double X = pair().curve(j)(t).value;
  const double width = s_b - s_a;
  const double floor = h_floor_abs();
  auto phase = [&](double u) { return phase_at(at_u(curve, X, t, u), u); };
  auto amp = [&](double u) {
    const UPoint p = at_u(curve, X, t, u);
    check_floor(p.h, floor, p.s);
    const double inv = 1.0 / p.h;
    const double a = -(inv + 2.0 * p.dd * p.tau * inv * inv);
    const double phi_hi = std::clamp((p.s - s_a) / width, 0.0, 1.0);
    CVec<3> v;
    v[0] = a * (1.0 - phi_hi);
    v[1] = a * phi_hi;
    v[2] = 2.0 * p.tau * inv;
    return v;
  };
  const double u0 = std::sqrt(t - s_b);
  const double u1 = std::sqrt(t - s_a);
  const CVec<3> r = integrate_oscillatory(amp, phase, u0, u1, u0 == 0.0, oscillatory()).value;
  return {kIbpPrefactor * (r[0] - r[2] / width), kIbpPrefactor * (r[1] + r[2] / width)};
}

namespace {

// int over x in [x0, x1], all on one side of c, of e^{i (x-c)^2/(4t)} f(x)
Complex fresnel_piece(const std::function<Complex(double)>& f, double c, double t, double x0,
                      double x1, const OscillatoryOptions& opt) {
  if (!(x1 > x0)) return 0.0;
  const double side = (x0 + x1) / 2.0 >= c ? 1.0 : -1.0;
  const double v0 = std::abs(side > 0 ? x0 - c : x1 - c);
  const double v1 = std::abs(side > 0 ? x1 - c : x0 - c);
  auto phase = [&](double v) { return PhaseSample{v * v / (4.0 * t), v / (2.0 * t)}; };
  auto amp = [&](double v) { return f(c + side * v); };
  return integrate_oscillatory(amp, phase, v0, v1, false, opt).value;
}

}  // namespace

Complex fresnel_initial(const std::function<Complex(double)>& f, double c, double t, double x0,
                        double x1, const OscillatoryOptions& opt) {
  const double mid = std::clamp(c, x0, x1);
  return fresnel_piece(f, c, t, x0, mid, opt) + fresnel_piece(f, c, t, mid, x1, opt);
}

Complex LsKernelSystem::forcing(int j, double t) const {
  check_index(j);
  if (!(t > 0.0)) fail(ErrorKind::OutOfDomain, "forcing requires t > 0");
  const OscillatoryOptions opt = oscillatory();
  const double c = pair().curve(j)(t).value;
  const double L = spec_.initial_width();
  Complex initial = 0.0;
  if (L > 0.0) {
    auto dq0 = [&](double x) { return spec_.q0.derivative(x); };
    initial = fresnel_initial(dq0, c, t, 0.0, L, opt) / std::sqrt(t);
  }
  auto df0 = [&](double s) { return spec_.f0.derivative(s); };
  auto dg0 = [&](double s) { return spec_.g0.derivative(s); };
  const Complex history = fresnel_history(pair().lower(), c, t, 0.0, t, df0, opt) -
                          fresnel_history(pair().upper(), c, t, 0.0, t, dg0, opt);
  return kFresnel * (initial - history);
}

}  // namespace dtn
