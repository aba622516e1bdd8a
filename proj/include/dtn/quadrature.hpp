#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <vector>

#include "dtn/complex.hpp"
#include "dtn/error.hpp"

namespace dtn {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_subdivisions = 2000;
  /// Throw AccuracyError when the tolerance is not met (otherwise the result
  /// is returned with converged = false).
  bool throw_on_failure = true;
};

template <class V>
struct QuadratureResult {
  V value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Small fixed-size vector of complex values; lets one quadrature pass
/// integrate several integrands that share an expensive factor.
template <std::size_t N>
struct CVec {
  std::array<Complex, N> c{};

  Complex& operator[](std::size_t i) { return c[i]; }
  const Complex& operator[](std::size_t i) const { return c[i]; }
  CVec& operator+=(const CVec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] += o.c[i];
    return *this;
  }
  CVec& operator-=(const CVec& o) {
    for (std::size_t i = 0; i < N; ++i) c[i] -= o.c[i];
    return *this;
  }
  CVec& operator*=(Complex s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  friend CVec operator+(CVec a, const CVec& b) { return a += b; }
  friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
  friend CVec operator*(Complex s, CVec a) { return a *= s; }
  friend CVec operator*(CVec a, Complex s) { return a *= s; }
  friend CVec operator*(double s, CVec a) { return a *= Complex(s); }
  friend CVec operator/(CVec a, Complex s) { return a *= (1.0 / s); }
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(Complex v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const CVec<N>& v) {
  double m = 0.0;
  for (const auto& z : v.c) m = std::max(m, std::abs(z));
  return m;
}

namespace gk21 {
// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> xgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 5> wg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};
inline constexpr std::array<double, 11> wgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
}  // namespace gk21

/// One 21-point Gauss-Kronrod panel; returns the Kronrod value and the
/// |Kronrod - Gauss| difference as error estimate.
template <class F>
auto gauss_kronrod_panel(F&& f, double a, double b) {
  using V = decltype(f(a));
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const V fc = f(center);
  V kronrod = gk21::wgk[10] * fc;
  V gauss{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * gk21::xgk[j];
    const V f1 = f(center - dx);
    const V f2 = f(center + dx);
    const V sum = f1 + f2;
    kronrod += gk21::wgk[j] * sum;
    if (j % 2 == 1) gauss += gk21::wg[j / 2] * sum;
  }
  kronrod = half * kronrod;
  gauss = half * gauss;
  const double err = magnitude(kronrod - gauss);
  return std::pair<V, double>{kronrod, err};
}

/// Globally adaptive Gauss-Kronrod integration of f over [a, b]; the
/// interval with the largest error estimate is bisected first.
template <class F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  using V = decltype(f(a));
  QuadratureResult<V> out;
  if (a == b) return out;
  struct Piece {
    double a, b;
    V value;
    double err;
    bool operator<(const Piece& o) const { return err < o.err; }
  };
  std::priority_queue<Piece> heap;
  auto [v0, e0] = gauss_kronrod_panel(f, a, b);
  out.evaluations = 21;
  heap.push({a, b, v0, e0});
  V total = v0;
  double total_err = e0;
  std::size_t pieces = 1;
  auto done = [&] {
    return total_err <= std::max(opt.abs_tol, opt.rel_tol * magnitude(total));
  };
  while (!done() && pieces < opt.max_subdivisions) {
    Piece p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {  // interval exhausted at double precision
      heap.push(p);
      break;
    }
    auto [vl, el] = gauss_kronrod_panel(f, p.a, mid);
    auto [vr, er] = gauss_kronrod_panel(f, mid, p.b);
    out.evaluations += 42;
    total = total - p.value + vl + vr;
    total_err += el + er - p.err;
    heap.push({p.a, mid, vl, el});
    heap.push({mid, p.b, vr, er});
    ++pieces;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  total = V{};
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().err;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  out.converged = done();
  if (!out.converged && opt.throw_on_failure) {
    throw AccuracyError("adaptive quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "] reached error " + std::to_string(total_err) + " after " +
                            std::to_string(pieces) + " subdivisions",
                        magnitude(total), total_err);
  }
  return out;
}

/// Integrates f over the consecutive intervals [breaks[k], breaks[k+1]] and
/// sums the results; tolerances apply per interval.
template <class F>
auto integrate_breaks(F&& f, const std::vector<double>& breaks, const QuadratureOptions& opt = {}) {
  using V = decltype(f(0.0));
  QuadratureResult<V> out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (!(breaks[k + 1] > breaks[k])) continue;
    auto r = integrate(f, breaks[k], breaks[k + 1], opt);
    out.value += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

/// Phase value and derivative for oscillatory integrands exp(i psi(u)).
struct PhaseSample {
  double psi = 0.0;
  double dpsi = 0.0;
};

struct OscillatoryOptions {
  QuadratureOptions quad{};
  /// Endpoint asymptotics are used where |psi'(u)| * u exceeds this many
  /// radians; below it the integrand is resolved by Gauss-Kronrod panels.
  double asymptotic_threshold = 400.0;
};

namespace detail {

/// Three-term endpoint expansion of the antiderivative of A(u) exp(i psi(u)):
/// exp(i psi) [r0 - r1 + r2] with r0 = A/(i psi'), r_{n+1} = r_n'/(i psi').
/// Derivatives are one-sided second-order differences towards `inward`.
template <class Amp, class Phase>
auto endpoint_expansion(const Amp& amp, const Phase& phase, double u, double inward) {
  using V = decltype(amp(u));
  const double h = 1e-3 * std::abs(inward - u);
  const double dir = inward > u ? 1.0 : -1.0;
  V r0[5];
  Complex ip[5];
  for (int j = 0; j < 5; ++j) {
    const double w = u + dir * h * j;
    ip[j] = Complex(0.0, phase(w).dpsi);
    r0[j] = amp(w) / ip[j];
  }
  auto d = [&](const V* f, int j) { return (dir / (2.0 * h)) * (-3.0 * f[j] + 4.0 * f[j + 1] - f[j + 2]); };
  V r1[3];
  for (int j = 0; j < 3; ++j) r1[j] = d(r0, j) / ip[j];
  const V r2 = d(r1, 0) / ip[0];
  return unit_phase(phase(u).psi) * (r0[0] - r1[0] + r2);
}

}  // namespace detail

/// Integrates amp(u) * exp(i psi(u)) over [a, b] where psi has no stationary
/// point in (a, b]. Sub-ranges where the phase turns fast relative to u are
/// replaced by the endpoint expansion; the rest uses adaptive Gauss-Kronrod.
/// With `singular_at_a` (requires a == 0) psi' is taken to blow up at u = 0
/// faster than the amplitude, so the lower endpoint contributes nothing.
template <class Amp, class Phase>
auto integrate_oscillatory(const Amp& amp, const Phase& phase, double a, double b,
                           bool singular_at_a, const OscillatoryOptions& opt = {}) {
  using V = decltype(amp(b));
  QuadratureResult<V> out;
  if (!(b > a)) return out;
  auto fast = [&](double u) {
    if (u <= 0.0) return singular_at_a;
    return std::abs(phase(u).dpsi) * u >= opt.asymptotic_threshold;
  };
  auto integrand = [&](double u) { return amp(u) * unit_phase(phase(u).psi); };
  double lo_fast = a, hi_fast = a;  // asymptotic sub-range [lo_fast, hi_fast]
  if (singular_at_a) {
    // psi' u grows without bound as u -> 0; scan down geometrically for the
    // smallest slow sample so that a stationary point inside is never skipped
    double slow = -1.0, below = 0.0;
    double u = b;
    for (int step = 0; step < 300 && u > 1e-13 * b; ++step, u *= 0.9) {
      if (!fast(u)) {
        slow = u;
        below = 0.9 * u;
      }
    }
    if (slow < 0.0) {
      hi_fast = b;
    } else if (fast(below)) {
      double lo = below, hi = slow;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fast(mid)) lo = mid;
        else hi = mid;
      }
      hi_fast = lo;
    }
  } else {
    constexpr int kSamples = 16;
    bool flag[kSamples + 1];
    int changes = 0;
    for (int k = 0; k <= kSamples; ++k) {
      flag[k] = fast(a + (b - a) * k / kSamples);
      if (k > 0 && flag[k] != flag[k - 1]) ++changes;
    }
    if (changes == 0 && flag[0]) {
      lo_fast = a;
      hi_fast = b;
    } else if (changes == 1) {
      const bool fast_a = flag[0];
      double lo = a, hi = b;  // invariant: fast(lo) == fast_a
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fast(mid) == fast_a) lo = mid;
        else hi = mid;
      }
      if (fast_a) {
        lo_fast = a;
        hi_fast = lo;
      } else {
        lo_fast = hi;
        hi_fast = b;
      }
    }
  }
  V total{};
  if (hi_fast > lo_fast) {
    const bool tail_to_zero = singular_at_a && lo_fast == a;
    // The expansion's derivative stencil points into the slow side.
    const double span = hi_fast - lo_fast;
    if (!tail_to_zero || hi_fast > 0.0) {
      total += detail::endpoint_expansion(amp, phase, hi_fast, hi_fast - 0.5 * span);
    }
    if (!tail_to_zero) {
      total -= detail::endpoint_expansion(amp, phase, lo_fast, lo_fast + 0.5 * span);
    }
    out.evaluations += 11 * (tail_to_zero ? 1 : 2);
  }
  auto add_gk = [&](double x0, double x1) {
    if (!(x1 > x0)) return;
    auto r = integrate(integrand, x0, x1, opt.quad);
    total += r.value;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  };
  if (hi_fast > lo_fast) {
    add_gk(a, lo_fast);
    add_gk(hi_fast, b);
  } else {
    add_gk(a, b);
  }
  out.value = total;
  return out;
}

}  // namespace dtn
