#include "dtn/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace dtn {

TraceSource TraceSource::from_trace(const BoundaryTrace& trace) {
  auto shared = std::make_shared<BoundaryTrace>(trace);
  TraceSource src;
  src.f1 = [shared](double t) { return shared->f1_at(t); };
  src.g1 = [shared](double t) { return shared->g1_at(t); };
  src.breaks = trace.grid.nodes;
  src.t_max = trace.grid.end();
  return src;
}

namespace {

void check_point(const CurvePair& pair, const TraceSource& trace, double x, double t) {
  if (!(t > 0.0) || t > pair.horizon()) fail(ErrorKind::OutOfDomain, "reconstruction needs 0 < t <= T");
  if (t > trace.t_max * (1.0 + 1e-12)) {
    fail(ErrorKind::OutOfDomain, "trace does not cover t = " + std::to_string(t));
  }
  const double a = pair.lower()(t).value, b = pair.upper()(t).value;
  if (!(x > a && x < b)) {
    fail(ErrorKind::OutOfDomain, "point (" + std::to_string(x) + ", " + std::to_string(t) +
                                     ") is not inside the domain");
  }
}

// consecutive time segments of [0, t] split at the trace kinks
std::vector<double> segments(const TraceSource& trace, double t) {
  std::vector<double> b{0.0};
  for (double s : trace.breaks) {
    if (s > 0.0 && s < t) b.push_back(s);
  }
  b.push_back(t);
  return b;
}

struct HeatValue {
  double value;
  double error;
};

HeatValue heat_value(const HeatKernelSystem& sys, const TraceSource& trace, double x, double t) {
  const ProblemSpec& spec = sys.spec();
  const QuadratureOptions opt = sys.controls().quadrature();
  const double L = spec.initial_width();
  const double rt = std::sqrt(t);
  double value = 0.0, error = 0.0;
  if (L > 0.0) {
    const double a = std::max(0.0, x - 40.0 * rt), b = std::min(L, x + 40.0 * rt);
    if (a < b) {
      auto f = [&](double xi) {
        const double y = x - xi;
        return std::exp(-y * y / (4.0 * t)) * spec.q0.value(xi).real();
      };
      std::vector<double> br{a};
      if (x > a && x < b) br.push_back(x);
      br.push_back(b);
      const auto r = integrate_breaks(f, br, opt);
      const double scale = 1.0 / (2.0 * kSqrtPi * rt);
      value += r.value * scale;
      error += r.error * scale;
    }
  }
  const auto seg = segments(trace, t);
  for (int m = 1; m <= 2; ++m) {
    const BoundaryCurve& curve = spec.pair.curve(m);
    const DataFunction& h0 = m == 1 ? spec.f0 : spec.g0;
    const auto& h1 = m == 1 ? trace.f1 : trace.g1;
    // G ds = e^{-D^2/(4u^2)}/sqrt(pi) du with s = t - u^2
    auto f = [&](double u) {
      const double tau = u * u;
      const double s = std::max(0.0, t - tau);
      const CurveSample l = curve(s);
      const double d = x - l.value;
      const double e = -d * d / (4.0 * tau);
      if (!(e > kExpUnderflow)) return 0.0;
      const double g = std::exp(e) / kSqrtPi;
      const double v0 = h0.value(s).real();
      return g * (l.d1 * v0 + h1(s).real() - d / (2.0 * tau) * v0);
    };
    const double sign = m == 1 ? -1.0 : 1.0;
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
      const auto r = integrate(f, std::sqrt(t - seg[k + 1]), std::sqrt(t - seg[k]), opt);
      value += sign * r.value;
      error += r.error;
    }
  }
  return {value, error};
}

// largest sample s where the interior denominator x - l(s) - 2 l'(s)(t - s)
// is small or has the wrong sign; integration by parts starts past it
double ibp_start(const BoundaryCurve& curve, double x, double t) {
  const double ht = x - curve(t).value;
  constexpr int kSamples = 256;
  double start = 0.0;
  for (int j = kSamples - 1; j >= 0; --j) {
    const double s = t * j / kSamples;
    const CurveSample l = curve(s);
    const double h = x - l.value - 2.0 * l.d1 * (t - s);
    if (h * ht <= 0.0 || std::abs(h) < 0.1 * std::abs(ht)) {
      start = t * (j + 1) / kSamples;
      break;
    }
  }
  return start;
}

Complex ls_value(const LsKernelSystem& sys, const TraceSource& trace, double x, double t) {
  const ProblemSpec& spec = sys.spec();
  const OscillatoryOptions opt = sys.oscillatory();
  const double L = spec.initial_width();
  const double scale = 1.0 / (2.0 * kPi);
  Complex value = 0.0;
  if (L > 0.0) {
    auto q0 = [&](double xi) { return spec.q0.value(xi); };
    value += scale * kFresnel * fresnel_initial(q0, x, t, 0.0, L, opt) / std::sqrt(t);
  }
  const auto seg = segments(trace, t);
  for (int m = 1; m <= 2; ++m) {
    const BoundaryCurve& curve = spec.pair.curve(m);
    const DataFunction& h0 = m == 1 ? spec.f0 : spec.g0;
    const auto& h1 = m == 1 ? trace.f1 : trace.g1;
    const double sign = m == 1 ? -1.0 : 1.0;
    auto amp = [&](double s) { return curve(s).d1 * h0.value(s) + kI * h1(s); };
    Complex hist = 0.0;
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
      hist += fresnel_history(curve, x, t, seg[k], seg[k + 1], amp, opt);
    }
    value += sign * scale * kFresnel * hist;
    SampledFunction h = [&](double s) { return h0(s); };
    const Complex r = regularized_offdiag(curve, x, t, h, {}, ibp_start(curve, x, t),
                                          sys.h_floor_abs(), opt);
    value -= sign * scale * r;
  }
  return value;
}

}  // namespace

double heat_solution_at(const HeatKernelSystem& sys, const TraceSource& trace, double x, double t) {
  check_point(sys.pair(), trace, x, t);
  return heat_value(sys, trace, x, t).value;
}

double heat_solution_at(const HeatKernelSystem& sys, const BoundaryTrace& trace, double x, double t) {
  return heat_solution_at(sys, TraceSource::from_trace(trace), x, t);
}

Complex ls_solution_at(const LsKernelSystem& sys, const TraceSource& trace, double x, double t,
                       const ReconstructOptions& options) {
  check_point(sys.pair(), trace, x, t);
  const double a = sys.pair().lower()(t).value, b = sys.pair().upper()(t).value;
  const double band = options.boundary_band * (b - a);
  const double da = x - a, db = b - x;
  if (std::min(da, db) >= band) return ls_value(sys, trace, x, t);
  // quadratic extrapolation from points 2, 3, 4 bands inside
  const double edge = da < db ? a : b;
  const double dir = da < db ? 1.0 : -1.0;
  const double xs[3] = {edge + dir * 2.0 * band, edge + dir * 3.0 * band, edge + dir * 4.0 * band};
  Complex result = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
    }
    result += w * ls_value(sys, trace, xs[i], t);
  }
  return result;
}

Complex ls_solution_at(const LsKernelSystem& sys, const BoundaryTrace& trace, double x, double t,
                       const ReconstructOptions& options) {
  return ls_solution_at(sys, TraceSource::from_trace(trace), x, t, options);
}

namespace {

// Quadratic extrapolation to the edge from 2, 3, 4 bands inside.
template <class F>
auto edge_limit(const F& value, const CurvePair& pair, int which, double t, double band_fraction) {
  const double a = pair.lower()(t).value, b = pair.upper()(t).value;
  const double band = band_fraction * (b - a);
  const double edge = which == 1 ? a : b;
  const double dir = which == 1 ? 1.0 : -1.0;
  return 6.0 * value(edge + dir * 2.0 * band) - 8.0 * value(edge + dir * 3.0 * band) +
         3.0 * value(edge + dir * 4.0 * band);
}

}  // namespace

double heat_boundary_limit(const HeatKernelSystem& sys, const TraceSource& trace, int which, double t,
                           const ReconstructOptions& options) {
  check_index(which);
  check_point(sys.pair(), trace, 0.5 * (sys.pair().lower()(t).value + sys.pair().upper()(t).value), t);
  return edge_limit([&](double x) { return heat_value(sys, trace, x, t).value; }, sys.pair(), which, t,
                    options.boundary_band);
}

Complex ls_boundary_limit(const LsKernelSystem& sys, const TraceSource& trace, int which, double t,
                          const ReconstructOptions& options) {
  check_index(which);
  check_point(sys.pair(), trace, 0.5 * (sys.pair().lower()(t).value + sys.pair().upper()(t).value), t);
  return edge_limit([&](double x) { return ls_value(sys, trace, x, t); }, sys.pair(), which, t,
                    options.boundary_band);
}

SolutionField reconstruct_field(const HeatKernelSystem& sys, const TraceSource& trace,
                                const std::vector<SolutionPoint>& points,
                                const ReconstructOptions& options) {
  SolutionField field;
  field.points = points;
  field.method = "closed-form-heat";
  field.values.resize(points.size());
  field.error_estimates.resize(points.size());
  parallel_for(0, points.size(), options.threads, [&](std::size_t k) {
    check_point(sys.pair(), trace, points[k].x, points[k].t);
    const HeatValue v = heat_value(sys, trace, points[k].x, points[k].t);
    field.values[k] = v.value;
    field.error_estimates[k] = v.error;
  });
  return field;
}

SolutionField reconstruct_field(const LsKernelSystem& sys, const TraceSource& trace,
                                const std::vector<SolutionPoint>& points,
                                const ReconstructOptions& options) {
  SolutionField field;
  field.points = points;
  field.method = "regularized-ls";
  field.values.resize(points.size());
  field.error_estimates.assign(points.size(), 10.0 * sys.options().kernel.abs_tol);
  parallel_for(0, points.size(), options.threads, [&](std::size_t k) {
    field.values[k] = ls_solution_at(sys, trace, points[k].x, points[k].t, options);
  });
  return field;
}

}  // namespace dtn
