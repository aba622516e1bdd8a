#include "dtn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <regex>

#include "dtn/dual.hpp"

namespace dtn {

ManufacturedCase::ManufacturedCase(std::string name, Equation equation, CurvePair pair,
                                   const std::string& q_text)
    : name_(std::move(name)),
      equation_(equation),
      pair_(std::move(pair)),
      text_(q_text),
      expr_(std::make_shared<const Expression>(Expression::parse(q_text, {"x", "t"}))) {}

Complex ManufacturedCase::q(double x, double t) const { return (*expr_)(x, t); }

Complex ManufacturedCase::qx(double x, double t) const {
  using D = Dual<Complex>;
  return expr_->evaluate<D>({D(Complex(x), Complex(1.0)), D(Complex(t))}).d;
}

Complex ManufacturedCase::qt(double x, double t) const {
  using D = Dual<Complex>;
  return expr_->evaluate<D>({D(Complex(x)), D(Complex(t), Complex(1.0))}).d;
}

Complex ManufacturedCase::qxx(double x, double t) const {
  using D = Dual<Complex>;
  using DD = Dual<D>;
  const DD xv(D(Complex(x), Complex(1.0)), D(Complex(1.0), Complex(0.0)));
  const DD tv(D(Complex(t)), D(Complex(0.0)));
  return expr_->evaluate<DD>({xv, tv}).d.d;
}

Complex ManufacturedCase::pde_residual(double x, double t) const {
  if (equation_ == Equation::Heat) return qt(x, t) - qxx(x, t);
  return kI * qt(x, t) + qxx(x, t);
}

DataFunction ManufacturedCase::q0() const {
  auto self = std::make_shared<ManufacturedCase>(*this);
  return DataFunction([self](double x) { return DataSample{self->q(x, 0.0), self->qx(x, 0.0)}; },
                      "q(x, 0) of " + name_, !expr_->uses_imaginary_unit());
}

DataFunction ManufacturedCase::f0() const {
  auto self = std::make_shared<ManufacturedCase>(*this);
  return DataFunction(
      [self](double t) {
        const CurveSample l = self->pair_.lower()(t);
        return DataSample{self->q(l.value, t), self->qx(l.value, t) * l.d1 + self->qt(l.value, t)};
      },
      "q(l1(t), t) of " + name_, !expr_->uses_imaginary_unit());
}

DataFunction ManufacturedCase::g0() const {
  auto self = std::make_shared<ManufacturedCase>(*this);
  return DataFunction(
      [self](double t) {
        const CurveSample l = self->pair_.upper()(t);
        return DataSample{self->q(l.value, t), self->qx(l.value, t) * l.d1 + self->qt(l.value, t)};
      },
      "q(l2(t), t) of " + name_, !expr_->uses_imaginary_unit());
}

ProblemSpec ManufacturedCase::spec() const { return {equation_, pair_, q0(), f0(), g0()}; }

TraceSource ManufacturedCase::exact_traces() const {
  auto self = std::make_shared<ManufacturedCase>(*this);
  TraceSource src;
  src.f1 = [self](double t) { return self->f1(t); };
  src.g1 = [self](double t) { return self->g1(t); };
  src.t_max = pair_.horizon();
  return src;
}

double ManufacturedCase::admission_residual(std::size_t samples, unsigned seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = pair_.horizon() * (0.01 + 0.99 * unit(rng));
    const double a = pair_.lower()(t).value, b = pair_.upper()(t).value;
    const double x = a + (b - a) * (0.01 + 0.98 * unit(rng));
    const double scale = std::max({1.0, std::abs(qt(x, t)), std::abs(qxx(x, t))});
    worst = std::max(worst, std::abs(pde_residual(x, t)) / scale);
  }
  return worst;
}

CurvePair default_pair(Equation equation) {
  if (equation == Equation::Heat) {
    return CurvePair(BoundaryCurve::linear(-1.0, 0.0), BoundaryCurve::linear(1.0, 1.0), 1.0);
  }
  return CurvePair(BoundaryCurve::linear(0.2, 0.0), BoundaryCurve::linear(0.5, 1.0), 1.0);
}

std::vector<std::string> registered_cases() {
  return {"heat-const", "heat-linear-x", "heat-quad", "heat-exp", "heat-gauss",
          "ls-const",   "ls-plane",      "ls-gauss"};
}

namespace {

struct CaseText {
  Equation equation;
  std::string text;
};

CaseText lookup(const std::string& name) {
  if (name == "heat-const") return {Equation::Heat, "1.5"};
  if (name == "heat-linear-x") return {Equation::Heat, "x"};
  if (name == "heat-quad") return {Equation::Heat, "x^2 + 2*t"};
  if (name == "heat-exp") return {Equation::Heat, "exp(x + t)"};
  if (name == "heat-gauss") {
    return {Equation::Heat, "(4*pi*(t + 1))^(-0.5) * exp(-(x - 0.3)^2 / (4*(t + 1)))"};
  }
  if (name == "ls-const") return {Equation::LS, "1.5"};
  if (name == "ls-gauss") return {Equation::LS, "(1 + 4*i*t)^(-0.5) * exp(-x^2 / (1 + 4*i*t))"};
  static const std::regex plane(R"(ls-plane(\{k=([-+0-9.eE]+)\})?)");
  std::smatch m;
  if (std::regex_match(name, m, plane)) {
    const double k = m[2].matched ? std::stod(m[2].str()) : 1.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "exp(i*((%.17g)*x - (%.17g)^2*t))", k, k);
    return {Equation::LS, buf};
  }
  fail(ErrorKind::InvalidArgument, "unknown manufactured case '" + name + "'");
}

}  // namespace

ManufacturedCase manufactured_case(const std::string& name, const CurvePair& pair) {
  const CaseText c = lookup(name);
  ManufacturedCase mc(name, c.equation, pair, c.text);
  const double r = mc.admission_residual();
  if (!(r <= 1e-10)) {
    fail(ErrorKind::Admissibility, "manufactured case '" + name + "' fails the PDE check (residual " +
                                       std::to_string(r) + ")");
  }
  return mc;
}

ManufacturedCase manufactured_case(const std::string& name) {
  return manufactured_case(name, default_pair(lookup(name).equation));
}

double FdSolution::x_at(std::size_t i, std::size_t k) const {
  const double a = pair.lower()(t[k]).value, b = pair.upper()(t[k]).value;
  return a + (b - a) * y[i];
}

Complex FdSolution::value_at(double x, std::size_t k) const {
  const double a = pair.lower()(t[k]).value, b = pair.upper()(t[k]).value;
  const double yy = (x - a) / (b - a);
  if (!(yy >= 0.0 && yy <= 1.0)) fail(ErrorKind::OutOfDomain, "point outside the FD strip");
  const std::size_t n = y.size() - 1;
  const std::size_t i = std::min<std::size_t>(n - 1, static_cast<std::size_t>(yy * n));
  const double w = yy * n - static_cast<double>(i);
  return q[k][i] + w * (q[k][i + 1] - q[k][i]);
}

FdSolution fd_solve_mapped(const ProblemSpec& spec, std::size_t nx, std::size_t nt) {
  if (nx < 16 || nt < 16) fail(ErrorKind::InvalidArgument, "FD oracle needs nx, nt >= 16");
  if (!(spec.initial_width() > 0.0)) {
    fail(ErrorKind::InvalidArgument, "FD oracle needs a positive initial width");
  }
  const CurvePair& pair = spec.pair;
  const double T = pair.horizon();
  const double dy = 1.0 / static_cast<double>(nx);
  const double dt = T / static_cast<double>(nt);
  const Complex kappa = spec.equation == Equation::Heat ? Complex(1.0) : kI;

  FdSolution out{std::vector<double>(nx + 1), std::vector<double>(nt + 1), {}, {}, {}, pair};
  for (std::size_t i = 0; i <= nx; ++i) out.y[i] = static_cast<double>(i) * dy;
  for (std::size_t k = 0; k <= nt; ++k) out.t[k] = static_cast<double>(k) * dt;

  double w_min = INFINITY;
  for (double t : out.t) w_min = std::min(w_min, pair.upper()(t).value - pair.lower()(t).value);
  if (!(w_min > 0.0)) fail(ErrorKind::InvalidArgument, "FD oracle needs a positive width");
  const double ratio = dt / (w_min * w_min * dy * dy);
  if (ratio > 4.0 * static_cast<double>(nx)) {
    const auto suggested =
        static_cast<std::size_t>(std::ceil(T * static_cast<double>(nx) / (4.0 * w_min * w_min)));
    fail(ErrorKind::InvalidArgument, "FD step ratio " + std::to_string(ratio) +
                                         " too large; use nt >= " + std::to_string(suggested));
  }

  struct Coeffs {
    std::vector<Complex> lo, di, up;
  };
  auto coeffs = [&](double t) {
    const CurveSample a = pair.lower()(t), b = pair.upper()(t);
    const double w = b.value - a.value, dw = b.d1 - a.d1;
    Coeffs c{std::vector<Complex>(nx + 1), std::vector<Complex>(nx + 1), std::vector<Complex>(nx + 1)};
    const Complex diff = kappa / (w * w * dy * dy);
    for (std::size_t i = 1; i < nx; ++i) {
      const double adv = (a.d1 + out.y[i] * dw) / w / (2.0 * dy);
      c.lo[i] = diff - adv;
      c.di[i] = -2.0 * diff;
      c.up[i] = diff + adv;
    }
    return c;
  };

  out.q.assign(nt + 1, std::vector<Complex>(nx + 1));
  const double L = spec.initial_width();
  for (std::size_t i = 0; i <= nx; ++i) out.q[0][i] = spec.q0.value(L * out.y[i]);

  std::vector<Complex> rhs(nx + 1), cp(nx + 1), dp(nx + 1);
  Coeffs now = coeffs(0.0);
  for (std::size_t k = 1; k <= nt; ++k) {
    const Coeffs next = coeffs(out.t[k]);
    const auto& u = out.q[k - 1];
    auto& v = out.q[k];
    v[0] = spec.f0.value(out.t[k]);
    v[nx] = spec.g0.value(out.t[k]);
    for (std::size_t i = 1; i < nx; ++i) {
      rhs[i] = u[i] + 0.5 * dt * (now.lo[i] * u[i - 1] + now.di[i] * u[i] + now.up[i] * u[i + 1]);
    }
    rhs[1] += 0.5 * dt * next.lo[1] * v[0];
    rhs[nx - 1] += 0.5 * dt * next.up[nx - 1] * v[nx];
    // Thomas sweep on the implicit half
    for (std::size_t i = 1; i < nx; ++i) {
      const Complex a = -0.5 * dt * next.lo[i];
      const Complex b = 1.0 - 0.5 * dt * next.di[i];
      const Complex c = -0.5 * dt * next.up[i];
      const Complex denom = i == 1 ? b : b - a * cp[i - 1];
      cp[i] = c / denom;
      dp[i] = (i == 1 ? rhs[i] : rhs[i] - a * dp[i - 1]) / denom;
    }
    v[nx - 1] = dp[nx - 1];
    for (std::size_t i = nx - 1; i-- > 1;) v[i] = dp[i] - cp[i] * v[i + 1];
    now = next;
  }

  out.f1.resize(nt + 1);
  out.g1.resize(nt + 1);
  for (std::size_t k = 0; k <= nt; ++k) {
    const auto& u = out.q[k];
    const double w = pair.upper()(out.t[k]).value - pair.lower()(out.t[k]).value;
    const double s = 12.0 * dy * w;
    out.f1[k] = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / s;
    out.g1[k] = (25.0 * u[nx] - 48.0 * u[nx - 1] + 36.0 * u[nx - 2] - 16.0 * u[nx - 3] +
                 3.0 * u[nx - 4]) /
                s;
  }
  return out;
}

QHatSource q_hat_from_function(const CurvePair& pair, double t, std::function<Complex(double)> q) {
  const double a = pair.lower()(t).value, b = pair.upper()(t).value;
  return [a, b, q = std::move(q)](Complex lambda) {
    auto f = [&](double x) { return std::exp(-kI * lambda * x) * q(x); };
    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    return integrate(f, a, b, opt).value;
  };
}

QHatSource q_hat_from_samples(std::vector<double> x, std::vector<Complex> values) {
  if (x.size() != values.size() || x.size() < 2) {
    fail(ErrorKind::InvalidArgument, "q-hat samples need matching sizes >= 2");
  }
  return [x = std::move(x), v = std::move(values)](Complex lambda) {
    const Complex mu = -kI * lambda;
    Complex total = 0.0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
      const double h = x[k + 1] - x[k];
      const Complex z = mu * h;
      Complex e0, e1;  // int_0^h e^{mu s} ds, int_0^h s e^{mu s} ds
      if (std::abs(z) < 1e-3) {
        e0 = h * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
        e1 = h * h * (0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0);
      } else {
        const Complex ez = std::exp(z);
        e0 = (ez - 1.0) / mu;
        e1 = (h * ez - e0) / mu;
      }
      total += std::exp(mu * x[k]) * (v[k] * e0 + (v[k + 1] - v[k]) / h * e1);
    }
    return total;
  };
}

Complex global_relation_residual(const ProblemSpec& spec, const TraceSource& trace,
                                 const QHatSource& q_hat, Complex lambda, double t,
                                 const QuadratureOptions& options) {
  if (!(t > 0.0) || t > trace.t_max * (1.0 + 1e-12)) {
    fail(ErrorKind::OutOfDomain, "residual time outside the trace range");
  }
  const bool heat = spec.equation == Equation::Heat;
  const Complex omega = heat ? lambda * lambda : kI * lambda * lambda;  // e^{omega s}
  if (omega.real() * t > 700.0) {
    fail(ErrorKind::Range, "spectral parameter too large: |e^{omega t}| overflows");
  }
  const double L = spec.initial_width();
  Complex q0_hat = 0.0;
  if (L > 0.0) {
    auto f = [&](double x) { return std::exp(-kI * lambda * x) * spec.q0.value(x); };
    q0_hat = integrate(f, 0.0, L, options).value;
  }
  std::vector<double> br{0.0};
  for (double s : trace.breaks) {
    if (s > 0.0 && s < t) br.push_back(s);
  }
  br.push_back(t);
  Complex bnd = 0.0;
  for (int m = 1; m <= 2; ++m) {
    const BoundaryCurve& curve = spec.pair.curve(m);
    const DataFunction& h0 = m == 1 ? spec.f0 : spec.g0;
    const auto& h1 = m == 1 ? trace.f1 : trace.g1;
    auto f = [&](double s) {
      const CurveSample l = curve(s);
      const Complex e = std::exp(-kI * lambda * l.value + omega * s);
      const Complex flux = heat ? (kI * lambda + l.d1) * h0.value(s) + h1(s)
                                : (l.d1 - lambda) * h0.value(s) + kI * h1(s);
      return e * flux;
    };
    const Complex v = integrate_breaks(f, br, options).value;
    bnd += m == 1 ? -v : v;
  }
  return q0_hat - std::exp(omega * t) * q_hat(lambda) + bnd;
}

std::vector<SpectralSample> global_relation_scan(const ProblemSpec& spec, const TraceSource& trace,
                                                 const QHatSource& q_hat,
                                                 const std::vector<Complex>& lambdas, double t,
                                                 const QuadratureOptions& options) {
  std::vector<SpectralSample> out;
  for (const Complex& l : lambdas) {
    out.push_back({l, t, global_relation_residual(spec, trace, q_hat, l, t, options)});
  }
  return out;
}

std::vector<double> default_lambda_set() { return {0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0}; }

}  // namespace dtn
