#pragma once

// Reference computations for the tests. Nothing here calls into the library's
// kernel or quadrature code.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

/// int_{-inf}^{inf} lambda^p e^{-a lambda^2 + i lambda delta} d lambda for
/// Re(a) >= 0, a != 0, p in {0, 1}. The line is moved onto the steepest
/// descent path lambda0 + mu e^{-i phi} with lambda0 = i delta / (2a) and
/// phi = arg(a)/2, then integrated by the trapezoidal rule in mu.
inline Complex gaussian_moment(Complex a, double delta, int p) {
  const Complex i(0.0, 1.0);
  const Complex lambda0 = i * delta / (2.0 * a);
  const double phi = 0.5 * std::arg(a);
  const Complex dir = std::polar(1.0, -phi);
  const double width = 1.0 / std::sqrt(std::abs(a));
  const double h = 0.2 * width;
  const int n = 200;
  const Complex shift = std::exp(-delta * delta / (4.0 * a));
  Complex sum = 0.0;
  for (int k = -n; k <= n; ++k) {
    const double mu = k * h;
    const Complex lambda = lambda0 + mu * dir;
    const Complex w = std::exp(-a * (lambda - lambda0) * (lambda - lambda0));
    sum += (p == 0 ? Complex(1.0) : lambda) * w;
  }
  return sum * h * dir * shift;
}

/// -i int lambda e^{-lambda^2 tau + i lambda delta} d lambda.
inline double heat_kernel_lambda(double delta, double tau) {
  return (Complex(0.0, -1.0) * gaussian_moment(Complex(tau, 0.0), delta, 1)).real();
}

/// int lambda e^{-eps lambda^2 - i lambda^2 tau + i lambda delta} d lambda.
inline Complex ls_kernel_lambda(double delta, double tau, double eps) {
  return gaussian_moment(Complex(eps, tau), delta, 1);
}

/// Adaptive 10-point Gauss-Legendre with panel bisection.
template <class F>
Complex adaptive_gl(const F& f, double a, double b, double tol, int depth = 0) {
  static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                              0.8650633666889845, 0.9739065285171717};
  static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                              0.1494513491505806, 0.0666713443086881};
  auto panel = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    Complex s = 0.0;
    for (int k = 0; k < 5; ++k) s += w[k] * (f(c - r * x[k]) + f(c + r * x[k]));
    return s * r;
  };
  const double m = 0.5 * (a + b);
  const Complex whole = panel(a, b);
  const Complex halves = panel(a, m) + panel(m, b);
  if (std::abs(whole - halves) <= tol || depth > 40) return halves;
  return adaptive_gl(f, a, m, 0.5 * tol, depth + 1) + adaptive_gl(f, m, b, 0.5 * tol, depth + 1);
}

/// Value at x = 0 of the polynomial through (x_k, y_k).
inline Complex neville_at_zero(std::vector<double> x, std::vector<Complex> y) {
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t k = 0; k + level < n; ++k) {
      y[k] = (x[k + level] * y[k] - x[k] * y[k + 1]) / (x[k + level] - x[k]);
    }
  }
  return y[0];
}

/// c (delta/sigma) e^{i delta^2 / (4 sigma)} / sqrt(sigma), sigma = tau - i eps.
inline Complex ls_kernel_eps(double delta, double tau, double eps) {
  const Complex i(0.0, 1.0);
  const Complex c = Complex(1.0, -1.0) * std::sqrt(2.0 * M_PI) / 4.0;
  const Complex sigma(tau, -eps);
  return c * (delta / sigma) * std::exp(i * delta * delta / (4.0 * sigma)) / std::sqrt(sigma);
}

/// Direct int_0^t K(t, s, eps) h(s) ds in u = sqrt(t - s), for each eps, then
/// extrapolated to eps = 0. `delta(s)` is l_j(t) - l_m(s).
inline Complex eps_extrapolated_offdiag(const std::function<double(double)>& delta,
                                        const std::function<Complex(double)>& h, double t,
                                        const std::vector<double>& eps_list, double tol = 1e-10) {
  std::vector<Complex> values;
  for (double eps : eps_list) {
    auto f = [&](double u) {
      const double s = t - u * u;
      return ls_kernel_eps(delta(s), u * u, eps) * h(s) * (2.0 * u);
    };
    const double ut = std::sqrt(t);
    Complex sum = 0.0;
    const int panels = 64;
    for (int k = 0; k < panels; ++k) {
      sum += adaptive_gl(f, ut * k / panels, ut * (k + 1) / panels, tol / panels);
    }
    values.push_back(sum);
  }
  return neville_at_zero(eps_list, values);
}

}  // namespace oracle
