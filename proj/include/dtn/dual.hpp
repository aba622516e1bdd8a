#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <type_traits>

#include "dtn/complex.hpp"
#include "dtn/error.hpp"

namespace dtn {

/// Forward-mode dual number v + d*eps with eps^2 = 0. Nesting
/// Dual<Dual<Complex>> yields second derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value) : v(value), d() {}  // NOLINT: implicit lift of constants
  Dual(T value, T deriv) : v(value), d(deriv) {}
  Dual(double c) requires(!std::is_same_v<T, double>) : v(T(c)), d() {}  // NOLINT

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }
};

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T> Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}
template <class T> Dual<T> sin(const Dual<T>& a) {
  using std::sin;
  using std::cos;
  return {sin(a.v), cos(a.v) * a.d};
}
template <class T> Dual<T> cos(const Dual<T>& a) {
  using std::sin;
  using std::cos;
  return {cos(a.v), -sin(a.v) * a.d};
}
template <class T> Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T r = sqrt(a.v);
  return {r, a.d / (T(2.0) * r)};
}

/// erf restricted to real arguments (imaginary part must vanish).
inline Complex erf(Complex z) {
  if (z.imag() != 0.0) {
    fail(ErrorKind::InvalidArgument, "erf is only defined for real arguments");
  }
  return {std::erf(z.real()), 0.0};
}

template <class T> Dual<T> erf(const Dual<T>& a) {
  using std::exp;
  using dtn::erf;
  const T scale(2.0 / std::sqrt(std::numbers::pi));
  return {erf(a.v), scale * exp(-(a.v * a.v)) * a.d};
}

inline Complex value_of(Complex z) { return z; }
template <class T> Complex value_of(const Dual<T>& a) { return value_of(a.v); }

}  // namespace dtn
