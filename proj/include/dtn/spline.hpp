#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dtn/error.hpp"

namespace dtn {

template <class V>
struct SplineSample {
  V value{};
  V d1{};
  V d2{};
};

/// Natural cubic spline through (knots[i], values[i]). C2 on the knot range;
/// evaluation outside [knots.front(), knots.back()] is an extrapolation error.
template <class V>
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> knots, std::vector<V> values)
      : x_(std::move(knots)), y_(std::move(values)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
      fail(ErrorKind::InvalidArgument, "spline needs at least two knots and matching values");
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(x_[i] > x_[i - 1])) {
        fail(ErrorKind::InvalidArgument, "spline knots must be strictly increasing");
      }
    }
    // Second derivatives m_i with m_0 = m_{n-1} = 0; tridiagonal (Thomas) solve.
    m_.assign(n, V{});
    if (n == 2) return;
    std::vector<double> diag(n - 2), upper(n - 2);
    std::vector<V> rhs(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n - 2; ++i) {
      const double lower = x_[i + 1] - x_[i];  // h_i on the sub-diagonal
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 2] = rhs[n - 3] / diag[n - 3];
    for (std::size_t i = n - 3; i-- > 0;) {
      m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
    }
  }

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<V>& values() const { return y_; }

  SplineSample<V> operator()(double x) const {
    const double span = x_.back() - x_.front();
    const double slack = 1e-12 * std::max(1.0, std::abs(span));
    if (!(x >= x_.front() - slack && x <= x_.back() + slack)) {
      fail(ErrorKind::Extrapolation, "spline evaluated at " + std::to_string(x) +
                                         " outside knot range [" + std::to_string(x_.front()) +
                                         ", " + std::to_string(x_.back()) + "]");
    }
    x = std::clamp(x, x_.front(), x_.back());
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    SplineSample<V> s;
    s.value = a * y_[i] + b * y_[i + 1] +
              ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h / 6.0);
    s.d1 = (y_[i + 1] - y_[i]) / h +
           ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * (h / 6.0);
    s.d2 = a * m_[i] + b * m_[i + 1];
    return s;
  }

 private:
  std::vector<double> x_;
  std::vector<V> y_;
  std::vector<V> m_;
};

}  // namespace dtn
