#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace dtn {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;
inline const double kSqrtPi = std::sqrt(std::numbers::pi);
inline const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

/// (1 - i) sqrt(2 pi) / 2, the value of the Fresnel integral of exp(-i lambda^2) over R.
inline const Complex kFresnel = Complex(1.0, -1.0) * (kSqrt2Pi / 2.0);

/// (1 + i) sqrt(2 pi), the prefactor produced by integrating the LS
/// off-diagonal kernel by parts.
inline const Complex kIbpPrefactor = Complex(1.0, 1.0) * kSqrt2Pi;

/// exp(i * phase) without going through std::exp(Complex).
inline Complex unit_phase(double phase) {
  return {std::cos(phase), std::sin(phase)};
}

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace dtn
