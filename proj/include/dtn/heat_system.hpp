#pragma once

#include "dtn/problem.hpp"
#include "dtn/quadrature.hpp"

namespace dtn {

/// Tolerances shared by the heat and LS kernel systems.
struct KernelControls {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  std::size_t max_subdivisions = 4000;
  /// (l(t) - l(s)) / (t - s) switches to l'((t+s)/2) below this fraction of T.
  double quotient_threshold = 1e-8;

  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    q.abs_tol = abs_tol;
    q.rel_tol = rel_tol;
    q.max_subdivisions = max_subdivisions;
    return q;
  }
};

/// Forcings N_j and kernels K_jm of the heat-equation Neumann system
///   pi f1 = N1 + int K11 f1 - int K12 g1,
///   pi g1 = N2 + int K21 f1 - int K22 g1.
class HeatKernelSystem {
 public:
  explicit HeatKernelSystem(ProblemSpec spec, KernelControls controls = {});

  const ProblemSpec& spec() const { return spec_; }
  const CurvePair& pair() const { return spec_.pair; }
  const KernelControls& controls() const { return controls_; }

  /// K_jm(t, s) for 0 <= s < t; exactly zero once the Gaussian underflows.
  double kernel(int j, int m, double t, double s) const;

  /// S_jj(t, s) = sqrt(t - s) K_jj(t, s), bounded and smooth up to s = t
  /// where it equals (sqrt(pi)/2) l_j'(t).
  double diagonal_smooth_factor(int j, double t, double s) const;

  /// N_j(t) for 0 < t.
  double forcing(int j, double t) const;

 private:
  double quotient(int j, double t, double s) const;

  ProblemSpec spec_;
  KernelControls controls_;
};

inline double heat_kernel_K(const HeatKernelSystem& sys, int j, int m, double t, double s) {
  return sys.kernel(j, m, t, s);
}

inline double heat_forcing_N(const HeatKernelSystem& sys, int j, double t) {
  return sys.forcing(j, t);
}

/// Underflow cut-off for exp(x) in double precision.
inline constexpr double kExpUnderflow = -745.0;

void check_index(int j);

}  // namespace dtn
