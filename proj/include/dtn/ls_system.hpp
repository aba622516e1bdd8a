#pragma once

#include <functional>
#include <vector>

#include "dtn/heat_system.hpp"

namespace dtn {

/// Value and derivative of a function h(s) fed to the regularized operator.
using SampledFunction = std::function<DataSample(double)>;

/// Coefficients of a panel [s_a, s_b]: for h linear on the panel the
/// regularized off-diagonal integral over it equals lo h(s_a) + hi h(s_b).
struct PanelWeights {
  Complex lo{};
  Complex hi{};
};

struct LsOptions {
  KernelControls kernel{};
  /// Endpoint asymptotics take over once |psi'| u exceeds this.
  double asymptotic_threshold = 400.0;
  std::vector<double> epsilon_schedule{1e-2, std::pow(10.0, -3.5), 1e-5};
  /// |H| below h_floor * length scale is a regularization failure.
  double h_floor = 1e-12;
  /// Refuse curve pairs that are not LS-admissible.
  bool require_admissible = true;
};

/// Forcings and kernels of the linear Schroedinger Neumann system
///   pi f1 = N1 + int K11 f1 - int K12 g1,
///   pi g1 = N2 + int K21 f1 - int K22 g1,
/// with the off-diagonal integrals taken as eps -> 0 limits in the
/// integrated-by-parts form.
class LsKernelSystem {
 public:
  explicit LsKernelSystem(ProblemSpec spec, LsOptions options = {});

  const ProblemSpec& spec() const { return spec_; }
  const CurvePair& pair() const { return spec_.pair; }
  const LsOptions& options() const { return options_; }
  const AdmissibilityReport& admissibility() const { return report_; }

  Complex forcing(int j, double t) const;

  /// K_jj(t, s), 0 <= s < t.
  Complex kernel_diag(int j, double t, double s) const;
  /// sqrt(t - s) K_jj(t, s); equals ((1-i) sqrt(2 pi)/4) l_j'(t) at s = t.
  Complex diagonal_smooth_factor(int j, double t, double s) const;

  /// K_jm(t, s, eps) with sqrt on the principal branch.
  Complex kernel_offdiag_eps(int j, int m, double t, double s, double eps) const;

  /// l_j(t) - l_m(s) - 2 l_m'(s)(t - s).
  double h_value(int j, int m, double t, double s) const;

  /// eps -> 0 limit of int_0^t K_jm(t, s, eps) h(s) ds. Kinks of h must be
  /// listed in `breaks` (times in (0, t)).
  Complex offdiag_apply(int j, int m, double t, const SampledFunction& h,
                        const std::vector<double>& breaks = {}) const;

  /// Boundary term of the integrated form, per unit h(0).
  Complex offdiag_boundary_weight(int j, int m, double t) const;

  /// Per-panel weights of the integrated form for hat-function h on
  /// [s_a, s_b] with s_b <= t; excludes the boundary term.
  PanelWeights offdiag_panel(int j, int m, double t, double s_a, double s_b) const;

  OscillatoryOptions oscillatory() const;
  double h_floor_abs() const { return options_.h_floor * pair().length_scale(); }

 private:
  void check_pair(int j, int m) const;

  ProblemSpec spec_;
  LsOptions options_;
  AdmissibilityReport report_;
};

inline Complex ls_forcing_N(const LsKernelSystem& sys, int j, double t) { return sys.forcing(j, t); }

inline Complex ls_kernel_diag(const LsKernelSystem& sys, int j, double t, double s) {
  return sys.kernel_diag(j, t, s);
}

inline Complex ls_kernel_offdiag_eps(const LsKernelSystem& sys, int j, int m, double t, double s,
                                     double eps) {
  return sys.kernel_offdiag_eps(j, m, t, s, eps);
}

inline Complex ls_offdiag_apply_regularized(const LsKernelSystem& sys, int j, int m, double t,
                                            const SampledFunction& h,
                                            const std::vector<double>& breaks = {}) {
  return sys.offdiag_apply(j, m, t, h, breaks);
}

/// int_a^b e^{i (X - l(s))^2 / (4 (t - s))} A(s) / sqrt(t - s) ds for b <= t,
/// via s = t - u^2. Used for both forcings and interior evaluation.
Complex fresnel_history(const BoundaryCurve& curve, double X, double t, double a, double b,
                        const std::function<Complex(double)>& amplitude,
                        const OscillatoryOptions& opt);

/// int_{x0}^{x1} e^{i (x - c)^2/(4t)} f(x) dx.
Complex fresnel_initial(const std::function<Complex(double)>& f, double c, double t, double x0,
                        double x1, const OscillatoryOptions& opt);

/// eps -> 0 limit of int_0^t c (D/tau) e^{i D^2/(4 tau)} / sqrt(tau) h(s) ds with
/// D = X - l(s), tau = t - s and c = (1-i) sqrt(2 pi)/4. Integrates by parts
/// on [a_start, t]; [0, a_start] is integrated directly. The denominator
/// X - l(s) - 2 l'(s) tau must keep |.| >= h_floor on [a_start, t].
Complex regularized_offdiag(const BoundaryCurve& curve, double X, double t,
                            const SampledFunction& h, const std::vector<double>& breaks,
                            double a_start, double h_floor, const OscillatoryOptions& opt);

}  // namespace dtn
