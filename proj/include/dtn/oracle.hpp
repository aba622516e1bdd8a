#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dtn/expression.hpp"
#include "dtn/problem.hpp"
#include "dtn/reconstruct.hpp"

namespace dtn {

/// Closed-form solution q(x, t) on a curve pair with its induced data and
/// exact Neumann traces. Derivatives come from nested dual numbers.
class ManufacturedCase {
 public:
  ManufacturedCase(std::string name, Equation equation, CurvePair pair, const std::string& q_text);

  const std::string& name() const { return name_; }
  Equation equation() const { return equation_; }
  const CurvePair& pair() const { return pair_; }
  const std::string& expression() const { return text_; }

  Complex q(double x, double t) const;
  Complex qx(double x, double t) const;
  Complex qt(double x, double t) const;
  Complex qxx(double x, double t) const;

  /// q_t - q_xx (heat) or i q_t + q_xx (LS).
  Complex pde_residual(double x, double t) const;

  DataFunction q0() const;
  DataFunction f0() const;
  DataFunction g0() const;
  Complex f1(double t) const { return qx(pair_.lower()(t).value, t); }
  Complex g1(double t) const { return qx(pair_.upper()(t).value, t); }

  ProblemSpec spec() const;
  TraceSource exact_traces() const;

  /// Largest relative PDE residual over random interior samples.
  double admission_residual(std::size_t samples = 64, unsigned seed = 7) const;

 private:
  std::string name_;
  Equation equation_;
  CurvePair pair_;
  std::string text_;
  std::shared_ptr<const Expression> expr_;
};

/// Registered names: heat-const, heat-linear-x, heat-quad, heat-exp,
/// heat-gauss, ls-const, ls-plane (or ls-plane{k=K}), ls-gauss.
/// Heat cases default to l1 = -t, l2 = 1 + t; LS cases to l1 = 0.2 t,
/// l2 = 0.5 t + 1; T = 1. Cases failing the PDE residual check (1e-10)
/// are refused.
ManufacturedCase manufactured_case(const std::string& name);
ManufacturedCase manufactured_case(const std::string& name, const CurvePair& pair);
std::vector<std::string> registered_cases();
CurvePair default_pair(Equation equation);

/// Crank-Nicolson solution on the mapped strip y = (x - l1)/(l2 - l1).
struct FdSolution {
  std::vector<double> y;  // nx + 1 nodes on [0, 1]
  std::vector<double> t;  // nt + 1 levels on [0, T]
  std::vector<std::vector<Complex>> q;  // q[k][i] at (y_i, t_k)
  std::vector<Complex> f1, g1;          // one-sided Neumann traces per level
  CurvePair pair;

  double x_at(std::size_t i, std::size_t k) const;
  /// Linear interpolation in y at level k.
  Complex value_at(double x, std::size_t k) const;
};

/// Requires L > 0 and nx, nt >= 16. Refuses time steps with
/// dt max(1/w^2)/dy^2 > 4 nx and suggests a sufficient nt.
FdSolution fd_solve_mapped(const ProblemSpec& spec, std::size_t nx, std::size_t nt);

using QHatSource = std::function<Complex(Complex lambda)>;

/// lambda -> int_{l1(t)}^{l2(t)} e^{-i lambda x} q(x) dx by adaptive quadrature.
QHatSource q_hat_from_function(const CurvePair& pair, double t, std::function<Complex(double)> q);
/// Same for samples on increasing x, integrating the piecewise-linear
/// interpolant exactly against e^{-i lambda x}.
QHatSource q_hat_from_samples(std::vector<double> x, std::vector<Complex> values);

struct SpectralSample {
  Complex lambda{};
  double t = 0.0;
  Complex residual{};
};

/// Residual of the global relation at (lambda, t):
///   heat: q0^ - e^{l^2 t} q^ - int e^{-i l l1 + l^2 s}((i l + l1') f0 + f1) + (same on l2),
///   LS:   q0^ - e^{i l^2 t} q^ - int e^{-i l l1 + i l^2 s}((l1' - l) f0 + i f1) + (same on l2).
Complex global_relation_residual(const ProblemSpec& spec, const TraceSource& trace,
                                 const QHatSource& q_hat, Complex lambda, double t,
                                 const QuadratureOptions& options = {});

std::vector<SpectralSample> global_relation_scan(const ProblemSpec& spec, const TraceSource& trace,
                                                 const QHatSource& q_hat,
                                                 const std::vector<Complex>& lambdas, double t,
                                                 const QuadratureOptions& options = {});

std::vector<double> default_lambda_set();

}  // namespace dtn
