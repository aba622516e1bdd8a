#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dtn/heat_system.hpp"
#include "dtn/ls_system.hpp"
#include "dtn/volterra.hpp"

namespace dtn {

/// Neumann traces as functions of t on [0, t_max]; `breaks` lists kinks.
struct TraceSource {
  std::function<Complex(double)> f1;
  std::function<Complex(double)> g1;
  std::vector<double> breaks;
  double t_max = 0.0;

  /// Piecewise-linear interpolant of a computed trace (shares ownership).
  static TraceSource from_trace(const BoundaryTrace& trace);
};

struct SolutionPoint {
  double x = 0.0;
  double t = 0.0;
};

struct SolutionField {
  std::vector<SolutionPoint> points;
  std::vector<Complex> values;
  std::vector<double> error_estimates;
  std::string method;  // closed-form-heat | regularized-ls
};

struct ReconstructOptions {
  /// Points closer than this fraction of the width to a boundary are
  /// extrapolated from farther interior points (LS only).
  double boundary_band = 1e-3;
  unsigned threads = 0;
};

double heat_solution_at(const HeatKernelSystem& sys, const TraceSource& trace, double x, double t);
double heat_solution_at(const HeatKernelSystem& sys, const BoundaryTrace& trace, double x, double t);

Complex ls_solution_at(const LsKernelSystem& sys, const TraceSource& trace, double x, double t,
                       const ReconstructOptions& options = {});
Complex ls_solution_at(const LsKernelSystem& sys, const BoundaryTrace& trace, double x, double t,
                       const ReconstructOptions& options = {});

/// Limit of the interior value at the lower (which = 1) or upper (2) boundary,
/// extrapolated from points 2, 3 and 4 bands inside.
double heat_boundary_limit(const HeatKernelSystem& sys, const TraceSource& trace, int which, double t,
                           const ReconstructOptions& options = {});
Complex ls_boundary_limit(const LsKernelSystem& sys, const TraceSource& trace, int which, double t,
                          const ReconstructOptions& options = {});

SolutionField reconstruct_field(const HeatKernelSystem& sys, const TraceSource& trace,
                                const std::vector<SolutionPoint>& points,
                                const ReconstructOptions& options = {});
SolutionField reconstruct_field(const LsKernelSystem& sys, const TraceSource& trace,
                                const std::vector<SolutionPoint>& points,
                                const ReconstructOptions& options = {});

}  // namespace dtn
