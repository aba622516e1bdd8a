#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dtn/heat_system.hpp"
#include "dtn/ls_system.hpp"

namespace dtn {

/// Nodes 0 = t_0 < t_1 < ... < t_N = T_solve.
struct TimeGrid {
  std::vector<double> nodes;
  double gamma = 1.0;

  /// t_k = t_solve (k/N)^gamma; requires N >= 8 and gamma >= 1.
  static TimeGrid graded(double t_solve, std::size_t n, double gamma);
  /// Checks strict monotonicity and t_0 = 0.
  static TimeGrid from_nodes(std::vector<double> nodes);

  std::size_t intervals() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  double end() const { return nodes.back(); }
};

/// T (1 - 1/N).
double default_solve_horizon(double horizon, std::size_t n);

/// Neumann traces sampled on a grid; piecewise linear in between.
struct BoundaryTrace {
  TimeGrid grid;
  std::vector<Complex> f1, g1;
  std::vector<Complex> df1, dg1;  // one-sided slopes of the interpolant
  std::string scheme;
  int order = 0;
  std::size_t halvings = 0;
  std::size_t iterations = 0;  // fixed-point sweeps, 0 for direct solves

  Complex f1_at(double t) const;
  Complex g1_at(double t) const;
  /// Value and interpolant slope; index 1 is f1, 2 is g1.
  DataSample sample(int which, double t) const;
  void compute_slopes();
};

/// Product-integration weights w_{k,i}, i = 0..k, with
/// int_0^{t_k} phi(s)/sqrt(t_k - s) ds = sum_i w_{k,i} phi(t_i) for phi
/// piecewise linear on the nodes.
std::vector<double> quad_weights_weak_singular(const std::vector<double>& nodes, std::size_t k);
std::vector<double> quad_weights_weak_singular(const TimeGrid& grid, std::size_t k);

/// One row k of the discrete system
///   pi x1_k = n1 + sum_i a11_i x1_i + a12_i x2_i,
///   pi x2_k = n2 + sum_i a21_i x1_i + a22_i x2_i,   i = 0..k.
struct SystemRow {
  Complex n1{}, n2{};
  std::vector<Complex> a11, a12, a21, a22;
};

/// All rows of the discrete system on fixed nodes; row 0 is replaced by the
/// initial values.
struct DiscreteSystem {
  std::vector<double> nodes;
  Complex x1_0{}, x2_0{};
  std::vector<SystemRow> rows;  // rows[0] unused
};

using RowAssembler = std::function<SystemRow(const std::vector<double>& nodes, std::size_t k)>;

struct SolveOptions {
  /// A 2x2 step block beyond this condition number triggers one halving.
  double condition_limit = 1e12;
  bool allow_halving = true;
  /// Worker threads for row assembly; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Assembles rows 1..N (in parallel) for fixed nodes.
DiscreteSystem assemble_system(const std::vector<double>& nodes, Complex x1_0, Complex x2_0,
                               const RowAssembler& assembler, unsigned threads = 0);

/// Forward marching with direct 2x2 solves; a near-singular block inserts
/// the midpoint of the offending step once before failing.
BoundaryTrace march_system(std::vector<double> nodes, Complex x1_0, Complex x2_0,
                           const RowAssembler& assembler, const SolveOptions& options = {},
                           DiscreteSystem* system = nullptr);

/// Condition number of a 2x2 complex matrix in the spectral norm.
double condition_2x2(Complex a, Complex b, Complex c, Complex d);

RowAssembler heat_row_assembler(const HeatKernelSystem& sys);
RowAssembler ls_row_assembler(const LsKernelSystem& sys);

/// t -> 0 limits of the traces: q0' at the corners, or N_j(t)/pi at a tiny t
/// when L = 0.
std::pair<Complex, Complex> heat_initial_values(const HeatKernelSystem& sys);
std::pair<Complex, Complex> ls_initial_values(const LsKernelSystem& sys);

BoundaryTrace solve_heat_system(const HeatKernelSystem& sys, const TimeGrid& grid,
                                const SolveOptions& options = {});
BoundaryTrace solve_ls_system(const LsKernelSystem& sys, const TimeGrid& grid,
                              const SolveOptions& options = {});

struct FixedPointOptions {
  std::size_t max_iters = 2000;
  double tol = 1e-13;
  unsigned threads = 0;
};

/// Picard sweeps x <- (n + A x)/pi over all rows at once.
BoundaryTrace iterate_fixed_point(const DiscreteSystem& system, const FixedPointOptions& options = {});
BoundaryTrace iterate_fixed_point(const HeatKernelSystem& sys, const TimeGrid& grid,
                                  const FixedPointOptions& options = {});
BoundaryTrace iterate_fixed_point(const LsKernelSystem& sys, const TimeGrid& grid,
                                  const FixedPointOptions& options = {});

/// Runs fn(k) for k in [begin, end) on `threads` workers with a static
/// interleaved split, so results do not depend on scheduling.
void parallel_for(std::size_t begin, std::size_t end, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace dtn
