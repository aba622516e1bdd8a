#include "dtn/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace dtn {

TimeGrid TimeGrid::graded(double t_solve, std::size_t n, double gamma) {
  if (n < 8) fail(ErrorKind::InvalidArgument, "time grid needs N >= 8");
  if (!(gamma >= 1.0)) fail(ErrorKind::InvalidArgument, "grading exponent must be >= 1");
  if (!(t_solve > 0.0) || !std::isfinite(t_solve)) {
    fail(ErrorKind::InvalidArgument, "solve horizon must be positive");
  }
  TimeGrid g;
  g.gamma = gamma;
  g.nodes.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    g.nodes[k] = t_solve * std::pow(static_cast<double>(k) / static_cast<double>(n), gamma);
  }
  g.nodes[n] = t_solve;
  return g;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 9) fail(ErrorKind::InvalidArgument, "time grid needs N >= 8");
  if (nodes.front() != 0.0) fail(ErrorKind::InvalidArgument, "time grid must start at 0");
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1])) fail(ErrorKind::InvalidArgument, "time grid must increase");
  }
  TimeGrid g;
  g.nodes = std::move(nodes);
  return g;
}

double default_solve_horizon(double horizon, std::size_t n) {
  return horizon * (1.0 - 1.0 / static_cast<double>(n));
}

namespace {

std::size_t locate(const std::vector<double>& nodes, double t) {
  const double slack = 1e-12 * std::max(1.0, nodes.back());
  if (!(t >= -slack && t <= nodes.back() + slack)) {
    fail(ErrorKind::OutOfDomain, "trace evaluated at t = " + std::to_string(t) + " outside the grid");
  }
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  return std::clamp<std::size_t>(i, 1, nodes.size() - 1);
}

}  // namespace

DataSample BoundaryTrace::sample(int which, double t) const {
  const auto& v = which == 1 ? f1 : g1;
  const auto& nodes = grid.nodes;
  const std::size_t i = locate(nodes, t);
  const double h = nodes[i] - nodes[i - 1];
  const double w = std::clamp((t - nodes[i - 1]) / h, 0.0, 1.0);
  return {v[i - 1] + w * (v[i] - v[i - 1]), (v[i] - v[i - 1]) / h};
}

Complex BoundaryTrace::f1_at(double t) const { return sample(1, t).value; }
Complex BoundaryTrace::g1_at(double t) const { return sample(2, t).value; }

void BoundaryTrace::compute_slopes() {
  const auto& x = grid.nodes;
  const std::size_t n = x.size();
  df1.assign(n, 0.0);
  dg1.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k == 0 ? 1 : k;
    df1[k] = (f1[b] - f1[a]) / (x[b] - x[a]);
    dg1[k] = (g1[b] - g1[a]) / (x[b] - x[a]);
  }
}

std::vector<double> quad_weights_weak_singular(const std::vector<double>& nodes, std::size_t k) {
  if (k == 0 || k >= nodes.size()) fail(ErrorKind::InvalidArgument, "weight row index out of range");
  std::vector<double> w(k + 1, 0.0);
  const double t = nodes[k];
  for (std::size_t i = 1; i <= k; ++i) {
    const double p = std::sqrt(t - nodes[i - 1]);
    const double q = std::sqrt(t - nodes[i]);
    const double h = nodes[i] - nodes[i - 1];
    const double pq2 = (p + q) * (p + q);
    w[i - 1] += (2.0 / 3.0) * (p + 2.0 * q) * h / pq2;
    w[i] += (2.0 / 3.0) * (2.0 * p + q) * h / pq2;
  }
  return w;
}

std::vector<double> quad_weights_weak_singular(const TimeGrid& grid, std::size_t k) {
  return quad_weights_weak_singular(grid.nodes, k);
}

void parallel_for(std::size_t begin, std::size_t end, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (end <= begin) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, end - begin));
  if (threads <= 1) {
    for (std::size_t k = begin; k < end; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = begin + w; k < end; k += threads) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double condition_2x2(Complex a, Complex b, Complex c, Complex d) {
  const double fro = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  const double det = std::abs(a * d - b * c);
  if (!(det > 0.0)) return INFINITY;
  const double disc = std::sqrt(std::max(0.0, fro * fro - 4.0 * det * det));
  const double s1 = std::sqrt(0.5 * (fro + disc));
  const double s2 = det / s1;
  return s1 / s2;
}

DiscreteSystem assemble_system(const std::vector<double>& nodes, Complex x1_0, Complex x2_0,
                               const RowAssembler& assembler, unsigned threads) {
  DiscreteSystem sys;
  sys.nodes = nodes;
  sys.x1_0 = x1_0;
  sys.x2_0 = x2_0;
  sys.rows.resize(nodes.size());
  parallel_for(1, nodes.size(), threads, [&](std::size_t k) { sys.rows[k] = assembler(nodes, k); });
  return sys;
}

BoundaryTrace march_system(std::vector<double> nodes, Complex x1_0, Complex x2_0,
                           const RowAssembler& assembler, const SolveOptions& options,
                           DiscreteSystem* system) {
  DiscreteSystem sys = assemble_system(nodes, x1_0, x2_0, assembler, options.threads);
  std::vector<Complex> x1{x1_0}, x2{x2_0};
  std::vector<bool> halved(nodes.size(), false);
  std::size_t halvings = 0;
  for (std::size_t k = 1; k < sys.nodes.size(); ++k) {
    const SystemRow& r = sys.rows[k];
    const Complex m11 = kPi - r.a11[k], m12 = -r.a12[k];
    const Complex m21 = -r.a21[k], m22 = kPi - r.a22[k];
    const double cond = condition_2x2(m11, m12, m21, m22);
    if (!(cond <= options.condition_limit)) {
      if (!options.allow_halving || halved[k]) {
        throw StepFailure("singular step block at k = " + std::to_string(k) +
                              " (condition " + std::to_string(cond) + ")",
                          k);
      }
      // insert the midpoint and reassemble everything from k on
      const double mid = 0.5 * (sys.nodes[k - 1] + sys.nodes[k]);
      sys.nodes.insert(sys.nodes.begin() + static_cast<std::ptrdiff_t>(k), mid);
      halved.insert(halved.begin() + static_cast<std::ptrdiff_t>(k), true);
      halved[k + 1] = true;
      sys.rows.resize(sys.nodes.size());
      parallel_for(k, sys.nodes.size(), options.threads,
                   [&](std::size_t i) { sys.rows[i] = assembler(sys.nodes, i); });
      ++halvings;
      --k;
      continue;
    }
    Complex b1 = r.n1, b2 = r.n2;
    for (std::size_t i = 0; i < k; ++i) {
      b1 += r.a11[i] * x1[i] + r.a12[i] * x2[i];
      b2 += r.a21[i] * x1[i] + r.a22[i] * x2[i];
    }
    const Complex det = m11 * m22 - m12 * m21;
    const Complex v1 = (b1 * m22 - m12 * b2) / det;
    const Complex v2 = (m11 * b2 - m21 * b1) / det;
    if (!is_finite(v1) || !is_finite(v2)) {
      throw StepFailure("non-finite solution at step k = " + std::to_string(k), k);
    }
    x1.push_back(v1);
    x2.push_back(v2);
  }
  BoundaryTrace trace;
  trace.grid.nodes = sys.nodes;
  trace.f1 = std::move(x1);
  trace.g1 = std::move(x2);
  trace.halvings = halvings;
  trace.compute_slopes();
  if (system) *system = std::move(sys);
  return trace;
}

namespace {

QuadratureOptions panel_options(const KernelControls& c) {
  QuadratureOptions q = c.quadrature();
  q.abs_tol = 1e-3 * c.abs_tol;
  return q;
}

}  // namespace

RowAssembler heat_row_assembler(const HeatKernelSystem& sys) {
  return [&sys](const std::vector<double>& nodes, std::size_t k) {
    const double t = nodes[k];
    SystemRow row;
    row.n1 = sys.forcing(1, t);
    row.n2 = sys.forcing(2, t);
    const auto w = quad_weights_weak_singular(nodes, k);
    row.a11.assign(k + 1, 0.0);
    row.a12.assign(k + 1, 0.0);
    row.a21.assign(k + 1, 0.0);
    row.a22.assign(k + 1, 0.0);
    for (std::size_t i = 0; i <= k; ++i) {
      row.a11[i] = sys.diagonal_smooth_factor(1, t, nodes[i]) * w[i];
      row.a22[i] = -sys.diagonal_smooth_factor(2, t, nodes[i]) * w[i];
    }
    const QuadratureOptions opt = panel_options(sys.controls());
    for (std::size_t p = 1; p <= k; ++p) {
      const double a = nodes[p - 1], b = nodes[p];
      auto f = [&](double s) {
        const double hi = (s - a) / (b - a);
        const double k12 = sys.kernel(1, 2, t, s);
        const double k21 = sys.kernel(2, 1, t, s);
        CVec<4> v;
        v[0] = k12 * (1.0 - hi);
        v[1] = k12 * hi;
        v[2] = k21 * (1.0 - hi);
        v[3] = k21 * hi;
        return v;
      };
      const CVec<4> m = integrate(f, a, b, opt).value;
      row.a12[p - 1] -= m[0];
      row.a12[p] -= m[1];
      row.a21[p - 1] += m[2];
      row.a21[p] += m[3];
    }
    return row;
  };
}

RowAssembler ls_row_assembler(const LsKernelSystem& sys) {
  return [&sys](const std::vector<double>& nodes, std::size_t k) {
    const double t = nodes[k];
    SystemRow row;
    row.n1 = sys.forcing(1, t);
    row.n2 = sys.forcing(2, t);
    const auto w = quad_weights_weak_singular(nodes, k);
    row.a11.assign(k + 1, 0.0);
    row.a12.assign(k + 1, 0.0);
    row.a21.assign(k + 1, 0.0);
    row.a22.assign(k + 1, 0.0);
    for (std::size_t i = 0; i <= k; ++i) {
      row.a11[i] = sys.diagonal_smooth_factor(1, t, nodes[i]) * w[i];
      row.a22[i] = -sys.diagonal_smooth_factor(2, t, nodes[i]) * w[i];
    }
    row.a12[0] -= sys.offdiag_boundary_weight(1, 2, t);
    row.a21[0] += sys.offdiag_boundary_weight(2, 1, t);
    for (std::size_t p = 1; p <= k; ++p) {
      const PanelWeights r12 = sys.offdiag_panel(1, 2, t, nodes[p - 1], nodes[p]);
      const PanelWeights r21 = sys.offdiag_panel(2, 1, t, nodes[p - 1], nodes[p]);
      row.a12[p - 1] -= r12.lo;
      row.a12[p] -= r12.hi;
      row.a21[p - 1] += r21.lo;
      row.a21[p] += r21.hi;
    }
    return row;
  };
}

namespace {

template <class Sys>
std::pair<Complex, Complex> initial_values(const Sys& sys) {
  const ProblemSpec& spec = sys.spec();
  const double L = spec.initial_width();
  if (L > 0.0) return {spec.q0.derivative(0.0), spec.q0.derivative(L)};
  const double t = 1e-10 * spec.horizon();
  return {Complex(sys.forcing(1, t)) / kPi, Complex(sys.forcing(2, t)) / kPi};
}

}  // namespace

std::pair<Complex, Complex> heat_initial_values(const HeatKernelSystem& sys) {
  auto v = initial_values(sys);
  return {v.first.real(), v.second.real()};
}

std::pair<Complex, Complex> ls_initial_values(const LsKernelSystem& sys) { return initial_values(sys); }

BoundaryTrace solve_heat_system(const HeatKernelSystem& sys, const TimeGrid& grid,
                                const SolveOptions& options) {
  const auto [x1, x2] = heat_initial_values(sys);
  BoundaryTrace trace = march_system(grid.nodes, x1, x2, heat_row_assembler(sys), options);
  // real data give real traces; drop round-off imaginary parts
  for (auto& v : trace.f1) v = v.real();
  for (auto& v : trace.g1) v = v.real();
  trace.compute_slopes();
  trace.grid.gamma = grid.gamma;
  trace.scheme = "product-integration, piecewise linear, weak-singular weights";
  trace.order = 2;
  return trace;
}

BoundaryTrace solve_ls_system(const LsKernelSystem& sys, const TimeGrid& grid,
                              const SolveOptions& options) {
  const auto [x1, x2] = ls_initial_values(sys);
  BoundaryTrace trace = march_system(grid.nodes, x1, x2, ls_row_assembler(sys), options);
  trace.grid.gamma = grid.gamma;
  trace.scheme = "product-integration, piecewise linear, integrated-by-parts off-diagonal";
  trace.order = 1;
  return trace;
}

BoundaryTrace iterate_fixed_point(const DiscreteSystem& system, const FixedPointOptions& options) {
  const std::size_t n = system.nodes.size();
  std::vector<Complex> x1(n, 0.0), x2(n, 0.0);
  x1[0] = system.x1_0;
  x2[0] = system.x2_0;
  std::vector<Complex> y1 = x1, y2 = x2;
  std::size_t it = 0;
  bool converged = false;
  while (it < options.max_iters) {
    ++it;
    parallel_for(1, n, options.threads, [&](std::size_t k) {
      const SystemRow& r = system.rows[k];
      Complex b1 = r.n1, b2 = r.n2;
      for (std::size_t i = 0; i <= k; ++i) {
        b1 += r.a11[i] * x1[i] + r.a12[i] * x2[i];
        b2 += r.a21[i] * x1[i] + r.a22[i] * x2[i];
      }
      y1[k] = b1 / kPi;
      y2[k] = b2 / kPi;
    });
    double diff = 0.0, size = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      diff = std::max({diff, std::abs(y1[k] - x1[k]), std::abs(y2[k] - x2[k])});
      size = std::max({size, std::abs(y1[k]), std::abs(y2[k])});
    }
    x1.swap(y1);
    x2.swap(y2);
    if (!std::isfinite(diff)) break;
    if (diff <= options.tol * size) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    fail(ErrorKind::Divergence,
         "fixed-point iteration did not converge in " + std::to_string(options.max_iters) +
             " sweeps; try a shorter solve horizon");
  }
  BoundaryTrace trace;
  trace.grid.nodes = system.nodes;
  trace.f1 = std::move(x1);
  trace.g1 = std::move(x2);
  trace.iterations = it;
  trace.scheme = "fixed-point iteration of the discrete system";
  trace.compute_slopes();
  return trace;
}

BoundaryTrace iterate_fixed_point(const HeatKernelSystem& sys, const TimeGrid& grid,
                                  const FixedPointOptions& options) {
  const auto [x1, x2] = heat_initial_values(sys);
  const DiscreteSystem d = assemble_system(grid.nodes, x1, x2, heat_row_assembler(sys), options.threads);
  BoundaryTrace trace = iterate_fixed_point(d, options);
  trace.grid.gamma = grid.gamma;
  return trace;
}

BoundaryTrace iterate_fixed_point(const LsKernelSystem& sys, const TimeGrid& grid,
                                  const FixedPointOptions& options) {
  const auto [x1, x2] = ls_initial_values(sys);
  const DiscreteSystem d = assemble_system(grid.nodes, x1, x2, ls_row_assembler(sys), options.threads);
  BoundaryTrace trace = iterate_fixed_point(d, options);
  trace.grid.gamma = grid.gamma;
  return trace;
}

}  // namespace dtn
