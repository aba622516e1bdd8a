#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dtn/error.hpp"
#include "dtn/oracle.hpp"
#include "dtn/volterra.hpp"

using namespace dtn;

namespace {

double max_error(const BoundaryTrace& tr, const ManufacturedCase& mc) {
  double e = 0.0;
  for (std::size_t k = 0; k < tr.grid.nodes.size(); ++k) {
    const double t = tr.grid.nodes[k];
    e = std::max({e, std::abs(tr.f1[k] - mc.f1(t)), std::abs(tr.g1[k] - mc.g1(t))});
  }
  return e;
}

double max_diff(const BoundaryTrace& a, const BoundaryTrace& b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.f1.size(); ++k) {
    e = std::max({e, std::abs(a.f1[k] - b.f1[k]), std::abs(a.g1[k] - b.g1[k])});
  }
  return e;
}

// int_a^b (p + q s) / sqrt(t - s) ds
double moment(double p, double q, double a, double b, double t) {
  auto prim = [&](double s) {
    const double u = t - s;
    return -(p + q * t) * 2 * std::sqrt(u) + q * (2.0 / 3.0) * u * std::sqrt(u);
  };
  return prim(b) - prim(a);
}

}  // namespace

TEST_CASE("time grids") {
  auto g = TimeGrid::graded(0.9, 16, 2.0);
  CHECK(g.nodes.size() == 17);
  CHECK(g.nodes.front() == 0.0);
  CHECK(g.end() == doctest::Approx(0.9));
  CHECK(g.nodes[4] == doctest::Approx(0.9 / 16.0));
  CHECK_THROWS(TimeGrid::graded(1.0, 4, 1.0));
  CHECK_THROWS(TimeGrid::graded(1.0, 16, 0.5));
  CHECK_THROWS(TimeGrid::from_nodes({0.0, 0.3, 0.2}));
  CHECK(default_solve_horizon(1.0, 256) == doctest::Approx(255.0 / 256.0));
}

TEST_CASE("weak-singular product weights") {
  auto uni = TimeGrid::graded(1.0, 32, 1.0);
  for (std::size_t k : {1u, 7u, 32u}) {
    auto w = quad_weights_weak_singular(uni, k);
    const double tk = uni.nodes[k];
    double s0 = 0, s1 = 0;
    for (std::size_t i = 0; i <= k; ++i) {
      s0 += w[i];
      s1 += w[i] * uni.nodes[i];
    }
    CHECK(s0 == doctest::Approx(2 * std::sqrt(tk)).epsilon(1e-13));
    CHECK(s1 == doctest::Approx(4.0 / 3.0 * std::pow(tk, 1.5)).epsilon(1e-13));
  }

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto g = TimeGrid::graded(0.8, 40, 2.0);
  std::vector<double> phi(g.nodes.size());
  for (auto& v : phi) v = u(rng);
  for (std::size_t k : {1u, 13u, 40u}) {
    auto w = quad_weights_weak_singular(g, k);
    double sum = 0, exact = 0;
    for (std::size_t i = 0; i <= k; ++i) sum += w[i] * phi[i];
    for (std::size_t i = 0; i < k; ++i) {
      const double a = g.nodes[i], b = g.nodes[i + 1];
      const double q = (phi[i + 1] - phi[i]) / (b - a), p = phi[i] - q * a;
      exact += moment(p, q, a, b, g.nodes[k]);
    }
    CHECK(std::abs(sum - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("heat traces") {
  for (const char* name : {"heat-const", "heat-linear-x", "heat-exp"}) {
    auto mc = manufactured_case(name);
    HeatKernelSystem sys(mc.spec());
    auto tr = solve_heat_system(sys, TimeGrid::graded(default_solve_horizon(1.0, 128), 128, 2.0));
    for (const auto& z : tr.f1) CHECK(std::abs(z.imag()) < 1e-12);
    const double tol = std::string(name) == "heat-exp" ? 1e-3 : (std::string(name) == "heat-const" ? 1e-10 : 1e-6);
    CHECK(max_error(tr, mc) < tol);
    CHECK(std::abs(tr.f1[0] - mc.q0().derivative(0.0)) < 1e-10);
  }
}

TEST_CASE("ls traces") {
  auto flat = manufactured_case("ls-const");
  auto tr0 = solve_ls_system(LsKernelSystem(flat.spec()), TimeGrid::graded(0.99, 64, 2.0));
  CHECK(max_error(tr0, flat) < 1e-10);

  auto mc = manufactured_case("ls-plane{k=1}");
  auto tr = solve_ls_system(LsKernelSystem(mc.spec()), TimeGrid::graded(default_solve_horizon(1.0, 128), 128, 2.0));
  CHECK(max_error(tr, mc) < 1e-3);
  CHECK(std::abs(tr.f1[0] - Complex(0, 1)) < 1e-10);
}

TEST_CASE("picard iteration reproduces direct marching") {
  auto mc = manufactured_case("heat-exp");
  HeatKernelSystem sys(mc.spec());
  auto grid = TimeGrid::graded(0.98, 64, 2.0);
  auto direct = solve_heat_system(sys, grid);
  auto picard = iterate_fixed_point(sys, grid);
  CHECK(max_diff(direct, picard) < 1e-8);
  CHECK(picard.iterations > 1);

  auto flat = manufactured_case("heat-const");
  auto zero = iterate_fixed_point(HeatKernelSystem(flat.spec()), grid);
  CHECK(zero.iterations == 1);
}

TEST_CASE("step halving and failure") {
  const double pi = std::numbers::pi;
  // a singular block on any step wider than 0.1
  RowAssembler wide = [pi](const std::vector<double>& nodes, std::size_t k) {
    SystemRow r;
    r.n1 = r.n2 = 1.0;
    r.a11.assign(k + 1, 0.0);
    r.a12 = r.a21 = r.a22 = r.a11;
    if (nodes[k] - nodes[k - 1] > 0.1) r.a11[k] = r.a22[k] = pi;
    return r;
  };
  std::vector<double> nodes{0.0, 0.05, 0.1, 0.25, 0.3};
  auto tr = march_system(nodes, 0.0, 0.0, wide, {1e12, true, 1});
  CHECK(tr.halvings == 1);
  CHECK(tr.grid.nodes.size() == 6);
  CHECK(std::abs(tr.f1.back() - 1.0 / pi) < 1e-15);

  RowAssembler always = [pi](const std::vector<double>&, std::size_t k) {
    SystemRow r;
    r.a11.assign(k + 1, 0.0);
    r.a12 = r.a21 = r.a22 = r.a11;
    r.a11[k] = r.a22[k] = pi;
    return r;
  };
  try {
    march_system(nodes, 0.0, 0.0, always, {1e12, true, 1});
    FAIL("expected a step failure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 1);
  }
  CHECK(condition_2x2(1.0, 0.0, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(condition_2x2(1.0, 1.0, 1.0, 1.0) > 1e15);
}

TEST_CASE("picard divergence is reported") {
  DiscreteSystem sys;
  sys.nodes = {0.0, 0.5, 1.0};
  sys.rows.resize(3);
  for (std::size_t k = 1; k < 3; ++k) {
    sys.rows[k].n1 = 1.0;
    sys.rows[k].a11.assign(k + 1, 0.0);
    sys.rows[k].a12 = sys.rows[k].a21 = sys.rows[k].a22 = sys.rows[k].a11;
    sys.rows[k].a11[k] = 10.0;
  }
  try {
    iterate_fixed_point(sys, {50, 1e-13, 1});
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Divergence);
  }
}

TEST_CASE("forcing perturbations stay bounded under refinement") {
  auto mc = manufactured_case("heat-exp");
  HeatKernelSystem sys(mc.spec());
  const double delta = 1e-3;
  std::vector<double> gain;
  for (std::size_t n : {32u, 64u, 128u}) {
    auto nodes = TimeGrid::graded(0.95, n, 2.0).nodes;
    auto base = heat_row_assembler(sys);
    RowAssembler shifted = [&](const std::vector<double>& x, std::size_t k) {
      SystemRow r = base(x, k);
      r.n1 += delta;
      r.n2 += delta;
      return r;
    };
    auto [a, b] = heat_initial_values(sys);
    auto t0 = march_system(nodes, a, b, base);
    auto t1 = march_system(nodes, a, b, shifted);
    gain.push_back(max_diff(t0, t1) / delta);
  }
  CHECK(gain.back() < 1.5 * gain.front());
  CHECK(gain.back() < 10.0);
}

TEST_CASE("parallel_for is deterministic") {
  std::vector<double> a(1000), b(1000);
  parallel_for(0, 1000, 4, [&](std::size_t k) { a[k] = std::sin(double(k)); });
  parallel_for(0, 1000, 1, [&](std::size_t k) { b[k] = std::sin(double(k)); });
  CHECK(a == b);
  std::atomic<int> count{0};
  parallel_for(5, 5, 3, [&](std::size_t) { ++count; });
  CHECK(count == 0);
}
