#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "chdd/nn.hpp"
#include "chdd/theory.hpp"

using namespace chdd;
using Catch::Approx;

namespace {

Problem smooth_problem(const Mesh& m, const Params& p) {
  const double a = m.x.x_left(), L = m.x.length();
  const Field un = sample(m, [&](double x, double y) { return std::cos(std::numbers::pi * (x - a) / L) + 0.1 * y; });
  Field fv = un;
  for (auto& x : fv.values) x = -x;
  return Problem::make(m, p, Field(m, p.c), un, fv);
}

}  // namespace

TEST_CASE("monodomain traces are a fixed point and give zero jumps", "[nn]") {
  for (bool strip : {false, true}) {
    const Mesh m = strip ? Mesh::strip(Grid2D(Grid1D(0, 4, 128), 0, 1, 8)) : Mesh::line(Grid1D(0, 4, 256));
    const Problem pr = smooth_problem(m, Params{0.01, 1e-3, 1, 0.25});
    const PhaseField ref = pr.monodomain();
    const NNSolver s(pr, alternating_decomposition(m.x, 5));
    const TraceSet t = traces_at(ref, s.decomposition());
    const auto sw = s.sweep(t, 0.25);
    for (const auto& j : sw.jumps)
      for (std::size_t k = 0; k < j.p.size(); ++k) {
        CHECK(std::abs(j.p[k]) < 1e-8);
        CHECK(std::abs(j.q[k]) < 1e-8);
      }
    for (int i = 0; i < t.size(); ++i)
      for (int k = 0; k < m.ny; ++k) CHECK(sw.next[i].g[k] == Approx(t[i].g[k]).margin(1e-11));
    CHECK(s.error(sw.dirichlet, ref) < 1e-12);
  }
}

TEST_CASE("equal subdomains converge in few iterations", "[nn]") {
  const Grid1D g(0, 20, 20 * 64);
  for (double dt : {1e-6, 1e-3}) {
    const Problem pr = smooth_problem(Mesh::line(g), Params{0.01, dt, 1, 0.25});
    const PhaseField ref = pr.monodomain();
    for (int n : {2, 4, 8}) {
      const NNSolver s(pr, equal_decomposition(g, n));
      const auto r = nn_solve(s, random_traces(s.decomposition(), 1, 42), 0.25, ref, 1e-6, 50);
      CHECK(r.converged);
      CHECK(r.iterations <= 3);
      CHECK(r.condition_estimate >= 1.0);
    }
  }
}

TEST_CASE("one sweep approaches the closed-form iteration matrix", "[nn]") {
  const Params p{0.1, 0.1, 1, 0.25};
  const SymbolSet S = symbols(p);
  const std::vector<double> w{0.375, 0.5, 0.375, 0.5};
  const NNMatrix T = nn_iteration_matrix(S, w, 0.25);
  std::vector<double> dev;
  for (int n : {128, 256, 512}) {
    const Grid1D g(0, 1.75, int(std::lround(1.75 * n)));
    const Problem pr = Problem::error_equations(Mesh::line(g), p);
    const NNSolver s(pr, weighted_decomposition(g, w));
    double e = 0;
    for (int col = 0; col < 6; ++col) {
      TraceSet t;
      t.interfaces.assign(3, Trace{{0.0}, {0.0}});
      (col % 2 == 0 ? t[col / 2].g : t[col / 2].h)[0] = 1.0;
      const auto sw = s.sweep(t, 0.25, false);
      for (int i = 0; i < 3; ++i)
        e = std::max({e, std::abs(sw.next[i].g[0] - T.T(2 * i, col)), std::abs(sw.next[i].h[0] - T.T(2 * i + 1, col))});
    }
    dev.push_back(e);
  }
  CHECK(std::log2(dev[0] / dev[1]) == Approx(2).margin(0.2));
  CHECK(std::log2(dev[1] / dev[2]) == Approx(2).margin(0.2));
}

TEST_CASE("step functions compose into a sweep", "[nn]") {
  const Mesh m = Mesh::line(Grid1D(0, 3, 192));
  const Problem pr = smooth_problem(m, Params{0.01, 1e-3, 1, 0.25});
  const NNSolver s(pr, equal_decomposition(m.x, 3));
  const TraceSet t = random_traces(s.decomposition(), 1, 9);
  const auto dir = nn_dirichlet_step(s, t);
  const auto phi = nn_neumann_step(s, dir);
  const TraceSet next = nn_update(s, t, phi, 0.25);
  const auto sw = s.sweep(t, 0.25);
  for (int i = 0; i < 2; ++i) {
    CHECK(next[i].g[0] == Approx(sw.next[i].g[0]));
    CHECK(next[i].h[0] == Approx(sw.next[i].h[0]));
  }
  // Dirichlet fields take the traces on both sides of each interface.
  CHECK(dir[0].u(dir[0].u.nx - 1) == Approx(t[0].g[0]));
  CHECK(dir[1].u(0) == Approx(t[0].g[0]));
}

TEST_CASE("trace shapes are validated", "[nn]") {
  const Mesh m = Mesh::line(Grid1D(0, 1, 64));
  const Problem pr = Problem::error_equations(m, Params{});
  const NNSolver s(pr, equal_decomposition(m.x, 4));
  TraceSet wrong = random_traces(equal_decomposition(m.x, 3), 1, 1);
  CHECK_THROWS_AS(s.sweep(wrong, 0.25), InvalidArgument);
  CHECK_THROWS_AS(s.neumann_step({}), InvalidArgument);
}
