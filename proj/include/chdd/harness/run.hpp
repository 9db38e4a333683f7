#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "chdd/dn.hpp"
#include "chdd/harness/spec.hpp"
#include "chdd/modes.hpp"
#include "chdd/nn.hpp"
#include "chdd/theory.hpp"

namespace chdd::harness {

enum ExitCode : int { kSuccess = 0, kNotConverged = 1, kInvalidSpec = 2 };

// Discretized experiment: mesh, monodomain problem, decomposition, the
// reference solution and the seeded initial interface guess.
struct Setup {
  Mesh mesh;
  Problem problem;
  Decomposition decomposition;
  PhaseField reference;
  TraceSet initial;

  double y_length() const { return mesh.is_strip() ? mesh.hy * (mesh.ny - 1) : 1.0; }
};

inline Mesh build_mesh(const ExperimentSpec& s) {
  const Grid1D gx = Grid1D::with_spacing(s.domain[0], s.domain[1], s.effective_hx());
  if (s.dim == 1) return Mesh::line(gx);
  const Grid1D gy = Grid1D::with_spacing(s.domain[2], s.domain[3], s.hy);
  return Mesh::strip(Grid2D(gx, s.domain[2], s.domain[3], gy.n_cells(),
                            s.ybc == "dirichlet" ? YBoundary::dirichlet : YBoundary::neumann));
}

// Smooth state u^n = c cos(pi x~) [cos(pi y~)] on the unit-scaled domain.
inline Field state_profile(const ExperimentSpec& s, const Mesh& m) {
  const double a = s.domain[0], L = s.domain[1] - s.domain[0];
  const double y0 = s.dim == 2 ? s.domain[2] : 0.0, Ly = s.dim == 2 ? s.domain[3] - s.domain[2] : 1.0;
  const bool strip = s.dim == 2;
  return sample(m, [&](double x, double y) {
    double v = s.c * std::cos(std::numbers::pi * (x - a) / L);
    if (strip) v *= std::cos(std::numbers::pi * (y - y0) / Ly);
    return v;
  });
}

inline Decomposition build_decomposition(const ExperimentSpec& s, const Grid1D& g) {
  if (s.method == "dn") {
    const double x = s.split.empty() ? 0.5 * (s.domain[0] + s.domain[1]) : s.split[0];
    const std::vector<double> bp{s.domain[0], x, s.domain[1]};
    return snap_decomposition(bp, g);
  }
  if (!s.split.empty()) {
    std::vector<double> bp{s.domain[0]};
    bp.insert(bp.end(), s.split.begin(), s.split.end());
    bp.push_back(s.domain[1]);
    return snap_decomposition(bp, g);
  }
  return s.unequal ? alternating_decomposition(g, s.sd) : equal_decomposition(g, s.sd);
}

inline std::unique_ptr<Setup> build_setup(const ExperimentSpec& s) {
  s.validate();
  auto out = std::make_unique<Setup>();
  out->mesh = build_mesh(s);
  const Field un = state_profile(s, out->mesh);
  Field fv = un;
  for (auto& x : fv.values) x = -x;
  Field c = s.c_mode == "field" ? un : Field(out->mesh, s.c);
  out->problem = Problem::make(out->mesh, s.params(), std::move(c), un, std::move(fv));
  out->decomposition = build_decomposition(s, out->mesh.x);
  out->reference = out->problem.monodomain();
  out->initial = random_traces(out->decomposition, out->mesh.ny, s.seed, s.guess_scale);
  for (auto& t : out->initial.interfaces)
    for (int j = 0; j < out->mesh.ny; ++j)
      if (out->mesh.y_fixed(j)) t.g[j] = t.h[j] = 0.0;
  return out;
}

struct RunResult {
  ExperimentSpec spec;
  IterationReport report;
  std::vector<double> bound_alpha;  // per k, empty when no bound applies
  std::vector<double> bound_beta;
  std::vector<std::pair<std::string, std::string>> info;
  std::vector<double> mass, energy;  // monodomain runs
  double wall_time_s = 0;

  bool converged() const { return spec.method == "monodomain" || report.converged; }
  bool has_bounds() const { return !bound_alpha.empty(); }
};

namespace detail {

inline std::vector<double> envelope(double factor, double e0, int count) {
  std::vector<double> v(count);
  for (int k = 0; k < count; ++k) v[k] = std::pow(factor, k) * e0;
  return v;
}

inline void run_dn(const ExperimentSpec& s, const Setup& su, RunResult& r) {
  const double theta = s.effective_theta();
  const TraceSet ref = traces_at(su.reference, su.decomposition);
  const double e0 = trace_error(su.initial, ref, su.mesh);
  const int gamma = su.decomposition.node(1);
  if (s.path == "modes") {
    require(s.dim == 2, "the mode path needs dim = 2");
    ModalDN solver(su.problem, su.decomposition, s.swap);
    r.report = run_iterations(su.initial, e0, s.tol, s.max_iter, [&](const TraceSet& t) {
      auto sw = solver.sweep(t[0], theta);
      return std::pair{DNSolver::dn_composite_error(su.mesh, gamma, s.swap, sw.dirichlet.u, sw.neumann.u,
                                                    su.reference.u),
                       TraceSet{{sw.next}}};
    });
  } else {
    DNSolver solver(su.problem, su.decomposition, s.swap);
    r.report = dn_solve(solver, su.initial[0], theta, su.reference, s.tol, s.max_iter);
  }
  const double a = su.decomposition.width(s.swap ? 1 : 0);
  const double b = su.decomposition.width(s.swap ? 0 : 1);
  const Params p = s.params();
  r.info.emplace_back("info.regime", p.is_real_symbol() ? "real" : "complex");
  if (std::abs(theta - 0.5) < 1e-12 && s.c_mode == "frozen") {
    const auto bound = dn_contraction_bound(p, a, b);
    const int n = static_cast<int>(r.report.errors.size());
    const double g0 = trace_max_error(su.initial, ref);
    r.bound_alpha = envelope(bound.factor, g0, n);
    r.bound_beta = r.bound_alpha;
    r.info.emplace_back("info.contraction_bound", format_double(bound.factor));
    r.info.emplace_back("info.switch_recommended", bound.switch_recommended ? "true" : "false");
  }
}

inline void run_nn(const ExperimentSpec& s, const Setup& su, RunResult& r) {
  const double theta = s.effective_theta();
  const TraceSet ref = traces_at(su.reference, su.decomposition);
  const double e0 = trace_error(su.initial, ref, su.mesh);
  if (s.path == "modes") {
    require(s.dim == 2, "the mode path needs dim = 2");
    ModalNN solver(su.problem, su.decomposition);
    r.report = run_iterations(su.initial, e0, s.tol, s.max_iter, [&](const TraceSet& t) {
      auto [next, dir] = solver.sweep(t, theta);
      return std::pair{NNSolver::nn_composite_error(su.mesh, su.decomposition, dir, su.reference), std::move(next)};
    });
  } else {
    NNSolver solver(su.problem, su.decomposition);
    r.report = nn_solve(solver, su.initial, theta, su.reference, s.tol, s.max_iter);
  }
  const Params p = s.params();
  r.info.emplace_back("info.regime", p.is_real_symbol() ? "real" : "complex");
  if (s.c_mode != "frozen") return;
  const auto b = nn_bounds(symbols(p), su.decomposition.widths(), s.dim, su.y_length());
  if (b.status != BoundStatus::provided) {
    r.info.emplace_back("info.bounds", "not provided for complex symbols");
    return;
  }
  double fa = b.equal_widths ? b.alpha : b.alpha_unequal;
  double fb = b.equal_widths ? b.beta : b.beta_unequal;
  if (s.dim == 2) {
    fa = std::sqrt(fa);
    fb = std::sqrt(fb);
  }
  const double g0 = trace_max_error(su.initial, ref);
  const int n = static_cast<int>(r.report.errors.size());
  r.bound_alpha = envelope(fa, g0, n);
  r.bound_beta = envelope(fb, g0, n);
  r.info.emplace_back("info.bound_alpha", format_double(fa));
  r.info.emplace_back("info.bound_beta", format_double(fb));
  r.info.emplace_back("info.d_threshold",
                      format_double(b.equal_widths ? b.d_threshold : b.d_threshold_unequal));
  r.info.emplace_back("info.converged_by_theory", b.converged_by_theory ? "true" : "false");
}

// Seeded smooth initial state: a nonzero mean plus four cosine modes per
// direction.
inline Field smooth_random_state(const ExperimentSpec& s, const Mesh& m) {
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> dist(-0.15, 0.15);
  const double mean = std::uniform_real_distribution<double>(0.1, 0.3)(rng);
  std::array<double, 4> ax{}, ay{};
  for (auto& x : ax) x = dist(rng);
  for (auto& x : ay) x = dist(rng);
  const double a = s.domain[0], L = s.domain[1] - s.domain[0];
  const double y0 = s.dim == 2 ? s.domain[2] : 0.0, Ly = s.dim == 2 ? s.domain[3] - s.domain[2] : 1.0;
  const bool strip = m.is_strip();
  return sample(m, [&](double x, double y) {
    double v = mean;
    for (int k = 0; k < 4; ++k) {
      v += ax[k] * std::cos((k + 1) * std::numbers::pi * (x - a) / L);
      if (strip) v += ay[k] * std::cos((k + 1) * std::numbers::pi * (y - y0) / Ly);
    }
    return v;
  });
}

inline void run_monodomain(const ExperimentSpec& s, RunResult& r) {
  s.validate();
  const Mesh m = build_mesh(s);
  const Params p = s.params();
  Field u = smooth_random_state(s, m);
  r.mass.push_back(mass(u, m));
  r.energy.push_back(energy(u, p, m));
  for (int n = 0; n < s.steps; ++n) {
    u = time_step(u, p, m).u;
    r.mass.push_back(mass(u, m));
    r.energy.push_back(energy(u, p, m));
  }
}

}  // namespace detail

inline RunResult run(const ExperimentSpec& s) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  r.spec = s;
  s.validate();
  if (s.method == "monodomain") {
    detail::run_monodomain(s, r);
  } else {
    const auto su = build_setup(s);
    if (s.method == "dn") {
      detail::run_dn(s, *su, r);
    } else {
      detail::run_nn(s, *su, r);
    }
    r.info.emplace_back("info.condition_estimate", format_double(r.report.condition_estimate));
    if (r.report.ill_conditioned) r.info.emplace_back("info.ill_conditioned", "true");
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// One table cell: the iteration count at the given spec.
struct TableRow {
  double h;
  double theta_or_sd;
  double dt;
  int iterations;
  bool converged;
};

struct TableResult {
  std::string name;
  ExperimentSpec base;
  std::vector<TableRow> rows;
  double wall_time_s = 0;
  bool all_converged() const {
    for (const auto& r : rows)
      if (!r.converged) return false;
    return true;
  }
};

struct TableAxes {
  std::vector<double> h;       // h (1D) or hx (2D)
  std::vector<double> theta;   // used when sd is empty
  std::vector<int> sd;
  std::vector<double> dt;
};

inline TableResult sweep(const std::string& name, const ExperimentSpec& base, const TableAxes& axes) {
  const auto t0 = std::chrono::steady_clock::now();
  TableResult t{name, base, {}, 0};
  const bool by_sd = !axes.sd.empty();
  for (double dt : axes.dt) {
    for (double h : axes.h) {
      const std::size_t cols = by_sd ? axes.sd.size() : axes.theta.size();
      for (std::size_t k = 0; k < cols; ++k) {
        ExperimentSpec s = base;
        s.dt = dt;
        if (s.dim == 2) {
          s.hx = h;
        } else {
          s.h = h;
        }
        if (by_sd) {
          s.sd = axes.sd[k];
        } else {
          s.theta = axes.theta[k];
        }
        const RunResult r = run(s);
        t.rows.push_back({h, by_sd ? double(axes.sd[k]) : axes.theta[k], dt, r.report.iterations,
                          r.report.converged});
      }
    }
  }
  t.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

}  // namespace chdd::harness
