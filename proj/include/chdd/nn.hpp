#pragma once

#include <memory>
#include <utility>

#include "chdd/iteration.hpp"

namespace chdd {

// Neumann-Neumann on N >= 2 subdomains. Interface i (0-based) sits between
// subdomains i and i+1.
class NNSolver {
 public:
  struct Sweep {
    std::vector<PhaseField> dirichlet;
    std::vector<NeumannFlux> jumps;
    std::vector<PhaseField> neumann;
    TraceSet next;
  };

  NNSolver(const Problem& problem, const Decomposition& d) : problem_(&problem), decomposition_(d) {
    require(d.grid().n_cells() == problem.mesh.x.n_cells(), "decomposition grid differs from problem mesh");
    const int n = d.subdomains();
    for (int i = 0; i < n; ++i) {
      const FaceKind l = i == 0 ? FaceKind::neumann : FaceKind::dirichlet;
      const FaceKind r = i == n - 1 ? FaceKind::neumann : FaceKind::dirichlet;
      dirichlet_.push_back(std::make_unique<SubdomainSolver>(problem, d.node(i), d.node(i + 1), l, r));
      neumann_.push_back(std::make_unique<SubdomainSolver>(problem, d.node(i), d.node(i + 1),
                                                           FaceKind::neumann, FaceKind::neumann));
    }
  }

  const Problem& problem() const { return *problem_; }
  const Decomposition& decomposition() const { return decomposition_; }
  int subdomains() const { return decomposition_.subdomains(); }
  int trace_length() const { return problem_->mesh.ny; }
  double condition_estimate() const {
    double c = 1;
    for (const auto& s : dirichlet_) c = std::max(c, s->condition_estimate());
    for (const auto& s : neumann_) c = std::max(c, s->condition_estimate());
    return c;
  }

  std::vector<PhaseField> dirichlet_step(const TraceSet& t, bool with_rhs = true) const {
    check_trace_shape(t, subdomains() - 1, trace_length());
    std::vector<PhaseField> out;
    const int n = subdomains();
    for (int i = 0; i < n; ++i) {
      FaceCondition l = PhysicalNeumann{}, r = PhysicalNeumann{};
      if (i > 0) l = DirichletTrace{t[i - 1].g, t[i - 1].h};
      if (i < n - 1) r = DirichletTrace{t[i].g, t[i].h};
      out.push_back(dirichlet_[i]->solve(l, r, with_rhs));
    }
    return out;
  }

  // Sum of the two outward fluxes at each interface; zero at the monodomain.
  std::vector<NeumannFlux> jumps(const std::vector<PhaseField>& dir, bool with_rhs = true) const {
    std::vector<NeumannFlux> out;
    for (int i = 0; i + 1 < subdomains(); ++i) {
      out.push_back(add(dirichlet_[i]->outward_flux(dir[i], Side::right, with_rhs),
                        dirichlet_[i + 1]->outward_flux(dir[i + 1], Side::left, with_rhs)));
    }
    return out;
  }

  // Zero right-hand side; d/dx of the correction equals the jump at each
  // interface, so outward flux is +J on the right face and -J on the left.
  std::vector<PhaseField> neumann_step(const std::vector<NeumannFlux>& j) const {
    require(static_cast<int>(j.size()) == subdomains() - 1, "jump count must equal the interface count");
    std::vector<PhaseField> out;
    const int n = subdomains();
    for (int i = 0; i < n; ++i) {
      FaceCondition l = PhysicalNeumann{}, r = PhysicalNeumann{};
      if (i > 0) l = negate(j[i - 1]);
      if (i < n - 1) r = j[i];
      out.push_back(neumann_[i]->solve(l, r, false));
    }
    return out;
  }

  TraceSet update(const TraceSet& t, const std::vector<PhaseField>& phi, double theta) const {
    TraceSet next = t;
    for (int i = 0; i + 1 < subdomains(); ++i) {
      const int lr = phi[i].u.nx - 1;
      for (int j = 0; j < trace_length(); ++j) {
        next[i].g[j] -= theta * (phi[i].u(lr, j) - phi[i + 1].u(0, j));
        next[i].h[j] -= theta * (phi[i].v(lr, j) - phi[i + 1].v(0, j));
      }
    }
    return next;
  }

  Sweep sweep(const TraceSet& t, double theta, bool with_rhs = true) const {
    Sweep s;
    s.dirichlet = dirichlet_step(t, with_rhs);
    s.jumps = jumps(s.dirichlet, with_rhs);
    s.neumann = neumann_step(s.jumps);
    s.next = update(t, s.neumann, theta);
    return s;
  }

  double error(const std::vector<PhaseField>& dir, const PhaseField& ref) const {
    return nn_composite_error(problem_->mesh, decomposition_, dir, ref);
  }

  // Composite u error of the Dirichlet-step fields.
  static double nn_composite_error(const Mesh& mesh, const Decomposition& d, const std::vector<PhaseField>& dir,
                                   const PhaseField& ref) {
    ErrorNorm e(mesh);
    for (int i = 0; i < d.subdomains(); ++i) e.add(dir[i].u, ref.u, d.node(i), i == 0 ? 0 : 1, dir[i].u.nx - 1);
    return e.value();
  }

 private:
  const Problem* problem_;
  Decomposition decomposition_;
  std::vector<std::unique_ptr<SubdomainSolver>> dirichlet_;
  std::vector<std::unique_ptr<SubdomainSolver>> neumann_;
};

inline std::vector<PhaseField> nn_dirichlet_step(const NNSolver& s, const TraceSet& t) { return s.dirichlet_step(t); }

inline std::vector<PhaseField> nn_neumann_step(const NNSolver& s, const std::vector<PhaseField>& dir) {
  return s.neumann_step(s.jumps(dir));
}

inline TraceSet nn_update(const NNSolver& s, const TraceSet& t, const std::vector<PhaseField>& phi, double theta) {
  return s.update(t, phi, theta);
}

inline IterationReport nn_solve(const NNSolver& solver, const TraceSet& initial, double theta,
                                const PhaseField& reference, double tol, int max_iter) {
  const Mesh& m = solver.problem().mesh;
  check_trace_shape(initial, solver.subdomains() - 1, solver.trace_length());
  const TraceSet ref = traces_at(reference, solver.decomposition());
  auto r = run_iterations(initial, trace_error(initial, ref, m), tol, max_iter, [&](const TraceSet& t) {
    auto s = solver.sweep(t, theta);
    return std::pair{solver.error(s.dirichlet, reference), std::move(s.next)};
  });
  r.condition_estimate = solver.condition_estimate();
  r.ill_conditioned = r.condition_estimate > SubdomainSolver::kIllConditioned;
  return r;
}

}  // namespace chdd
