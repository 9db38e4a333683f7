#pragma once

#include <memory>
#include <utility>

#include "chdd/iteration.hpp"

namespace chdd {

// Dirichlet-Neumann on two subdomains. By default the left subdomain takes
// the Dirichlet step; swap hands it to the right one.
class DNSolver {
 public:
  struct Sweep {
    PhaseField dirichlet;
    PhaseField neumann;
    NeumannFlux flux;  // outward flux of the Dirichlet subdomain
    Trace next;
  };

  DNSolver(const Problem& problem, const Decomposition& d, bool swap = false)
      : problem_(&problem), decomposition_(d), swap_(swap), gamma_(d.node(1)) {
    require(d.subdomains() == 2, "Dirichlet-Neumann needs exactly two subdomains");
    require(d.grid().n_cells() == problem.mesh.x.n_cells(), "decomposition grid differs from problem mesh");
    const int last = problem.mesh.lines() - 1;
    left_ = std::make_unique<SubdomainSolver>(problem, 0, gamma_, FaceKind::neumann,
                                              swap ? FaceKind::neumann : FaceKind::dirichlet);
    right_ = std::make_unique<SubdomainSolver>(problem, gamma_, last,
                                               swap ? FaceKind::dirichlet : FaceKind::neumann,
                                               FaceKind::neumann);
  }

  const Problem& problem() const { return *problem_; }
  const Decomposition& decomposition() const { return decomposition_; }
  int interface_line() const { return gamma_; }
  bool swapped() const { return swap_; }
  int trace_length() const { return problem_->mesh.ny; }
  double condition_estimate() const {
    return std::max(left_->condition_estimate(), right_->condition_estimate());
  }

  Sweep sweep(const Trace& t, double theta, bool with_rhs = true) const {
    require(static_cast<int>(t.g.size()) == trace_length() && static_cast<int>(t.h.size()) == trace_length(),
            "trace length does not match the interface");
    const DirichletTrace dt{t.g, t.h};
    Sweep s;
    if (!swap_) {
      s.dirichlet = left_->solve(PhysicalNeumann{}, dt, with_rhs);
      s.flux = left_->outward_flux(s.dirichlet, Side::right, with_rhs);
      s.neumann = right_->solve(negate(s.flux), PhysicalNeumann{}, with_rhs);
    } else {
      s.dirichlet = right_->solve(dt, PhysicalNeumann{}, with_rhs);
      s.flux = right_->outward_flux(s.dirichlet, Side::left, with_rhs);
      s.neumann = left_->solve(PhysicalNeumann{}, negate(s.flux), with_rhs);
    }
    const int nl = swap_ ? gamma_ : 0;
    s.next = t;
    for (int j = 0; j < trace_length(); ++j) {
      s.next.g[j] = theta * s.neumann.u(nl, j) + (1 - theta) * t.g[j];
      s.next.h[j] = theta * s.neumann.v(nl, j) + (1 - theta) * t.h[j];
    }
    return s;
  }

  double error(const Sweep& s, const PhaseField& ref) const {
    return dn_composite_error(problem_->mesh, gamma_, swap_, s.dirichlet.u, s.neumann.u, ref.u);
  }

  // Composite u error: Dirichlet field on its whole subdomain, Neumann field
  // away from the interface.
  static double dn_composite_error(const Mesh& mesh, int gamma, bool swap, const Field& dir, const Field& neu,
                                   const Field& ref) {
    ErrorNorm e(mesh);
    const int last = mesh.lines() - 1;
    if (!swap) {
      e.add(dir, ref, 0, 0, gamma);
      e.add(neu, ref, gamma, 1, last - gamma);
    } else {
      e.add(dir, ref, gamma, 0, last - gamma);
      e.add(neu, ref, 0, 0, gamma - 1);
    }
    return e.value();
  }

 private:
  const Problem* problem_;
  Decomposition decomposition_;
  bool swap_;
  int gamma_;
  std::unique_ptr<SubdomainSolver> left_;
  std::unique_ptr<SubdomainSolver> right_;
};

struct DNState {
  Trace trace;
  int k = 0;
};

inline DNState dn_iterate(const DNState& state, const DNSolver& solver, double theta, bool with_rhs = true) {
  return {solver.sweep(state.trace, theta, with_rhs).next, state.k + 1};
}

inline IterationReport dn_solve(const DNSolver& solver, const Trace& initial, double theta,
                                const PhaseField& reference, double tol, int max_iter) {
  const Mesh& m = solver.problem().mesh;
  TraceSet init{{initial}};
  check_trace_shape(init, 1, solver.trace_length());
  const TraceSet ref = traces_at(reference, solver.decomposition());
  auto r = run_iterations(init, trace_error(init, ref, m), tol, max_iter, [&](const TraceSet& t) {
    auto s = solver.sweep(t[0], theta);
    return std::pair{solver.error(s, reference), TraceSet{{s.next}}};
  });
  r.condition_estimate = solver.condition_estimate();
  r.ill_conditioned = r.condition_estimate > SubdomainSolver::kIllConditioned;
  return r;
}

}  // namespace chdd
