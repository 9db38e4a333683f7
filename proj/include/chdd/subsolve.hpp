#pragma once

#include <variant>
#include <vector>

#include "chdd/discretization.hpp"

namespace chdd {

// Monodomain data shared by every subdomain.
struct Problem {
  Mesh mesh;
  Params params;
  Field c;
  Field fu;
  Field fv;

  static Problem make(const Mesh& mesh, const Params& p, Field c, Field fu, Field fv) {
    p.validate();
    require(c.nx == mesh.lines() && c.ny == mesh.ny, "c does not match mesh");
    require(fu.nx == mesh.lines() && fu.ny == mesh.ny, "f_u does not match mesh");
    require(fv.nx == mesh.lines() && fv.ny == mesh.ny, "f_v does not match mesh");
    return Problem{mesh, p, std::move(c), std::move(fu), std::move(fv)};
  }

  // Zero right-hand side with frozen constant c: the error equations.
  static Problem error_equations(const Mesh& mesh, const Params& p) {
    return make(mesh, p, Field(mesh, p.c), Field(mesh), Field(mesh));
  }

  PhaseField monodomain() const { return solve_monodomain(mesh, params, c, fu, fv); }
};

struct DirichletTrace {
  std::vector<double> g;
  std::vector<double> h;
};

// Outward normal derivatives of u (p) and v (q).
struct NeumannFlux {
  std::vector<double> p;
  std::vector<double> q;
};

struct PhysicalNeumann {};

using FaceCondition = std::variant<DirichletTrace, NeumannFlux, PhysicalNeumann>;

inline FaceKind kind_of(const FaceCondition& f) {
  return std::holds_alternative<DirichletTrace>(f) ? FaceKind::dirichlet : FaceKind::neumann;
}

enum class Side { left, right };

// Dirichlet and flux-carrying Neumann rows on lines [first, last] of a
// problem, factored once and reused for any face data.
class SubdomainSolver {
 public:
  static constexpr double kIllConditioned = 1e12;

  SubdomainSolver(const Problem& problem, int first, int last, FaceKind left, FaceKind right)
      : first_(first),
        last_(last),
        op_(problem.mesh.restrict_lines(first, last), problem.params,
            problem.c.restrict_lines(first, last), left, right),
        fu_(problem.fu.restrict_lines(first, last)),
        fv_(problem.fv.restrict_lines(first, last)) {
    require(first >= 0 && last < problem.mesh.lines() && last > first, "invalid subdomain line range");
    lu_ = op_.factor();
  }

  int first_line() const { return first_; }
  int last_line() const { return last_; }
  int lines() const { return op_.lines(); }
  const Mesh& mesh() const { return op_.mesh(); }
  const StripOperator& op() const { return op_; }
  double condition_estimate() const { return lu_.condition_estimate(); }
  bool ill_conditioned() const { return condition_estimate() > kIllConditioned; }

  PhaseField solve(const FaceCondition& left, const FaceCondition& right, bool with_rhs = true) const {
    require(kind_of(left) == op_.face(0) && kind_of(right) == op_.face(lines() - 1),
            "face condition kind differs from the factored operator");
    const Mesh& m = mesh();
    const int ny = m.ny;
    std::vector<double> x(2 * std::size_t(lines()) * ny, 0.0);
    if (with_rhs) x = interleave(PhaseField{fu_, fv_});
    apply_face(x, left, 0);
    apply_face(x, right, lines() - 1);
    for (int i = 0; i < lines(); ++i)
      for (int j = 0; j < ny; ++j)
        if (m.y_fixed(j)) {
          x[2 * (std::size_t(i) * ny + j)] = 0.0;
          x[2 * (std::size_t(i) * ny + j) + 1] = 0.0;
        }
    lu_.solve_in_place(x);
    return deinterleave(x, lines(), ny);
  }

  // Flux that closes the half-cell balance at an end line: the value the
  // Neumann row there would need so that the given field satisfies it.
  NeumannFlux outward_flux(const PhaseField& f, Side side, bool with_rhs = true) const {
    const int i = side == Side::left ? 0 : lines() - 1;
    const auto act = op_.neumann_face_action(f, i);
    const Params& p = op_.params();
    const double hx = mesh().x.h();
    const double e2 = p.epsilon * p.epsilon;
    NeumannFlux out{std::vector<double>(mesh().ny, 0.0), std::vector<double>(mesh().ny, 0.0)};
    for (int j = 0; j < mesh().ny; ++j) {
      if (mesh().y_fixed(j)) continue;
      const double ru = act[0][j] - (with_rhs ? fu_(i, j) : 0.0);
      const double rv = act[1][j] - (with_rhs ? fv_(i, j) : 0.0);
      out.q[j] = ru * hx / (2.0 * p.delta_t);
      out.p[j] = -rv * hx / (2.0 * e2);
    }
    return out;
  }

 private:
  void apply_face(std::vector<double>& x, const FaceCondition& face, int i) const {
    const int ny = mesh().ny;
    const std::size_t base = 2 * std::size_t(i) * ny;
    if (const auto* d = std::get_if<DirichletTrace>(&face)) {
      require(static_cast<int>(d->g.size()) == ny && static_cast<int>(d->h.size()) == ny,
              "Dirichlet trace length does not match the interface");
      for (int j = 0; j < ny; ++j) {
        x[base + 2 * j] = d->g[j];
        x[base + 2 * j + 1] = d->h[j];
      }
    } else if (const auto* n = std::get_if<NeumannFlux>(&face)) {
      require(static_cast<int>(n->p.size()) == ny && static_cast<int>(n->q.size()) == ny,
              "flux length does not match the interface");
      const Params& p = op_.params();
      const double s = 2.0 / mesh().x.h();
      const double e2 = p.epsilon * p.epsilon;
      for (int j = 0; j < ny; ++j) {
        x[base + 2 * j] += p.delta_t * s * n->q[j];
        x[base + 2 * j + 1] -= e2 * s * n->p[j];
      }
    }
  }

  int first_;
  int last_;
  StripOperator op_;
  Field fu_;
  Field fv_;
  BlockTridiagonalLU lu_;
};

struct SubdomainProblem {
  const Problem* problem = nullptr;
  int first_line = 0;
  int last_line = 0;
  FaceCondition left = PhysicalNeumann{};
  FaceCondition right = PhysicalNeumann{};
  bool with_rhs = true;
};

struct SubdomainSolution {
  PhaseField field;
  double condition_estimate = 1.0;
  bool ill_conditioned = false;
};

inline SubdomainSolution solve_subdomain(const SubdomainProblem& sp) {
  require(sp.problem != nullptr, "subdomain problem has no parent problem");
  SubdomainSolver s(*sp.problem, sp.first_line, sp.last_line, kind_of(sp.left), kind_of(sp.right));
  return {s.solve(sp.left, sp.right, sp.with_rhs), s.condition_estimate(), s.ill_conditioned()};
}

// One-sided three-point outward normal derivative at an end line.
inline NeumannFlux extract_flux(const PhaseField& f, const Mesh& m, Side side) {
  require(f.u.nx >= 3, "one-sided flux needs at least three lines");
  const int n = f.u.nx - 1;
  const double h = m.x.h();
  auto d = [&](const Field& w, int j) {
    if (side == Side::right) return (3 * w(n, j) - 4 * w(n - 1, j) + w(n - 2, j)) / (2 * h);
    return (3 * w(0, j) - 4 * w(1, j) + w(2, j)) / (2 * h);
  };
  NeumannFlux out{std::vector<double>(f.u.ny), std::vector<double>(f.u.ny)};
  for (int j = 0; j < f.u.ny; ++j) {
    out.p[j] = d(f.u, j);
    out.q[j] = d(f.v, j);
  }
  return out;
}

inline NeumannFlux negate(NeumannFlux f) {
  for (auto& x : f.p) x = -x;
  for (auto& x : f.q) x = -x;
  return f;
}

inline NeumannFlux add(const NeumannFlux& a, const NeumannFlux& b) {
  NeumannFlux out = a;
  for (std::size_t j = 0; j < out.p.size(); ++j) {
    out.p[j] += b.p[j];
    out.q[j] += b.q[j];
  }
  return out;
}

}  // namespace chdd
