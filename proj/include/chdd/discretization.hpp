#pragma once

#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <vector>

#include "chdd/blocktri.hpp"
#include "chdd/core.hpp"

namespace chdd {

// Kind of row used on an end line of a (sub)mesh. Physical walls are
// Neumann faces carrying zero flux.
enum class FaceKind { dirichlet, neumann };

struct StencilTerm {
  int di;  // line offset: -1, 0, +1
  int j;   // transverse node
  double w;
};

// Discrete Laplacian weights at node (i, j). End lines use the mirror ghost,
// so a Neumann face row reads (2/h)[(w_nb - w)/h + flux] in x.
inline void laplacian_terms(const Mesh& m, int i, int j, std::vector<StencilTerm>& out) {
  out.clear();
  const double hx2 = m.x.h() * m.x.h();
  const int last = m.lines() - 1;
  if (i == 0) {
    out.push_back({+1, j, 2.0 / hx2});
  } else if (i == last) {
    out.push_back({-1, j, 2.0 / hx2});
  } else {
    out.push_back({-1, j, 1.0 / hx2});
    out.push_back({+1, j, 1.0 / hx2});
  }
  double self = -2.0 / hx2 - m.shift;
  if (m.is_strip()) {
    const double hy2 = m.hy * m.hy;
    if (j == 0) {
      out.push_back({0, 1, 2.0 / hy2});
    } else if (j == m.ny - 1) {
      out.push_back({0, j - 1, 2.0 / hy2});
    } else {
      out.push_back({0, j - 1, 1.0 / hy2});
      out.push_back({0, j + 1, 1.0 / hy2});
    }
    self -= 2.0 / hy2;
  }
  out.push_back({0, j, self});
}

// The linearized step operator [I, -dt L; eps^2 L - c^2, I] on a mesh whose
// two end lines are faces of the given kinds. Unknowns are interleaved
// (u, v) per node and grouped by x line, which makes the matrix block
// tridiagonal.
class StripOperator {
 public:
  StripOperator() = default;
  StripOperator(Mesh mesh, Params params, Field c, FaceKind left, FaceKind right)
      : mesh_(std::move(mesh)), params_(params), c_(std::move(c)), left_(left), right_(right) {
    require(c_.nx == mesh_.lines() && c_.ny == mesh_.ny, "coefficient field does not match mesh");
  }

  const Mesh& mesh() const { return mesh_; }
  const Params& params() const { return params_; }
  const Field& c() const { return c_; }
  int lines() const { return mesh_.lines(); }
  int block() const { return 2 * mesh_.ny; }
  FaceKind face(int i) const {
    return i == 0 ? left_ : (i == lines() - 1 ? right_ : FaceKind::neumann);
  }
  bool identity_line(int i) const {
    return (i == 0 && left_ == FaceKind::dirichlet) ||
           (i == lines() - 1 && right_ == FaceKind::dirichlet);
  }

  // Visits every nonzero of block row i as (di, row, col, value).
  template <class Sink>
  void visit_row(int i, Sink&& sink) const {
    const double dt = params_.delta_t;
    const double e2 = params_.epsilon * params_.epsilon;
    std::vector<StencilTerm> terms;
    for (int j = 0; j < mesh_.ny; ++j) {
      const int ru = 2 * j, rv = 2 * j + 1;
      if (identity_line(i) || mesh_.y_fixed(j)) {
        sink(0, ru, ru, 1.0);
        sink(0, rv, rv, 1.0);
        continue;
      }
      laplacian_terms(mesh_, i, j, terms);
      sink(0, ru, ru, 1.0);
      sink(0, rv, rv, 1.0);
      const double cij = c_(i, j);
      sink(0, rv, ru, -cij * cij);
      for (const auto& t : terms) {
        sink(t.di, ru, 2 * t.j + 1, -dt * t.w);
        sink(t.di, rv, 2 * t.j, e2 * t.w);
      }
    }
  }

  void assemble_row(int i, BlockRow& row) const {
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> lo, up;
    visit_row(i, [&](int di, int r, int col, double v) {
      if (di == 0) {
        row.diag(r, col) += v;
      } else if (di < 0) {
        lo.emplace_back(r, col, v);
      } else {
        up.emplace_back(r, col, v);
      }
    });
    row.lower.setFromTriplets(lo.begin(), lo.end());
    row.upper.setFromTriplets(up.begin(), up.end());
  }

  BlockTridiagonalLU factor() const {
    return BlockTridiagonalLU(lines(), block(), [this](int i, BlockRow& r) { assemble_row(i, r); });
  }

  // Operator rows applied at end line i as if it were a Neumann face with
  // zero flux. Returns the row values per transverse node for the u and v
  // equations (without right-hand side).
  std::array<std::vector<double>, 2> neumann_face_action(const PhaseField& f, int i) const {
    const double dt = params_.delta_t;
    const double e2 = params_.epsilon * params_.epsilon;
    std::vector<StencilTerm> terms;
    std::array<std::vector<double>, 2> out{std::vector<double>(mesh_.ny, 0.0),
                                           std::vector<double>(mesh_.ny, 0.0)};
    for (int j = 0; j < mesh_.ny; ++j) {
      if (mesh_.y_fixed(j)) continue;
      laplacian_terms(mesh_, i, j, terms);
      double lap_u = 0, lap_v = 0;
      for (const auto& t : terms) {
        lap_u += t.w * f.u(i + t.di, t.j);
        lap_v += t.w * f.v(i + t.di, t.j);
      }
      const double cij = c_(i, j);
      out[0][j] = f.u(i, j) - dt * lap_v;
      out[1][j] = f.v(i, j) + e2 * lap_u - cij * cij * f.u(i, j);
    }
    return out;
  }

 private:
  Mesh mesh_;
  Params params_;
  Field c_;
  FaceKind left_ = FaceKind::neumann;
  FaceKind right_ = FaceKind::neumann;
};

// Interleaved vector <-> phase field.
inline std::vector<double> interleave(const PhaseField& f) {
  std::vector<double> x(2 * f.u.values.size());
  for (std::size_t k = 0; k < f.u.values.size(); ++k) {
    x[2 * k] = f.u.values[k];
    x[2 * k + 1] = f.v.values[k];
  }
  return x;
}

inline PhaseField deinterleave(const std::vector<double>& x, int nx, int ny) {
  PhaseField f{Field(nx, ny), Field(nx, ny)};
  for (std::size_t k = 0; k < f.u.values.size(); ++k) {
    f.u.values[k] = x[2 * k];
    f.v.values[k] = x[2 * k + 1];
  }
  return f;
}

// Monodomain system with homogeneous Neumann walls, stored in the stacked
// ordering [u-block; v-block].
struct BlockSystem {
  Mesh mesh;
  Params params;
  Field c;
  Field fu;
  Field fv;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;

  int nodes() const { return mesh.lines() * mesh.ny; }

  StripOperator op() const { return StripOperator(mesh, params, c, FaceKind::neumann, FaceKind::neumann); }

  PhaseField solve() const {
    const StripOperator o = op();
    const auto lu = o.factor();
    std::vector<double> x = interleave(PhaseField{fu, fv});
    for (int i = 0; i < mesh.lines(); ++i)
      for (int j = 0; j < mesh.ny; ++j)
        if (mesh.y_fixed(j)) {
          x[2 * (std::size_t(i) * mesh.ny + j)] = 0.0;
          x[2 * (std::size_t(i) * mesh.ny + j) + 1] = 0.0;
        }
    lu.solve_in_place(x);
    return deinterleave(x, mesh.lines(), mesh.ny);
  }

  Eigen::VectorXd stacked(const PhaseField& f) const {
    const int n = nodes();
    Eigen::VectorXd x(2 * n);
    for (int k = 0; k < n; ++k) {
      x[k] = f.u.values[k];
      x[n + k] = f.v.values[k];
    }
    return x;
  }

  double residual_norm(const PhaseField& f) const { return (matrix * stacked(f) - rhs).lpNorm<Eigen::Infinity>(); }
};

inline BlockSystem assemble_monodomain(const Mesh& mesh, const Params& params, const Field& c,
                                       const Field& fu, const Field& fv) {
  require(fu.nx == mesh.lines() && fu.ny == mesh.ny && fv.nx == fu.nx && fv.ny == fu.ny,
          "right-hand side does not match mesh");
  BlockSystem s{mesh, params, c, fu, fv, {}, {}};
  const StripOperator o = s.op();
  const int n = s.nodes();
  const int ny = mesh.ny;
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < mesh.lines(); ++i) {
    o.visit_row(i, [&](int di, int r, int col, double v) {
      const int row = (r % 2) * n + i * ny + r / 2;
      const int cc = (col % 2) * n + (i + di) * ny + col / 2;
      trips.emplace_back(row, cc, v);
    });
  }
  s.matrix.resize(2 * n, 2 * n);
  s.matrix.setFromTriplets(trips.begin(), trips.end());
  s.rhs.resize(2 * n);
  for (int k = 0; k < n; ++k) {
    const bool fixed = mesh.y_fixed(k % ny);
    s.rhs[k] = fixed ? 0.0 : fu.values[k];
    s.rhs[n + k] = fixed ? 0.0 : fv.values[k];
  }
  return s;
}

inline PhaseField solve_monodomain(const Mesh& mesh, const Params& params, const Field& c,
                                   const Field& fu, const Field& fv) {
  return assemble_monodomain(mesh, params, c, fu, fv).solve();
}

struct LaplacianBc {
  enum class Kind { neumann, dirichlet } kind = Kind::neumann;
  std::vector<double> left;
  std::vector<double> right;

  static LaplacianBc neumann() { return {}; }
  static LaplacianBc dirichlet(std::vector<double> l, std::vector<double> r) {
    return {Kind::dirichlet, std::move(l), std::move(r)};
  }
};

// Homogeneous Neumann uses the mirror ghost on every wall. Dirichlet replaces
// the end lines by the given traces and leaves zeros there in the output.
inline Field discrete_laplacian(const Field& w, const Mesh& mesh, const LaplacianBc& bc = LaplacianBc::neumann()) {
  require(w.nx == mesh.lines() && w.ny == mesh.ny, "field does not match mesh");
  Field src = w;
  const int last = mesh.lines() - 1;
  if (bc.kind == LaplacianBc::Kind::dirichlet) {
    require(static_cast<int>(bc.left.size()) == mesh.ny && static_cast<int>(bc.right.size()) == mesh.ny,
            "Dirichlet trace length does not match mesh");
    for (int j = 0; j < mesh.ny; ++j) {
      src(0, j) = bc.left[j];
      src(last, j) = bc.right[j];
    }
  }
  Field out(mesh);
  std::vector<StencilTerm> terms;
  for (int i = 0; i < mesh.lines(); ++i) {
    if (bc.kind == LaplacianBc::Kind::dirichlet && (i == 0 || i == last)) continue;
    for (int j = 0; j < mesh.ny; ++j) {
      if (mesh.y_fixed(j)) continue;
      laplacian_terms(mesh, i, j, terms);
      double s = 0;
      for (const auto& t : terms) s += t.w * src(i + t.di, t.j);
      out(i, j) = s;
    }
  }
  return out;
}

// One linearized step: c = u^n, f_u = u^n, f_v = -u^n.
inline PhaseField time_step(const Field& u_n, const Params& params, const Mesh& mesh) {
  Field fv = u_n;
  for (auto& x : fv.values) x = -x;
  return solve_monodomain(mesh, params, u_n, u_n, fv);
}

// Trapezoidal nodal weights.
inline double trapezoid_weight(const Mesh& m, int i, int j) {
  double w = m.x.h();
  if (i == 0 || i == m.lines() - 1) w *= 0.5;
  if (m.is_strip()) {
    double wy = m.hy;
    if (j == 0 || j == m.ny - 1) wy *= 0.5;
    w *= wy;
  }
  return w;
}

inline double mass(const Field& u, const Mesh& m) {
  double s = 0;
  for (int i = 0; i < m.lines(); ++i)
    for (int j = 0; j < m.ny; ++j) s += trapezoid_weight(m, i, j) * u(i, j);
  return s;
}

// Trapezoidal double-well term plus eps^2/2 |grad u|^2 with the gradient taken
// as a midpoint difference on each cell edge.
inline double energy(const Field& u, const Params& p, const Mesh& m) {
  const double e2 = p.epsilon * p.epsilon;
  double bulk = 0, grad = 0;
  for (int i = 0; i < m.lines(); ++i) {
    for (int j = 0; j < m.ny; ++j) {
      const double q = u(i, j) * u(i, j) - 1.0;
      bulk += trapezoid_weight(m, i, j) * 0.25 * q * q;
    }
  }
  const double hx = m.x.h();
  for (int i = 0; i + 1 < m.lines(); ++i) {
    for (int j = 0; j < m.ny; ++j) {
      double wy = 1.0;
      if (m.is_strip()) wy = (j == 0 || j == m.ny - 1) ? 0.5 * m.hy : m.hy;
      const double d = (u(i + 1, j) - u(i, j)) / hx;
      grad += wy * hx * d * d;
    }
  }
  if (m.is_strip()) {
    for (int i = 0; i < m.lines(); ++i) {
      const double wx = (i == 0 || i == m.lines() - 1) ? 0.5 * hx : hx;
      for (int j = 0; j + 1 < m.ny; ++j) {
        const double d = (u(i, j + 1) - u(i, j)) / m.hy;
        grad += wx * m.hy * d * d;
      }
    }
  }
  return bulk + 0.5 * e2 * grad;
}

// Norm used for iteration counts: nodal max on lines, cell-area weighted
// discrete L2 on strips. Pieces are added line by line so a composite field
// counts every global line once.
class ErrorNorm {
 public:
  explicit ErrorNorm(const Mesh& m) : strip_(m.is_strip()), measure_(m.cell_measure()) {}

  // Lines [from, to] of a local field whose line 0 is global line offset.
  void add(const Field& a, const Field& ref, int offset, int from, int to) {
    for (int i = from; i <= to; ++i)
      for (int j = 0; j < a.ny; ++j) {
        const double d = a(i, j) - ref(offset + i, j);
        if (strip_) {
          acc_ += d * d;
        } else {
          acc_ = std::max(acc_, std::abs(d));
        }
      }
  }
  void add_values(std::span<const double> a, std::span<const double> ref) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = a[k] - ref[k];
      if (strip_) {
        acc_ += d * d;
      } else {
        acc_ = std::max(acc_, std::abs(d));
      }
    }
  }
  double value() const { return strip_ ? std::sqrt(acc_ * measure_) : acc_; }

 private:
  bool strip_;
  double measure_;
  double acc_ = 0.0;
};

}  // namespace chdd
