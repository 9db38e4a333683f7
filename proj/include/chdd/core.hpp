#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chdd {

// Raised for malformed inputs (exit code 2 in the command line tool).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a linear solve fails outright.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

struct Params {
  double epsilon = 0.01;
  double delta_t = 1e-6;
  double c = 1.0;
  double theta = 0.5;

  void validate() const {
    require(std::isfinite(epsilon) && epsilon > 0, "epsilon must be positive");
    require(std::isfinite(delta_t) && delta_t > 0, "delta_t must be positive");
    require(std::isfinite(c), "c must be finite");
    require(std::isfinite(theta) && theta > 0 && theta < 1, "theta must lie in (0,1)");
  }

  // c^4 dt^2 - 4 eps^2 dt, factored to limit cancellation.
  double discriminant() const {
    const double c2 = c * c;
    return delta_t * (c2 * c2 * delta_t - 4.0 * epsilon * epsilon);
  }

  // Real symbols iff dt > 4 eps^2 / c^4.
  bool is_real_symbol() const { return discriminant() > 0.0; }
};

class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double x_left, double x_right, int n_cells)
      : x_left_(x_left), x_right_(x_right), n_cells_(n_cells) {
    require(std::isfinite(x_left) && std::isfinite(x_right) && x_right > x_left,
            "grid extent must satisfy x_left < x_right");
    require(n_cells >= 2, "grid needs at least two cells");
    h_ = (x_right - x_left) / n_cells;
  }

  // Spacing must divide the extent (up to rounding).
  static Grid1D with_spacing(double x_left, double x_right, double h) {
    require(std::isfinite(h) && h > 0, "spacing must be positive");
    const double cells = (x_right - x_left) / h;
    const double n = std::round(cells);
    require(n >= 2 && std::abs(cells - n) < 1e-8 * std::max(1.0, n),
            "spacing does not divide the domain length");
    return Grid1D(x_left, x_right, static_cast<int>(n));
  }

  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  double length() const { return x_right_ - x_left_; }
  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_cells_ + 1; }
  double h() const { return h_; }
  double node(int i) const { return i == n_cells_ ? x_right_ : x_left_ + i * h_; }

  int nearest_node(double x) const {
    const double s = (x - x_left_) / h_;
    return static_cast<int>(std::clamp(std::lround(s), 0L, static_cast<long>(n_cells_)));
  }

 private:
  double x_left_ = 0.0;
  double x_right_ = 1.0;
  int n_cells_ = 2;
  double h_ = 0.5;
};

enum class YBoundary { neumann, dirichlet };

class Grid2D {
 public:
  Grid2D() = default;
  Grid2D(Grid1D x, double y_bottom, double y_top, int n_y, YBoundary y_bc = YBoundary::neumann)
      : x_(x), y_(y_bottom, y_top, n_y), y_bc_(y_bc) {}

  const Grid1D& x_axis() const { return x_; }
  const Grid1D& y_axis() const { return y_; }
  double hx() const { return x_.h(); }
  double hy() const { return y_.h(); }
  int ny_nodes() const { return y_.n_nodes(); }
  YBoundary y_bc() const { return y_bc_; }

 private:
  Grid1D x_;
  Grid1D y_;
  YBoundary y_bc_ = YBoundary::neumann;
};

// What the discrete operator sees: an x grid of lines, each line carrying
// ny transverse nodes. A 1D problem is a single node per line; a Fourier
// mode of a strip problem is a 1D line with a transverse shift -p^2.
struct Mesh {
  Grid1D x;
  int ny = 1;
  double hy = 0.0;
  double y_bottom = 0.0;
  YBoundary y_bc = YBoundary::neumann;
  double shift = 0.0;

  static Mesh line(const Grid1D& g) { return Mesh{g}; }
  static Mesh strip(const Grid2D& g) {
    Mesh m{g.x_axis()};
    m.ny = g.ny_nodes();
    m.hy = g.hy();
    m.y_bottom = g.y_axis().x_left();
    m.y_bc = g.y_bc();
    return m;
  }
  static Mesh mode(const Grid1D& g, double p2) {
    Mesh m{g};
    m.shift = p2;
    return m;
  }

  bool is_strip() const { return ny > 1; }
  int lines() const { return x.n_nodes(); }
  double y(int j) const { return y_bottom + j * hy; }
  bool y_fixed(int j) const {
    return is_strip() && y_bc == YBoundary::dirichlet && (j == 0 || j == ny - 1);
  }
  // Nodal weight for discrete L2 norms.
  double cell_measure() const { return is_strip() ? x.h() * hy : x.h(); }

  // Sub-mesh spanning lines [first, last] of this one.
  Mesh restrict_lines(int first, int last) const {
    Mesh m = *this;
    m.x = Grid1D(x.node(first), x.node(last), last - first);
    return m;
  }
};

// Nodal values, line-major: value(i, j) with i the x line, j the y node.
struct Field {
  int nx = 0;
  int ny = 1;
  std::vector<double> values;

  Field() = default;
  Field(int nx_, int ny_, double fill = 0.0)
      : nx(nx_), ny(ny_), values(static_cast<std::size_t>(nx_) * ny_, fill) {}
  explicit Field(const Mesh& m, double fill = 0.0) : Field(m.lines(), m.ny, fill) {}

  double& operator()(int i, int j = 0) { return values[static_cast<std::size_t>(i) * ny + j]; }
  double operator()(int i, int j = 0) const {
    return values[static_cast<std::size_t>(i) * ny + j];
  }
  std::span<const double> line(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * ny, static_cast<std::size_t>(ny)};
  }
  std::vector<double> line_copy(int i) const {
    auto s = line(i);
    return {s.begin(), s.end()};
  }
  Field restrict_lines(int first, int last) const {
    Field f(last - first + 1, ny);
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(first) * ny,
              values.begin() + static_cast<std::ptrdiff_t>(last + 1) * ny, f.values.begin());
    return f;
  }
};

template <class F>
Field sample(const Mesh& m, F&& f) {
  Field out(m);
  for (int i = 0; i < m.lines(); ++i)
    for (int j = 0; j < m.ny; ++j) out(i, j) = f(m.x.node(i), m.y(j));
  return out;
}

struct PhaseField {
  Field u;
  Field v;
};

// Breakpoints snapped to grid nodes: node(0) = 0, node(N) = last node.
class Decomposition {
 public:
  Decomposition() = default;
  Decomposition(const Grid1D& grid, std::vector<int> nodes) : grid_(grid), nodes_(std::move(nodes)) {
    require(nodes_.size() >= 3, "a decomposition needs at least two subdomains");
    require(nodes_.front() == 0 && nodes_.back() == grid.n_cells(),
            "decomposition must span the whole grid");
    for (std::size_t k = 1; k < nodes_.size(); ++k)
      require(nodes_[k] > nodes_[k - 1], "breakpoints collapse onto the same grid node");
  }

  const Grid1D& grid() const { return grid_; }
  int subdomains() const { return static_cast<int>(nodes_.size()) - 1; }
  int interfaces() const { return subdomains() - 1; }
  int node(int k) const { return nodes_[k]; }
  const std::vector<int>& nodes() const { return nodes_; }
  double breakpoint(int k) const { return grid_.node(nodes_[k]); }
  double width(int i) const { return breakpoint(i + 1) - breakpoint(i); }
  std::vector<double> widths() const {
    std::vector<double> w(subdomains());
    for (int i = 0; i < subdomains(); ++i) w[i] = width(i);
    return w;
  }
  double d_min() const {
    auto w = widths();
    return *std::min_element(w.begin(), w.end());
  }

 private:
  Grid1D grid_;
  std::vector<int> nodes_;
};

// Breakpoints include both domain ends.
inline Decomposition snap_decomposition(std::span<const double> breakpoints, const Grid1D& grid) {
  require(breakpoints.size() >= 3, "need at least one interior breakpoint");
  const double tol = 0.5 * grid.h();
  require(std::abs(breakpoints.front() - grid.x_left()) <= tol &&
              std::abs(breakpoints.back() - grid.x_right()) <= tol,
          "breakpoints must start and end at the domain boundary");
  std::vector<int> nodes;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const double x = breakpoints[k];
    require(std::isfinite(x), "breakpoint is not finite");
    if (k > 0) require(x > breakpoints[k - 1], "breakpoints must be strictly increasing");
    nodes.push_back(grid.nearest_node(x));
  }
  return Decomposition(grid, std::move(nodes));
}

// N subdomains; widths proportional to the given weights.
inline Decomposition weighted_decomposition(const Grid1D& grid, std::span<const double> weights) {
  double total = 0;
  for (double w : weights) {
    require(w > 0, "subdomain weights must be positive");
    total += w;
  }
  std::vector<double> bp{grid.x_left()};
  double acc = 0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    bp.push_back(grid.x_left() + grid.length() * acc / total);
  }
  bp.push_back(grid.x_right());
  return snap_decomposition(bp, grid);
}

inline Decomposition equal_decomposition(const Grid1D& grid, int n) {
  require(n >= 2, "need at least two subdomains");
  std::vector<double> w(n, 1.0);
  return weighted_decomposition(grid, w);
}

// Widths d, 2d, d, 2d, ... scaled to fill the domain.
inline Decomposition alternating_decomposition(const Grid1D& grid, int n) {
  require(n >= 2, "need at least two subdomains");
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = (i % 2 == 0) ? 1.0 : 2.0;
  return weighted_decomposition(grid, w);
}

struct Trace {
  std::vector<double> g;
  std::vector<double> h;
};

struct TraceSet {
  std::vector<Trace> interfaces;
  int size() const { return static_cast<int>(interfaces.size()); }
  Trace& operator[](int i) { return interfaces[i]; }
  const Trace& operator[](int i) const { return interfaces[i]; }
};

// Uniform on [-amplitude, amplitude], one mt19937_64 stream per call.
inline TraceSet random_traces(const Decomposition& d, int trace_length, std::uint64_t seed,
                              double amplitude = 1.0) {
  require(trace_length >= 1, "trace length must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  TraceSet t;
  t.interfaces.resize(d.interfaces());
  for (auto& tr : t.interfaces) {
    tr.g.resize(trace_length);
    tr.h.resize(trace_length);
    for (auto& x : tr.g) x = dist(rng);
    for (auto& x : tr.h) x = dist(rng);
  }
  return t;
}

}  // namespace chdd
