#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <tuple>
#include <vector>

#include "chdd/dn.hpp"
#include "chdd/nn.hpp"

namespace chdd {

// Eigenvectors of the transverse discrete Laplacian: sines for Dirichlet
// walls (modes 1..n-1), cosines for Neumann walls (modes 0..n).
class TransverseBasis {
 public:
  explicit TransverseBasis(const Mesh& m) : bc_(m.y_bc), n_(m.ny - 1), hy_(m.hy) {
    require(m.is_strip(), "transverse basis needs a strip mesh");
    if (bc_ == YBoundary::dirichlet) {
      for (int k = 1; k < n_; ++k) modes_.push_back(k);
    } else {
      for (int k = 0; k <= n_; ++k) modes_.push_back(k);
    }
  }

  const std::vector<int>& modes() const { return modes_; }
  int size() const { return static_cast<int>(modes_.size()); }

  double vector(int m, int j) const {
    const double a = std::numbers::pi * m * j / n_;
    return bc_ == YBoundary::dirichlet ? std::sin(a) : std::cos(a);
  }

  // -(discrete transverse Laplacian) eigenvalue of mode m.
  double symbol(int m) const {
    const double s = std::sin(std::numbers::pi * m / (2.0 * n_));
    return 4.0 / (hy_ * hy_) * s * s;
  }

  std::vector<double> forward(std::span<const double> w) const {
    std::vector<double> out(size());
    for (int k = 0; k < size(); ++k) {
      const int m = modes_[k];
      double s = 0;
      for (int j = 0; j <= n_; ++j) {
        const double wt = (j == 0 || j == n_) ? 0.5 : 1.0;
        s += wt * w[j] * vector(m, j);
      }
      double scale = 2.0 / n_;
      if (bc_ == YBoundary::neumann && (m == 0 || m == n_)) scale *= 0.5;
      out[k] = scale * s;
    }
    return out;
  }

  std::vector<double> inverse(std::span<const double> coeffs) const {
    std::vector<double> out(n_ + 1, 0.0);
    for (int k = 0; k < size(); ++k)
      for (int j = 0; j <= n_; ++j) out[j] += coeffs[k] * vector(modes_[k], j);
    return out;
  }

 private:
  YBoundary bc_;
  int n_;
  double hy_;
  std::vector<int> modes_;
};

namespace detail {

// One line problem per transverse mode. c must not vary along y.
inline std::vector<std::unique_ptr<Problem>> modal_problems(const Problem& strip, const TransverseBasis& b) {
  const Mesh& m = strip.mesh;
  for (int i = 0; i < m.lines(); ++i)
    for (int j = 1; j < m.ny; ++j)
      require(strip.c(i, j) == strip.c(i, 0), "mode decomposition needs c independent of y");
  std::vector<std::unique_ptr<Problem>> out;
  std::vector<std::vector<double>> fu(m.lines()), fv(m.lines());
  for (int i = 0; i < m.lines(); ++i) {
    fu[i] = b.forward(strip.fu.line(i));
    fv[i] = b.forward(strip.fv.line(i));
  }
  for (int k = 0; k < b.size(); ++k) {
    const Mesh mm = Mesh::mode(m.x, b.symbol(b.modes()[k]));
    Field c(mm), u(mm), v(mm);
    for (int i = 0; i < m.lines(); ++i) {
      c(i) = strip.c(i, 0);
      u(i) = fu[i][k];
      v(i) = fv[i][k];
    }
    out.push_back(std::make_unique<Problem>(Problem::make(mm, strip.params, c, u, v)));
  }
  return out;
}

inline Field assemble_strip(const TransverseBasis& b, const std::vector<const Field*>& per_mode, int ny) {
  const int nx = per_mode.front()->nx;
  Field out(nx, ny);
  std::vector<double> coeffs(b.size());
  for (int i = 0; i < nx; ++i) {
    for (int k = 0; k < b.size(); ++k) coeffs[k] = (*per_mode[k])(i);
    const auto w = b.inverse(coeffs);
    for (int j = 0; j < ny; ++j) out(i, j) = w[j];
  }
  return out;
}

inline std::pair<std::vector<double>, std::vector<double>> transform_trace(const TransverseBasis& b,
                                                                           const Trace& t) {
  return {b.forward(t.g), b.forward(t.h)};
}

}  // namespace detail

// Dirichlet-Neumann on a strip, one line problem per transverse mode.
class ModalDN {
 public:
  struct Sweep {
    PhaseField dirichlet;
    PhaseField neumann;
    Trace next;
  };

  ModalDN(const Problem& strip, const Decomposition& d, bool swap = false)
      : basis_(strip.mesh), ny_(strip.mesh.ny) {
    problems_ = detail::modal_problems(strip, basis_);
    for (const auto& p : problems_) solvers_.push_back(std::make_unique<DNSolver>(*p, d, swap));
  }

  const TransverseBasis& basis() const { return basis_; }

  Sweep sweep(const Trace& t, double theta, bool with_rhs = true) const {
    const auto [gh, hh] = detail::transform_trace(basis_, t);
    std::vector<DNSolver::Sweep> per(basis_.size());
    std::vector<double> ng(basis_.size()), nh(basis_.size());
    for (int k = 0; k < basis_.size(); ++k) {
      per[k] = solvers_[k]->sweep(Trace{{gh[k]}, {hh[k]}}, theta, with_rhs);
      ng[k] = per[k].next.g[0];
      nh[k] = per[k].next.h[0];
    }
    auto pick = [&](auto member) {
      std::vector<const Field*> f;
      for (const auto& s : per) f.push_back(&member(s));
      return detail::assemble_strip(basis_, f, ny_);
    };
    Sweep out;
    out.dirichlet.u = pick([](const DNSolver::Sweep& s) -> const Field& { return s.dirichlet.u; });
    out.dirichlet.v = pick([](const DNSolver::Sweep& s) -> const Field& { return s.dirichlet.v; });
    out.neumann.u = pick([](const DNSolver::Sweep& s) -> const Field& { return s.neumann.u; });
    out.neumann.v = pick([](const DNSolver::Sweep& s) -> const Field& { return s.neumann.v; });
    out.next = Trace{basis_.inverse(ng), basis_.inverse(nh)};
    return out;
  }

 private:
  TransverseBasis basis_;
  int ny_;
  std::vector<std::unique_ptr<Problem>> problems_;
  std::vector<std::unique_ptr<DNSolver>> solvers_;
};

// Neumann-Neumann on a strip, one line problem per transverse mode.
class ModalNN {
 public:
  ModalNN(const Problem& strip, const Decomposition& d) : basis_(strip.mesh), ny_(strip.mesh.ny) {
    problems_ = detail::modal_problems(strip, basis_);
    for (const auto& p : problems_) solvers_.push_back(std::make_unique<NNSolver>(*p, d));
  }

  const TransverseBasis& basis() const { return basis_; }

  // Next traces and the Dirichlet-step fields.
  std::pair<TraceSet, std::vector<PhaseField>> sweep(const TraceSet& t, double theta, bool with_rhs = true) const {
    const int ni = t.size();
    std::vector<std::vector<double>> gh(ni), hh(ni);
    for (int i = 0; i < ni; ++i) std::tie(gh[i], hh[i]) = detail::transform_trace(basis_, t[i]);
    std::vector<NNSolver::Sweep> per(basis_.size());
    for (int k = 0; k < basis_.size(); ++k) {
      TraceSet tk;
      for (int i = 0; i < ni; ++i) tk.interfaces.push_back(Trace{{gh[i][k]}, {hh[i][k]}});
      per[k] = solvers_[k]->sweep(tk, theta, with_rhs);
    }
    TraceSet next;
    for (int i = 0; i < ni; ++i) {
      std::vector<double> ng(basis_.size()), nh(basis_.size());
      for (int k = 0; k < basis_.size(); ++k) {
        ng[k] = per[k].next[i].g[0];
        nh[k] = per[k].next[i].h[0];
      }
      next.interfaces.push_back(Trace{basis_.inverse(ng), basis_.inverse(nh)});
    }
    std::vector<PhaseField> dir;
    for (int s = 0; s < static_cast<int>(per.front().dirichlet.size()); ++s) {
      std::vector<const Field*> fu, fv;
      for (const auto& p : per) {
        fu.push_back(&p.dirichlet[s].u);
        fv.push_back(&p.dirichlet[s].v);
      }
      dir.push_back(PhaseField{detail::assemble_strip(basis_, fu, ny_), detail::assemble_strip(basis_, fv, ny_)});
    }
    return {std::move(next), std::move(dir)};
  }

 private:
  TransverseBasis basis_;
  int ny_;
  std::vector<std::unique_ptr<Problem>> problems_;
  std::vector<std::unique_ptr<NNSolver>> solvers_;
};

}  // namespace chdd
