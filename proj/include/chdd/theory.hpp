#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "chdd/core.hpp"

namespace chdd {

using cplx = std::complex<double>;

// Roots of eps^2 dt L^2 - c^2 dt L + 1 = 0 and the square roots
// xi = sqrt(L + p^2) for a transverse frequency p.
struct SymbolSet {
  double epsilon = 0, delta_t = 0, c = 0, p2 = 0;
  bool real_regime = false;
  cplx lambda1, lambda2, lambda;  // lambda = lambda1 - lambda2
  cplx xi1, xi3;
  std::array<cplx, 2> mu1, mu3;  // eigenvectors (dt L, 1)

  // Residual of det(symbol) at xi, relative to the size of its terms.
  double determinant_residual(cplx xi) const {
    const cplx l = xi * xi - p2;
    const cplx a = epsilon * epsilon * delta_t * l * l;
    const cplx b = c * c * delta_t * l;
    return std::abs(a - b + 1.0) / (std::abs(a) + std::abs(b) + 1.0);
  }
};

inline SymbolSet symbols(const Params& p, double p2 = 0.0) {
  require(std::isfinite(p.epsilon) && p.epsilon > 0 && std::isfinite(p.delta_t) && p.delta_t > 0 &&
              std::isfinite(p.c),
          "symbols need positive epsilon and delta_t");
  require(p2 >= 0 && std::isfinite(p2), "transverse frequency must be real");
  SymbolSet s;
  s.epsilon = p.epsilon;
  s.delta_t = p.delta_t;
  s.c = p.c;
  s.p2 = p2;
  const double e2dt = p.epsilon * p.epsilon * p.delta_t;
  const double disc = p.discriminant();
  const double c2dt = p.c * p.c * p.delta_t;
  s.real_regime = disc > 0;
  if (s.real_regime) {
    const double l1 = (c2dt + std::sqrt(disc)) / (2 * e2dt);
    s.lambda1 = l1;
    s.lambda2 = 1.0 / (e2dt * l1);
  } else {
    const double re = c2dt / (2 * e2dt);
    const double im = std::sqrt(-disc) / (2 * e2dt);
    s.lambda1 = {re, im};
    s.lambda2 = {re, -im};
  }
  s.lambda = s.lambda1 - s.lambda2;
  s.xi1 = std::sqrt(s.lambda1 + p2);
  s.xi3 = std::sqrt(s.lambda2 + p2);
  s.mu1 = {p.delta_t * s.lambda1, 1.0};
  s.mu3 = {p.delta_t * s.lambda2, 1.0};
  return s;
}

// Mode m of a strip of height L with sine modes: p = m pi / L.
inline SymbolSet symbols_mode(const Params& p, int m, double L) {
  require(m >= 0 && L > 0, "mode index and strip height must be valid");
  const double pm = m * std::numbers::pi / L;
  return symbols(p, pm * pm);
}

namespace hyp {

// Hyperbolic functions in a form that neither overflows nor loses the
// small-argument behaviour. Arguments have nonnegative real part.
inline cplx tanh(cplx z) {
  if (std::abs(z) < 0.5) return std::tanh(z);
  const cplx e = std::exp(-2.0 * z);
  return (1.0 - e) / (1.0 + e);
}
inline cplx coth(cplx z) { return 1.0 / tanh(z); }
inline cplx csch(cplx z) {
  if (std::abs(z) < 0.5) return 1.0 / std::sinh(z);
  const cplx e = std::exp(-2.0 * z);
  return 2.0 * std::exp(-z) / (1.0 - e);
}
inline cplx sech(cplx z) {
  if (std::abs(z) < 0.5) return 1.0 / std::cosh(z);
  const cplx e = std::exp(-2.0 * z);
  return 2.0 * std::exp(-z) / (1.0 + e);
}

}  // namespace hyp

// ---- Dirichlet-Neumann -------------------------------------------------

struct DNMatrix {
  Eigen::Matrix2d H;
  cplx rho1, rho2;  // tanh(xi a) coth(xi b)
  double max_imag = 0;
  std::array<cplx, 2> eigenvalues() const;
};

inline std::array<cplx, 2> eig2(const Eigen::Matrix2d& m) {
  const cplx tr = m.trace();
  const cplx det = m.determinant();
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

inline std::array<cplx, 2> DNMatrix::eigenvalues() const { return eig2(H); }

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// a is the width of the Dirichlet subdomain, b of the Neumann one.
inline DNMatrix dn_iteration_matrix(const SymbolSet& s, double a, double b, double theta) {
  require(a > 0 && b > 0, "subdomain widths must be positive");
  require(std::abs(s.lambda) > 0, "degenerate symbol: lambda1 == lambda2");
  DNMatrix out;
  out.rho1 = hyp::tanh(s.xi1 * a) * hyp::coth(s.xi1 * b);
  out.rho2 = hyp::tanh(s.xi3 * a) * hyp::coth(s.xi3 * b);
  const cplx l1 = s.lambda1, l2 = s.lambda2, l = s.lambda, r1 = out.rho1, r2 = out.rho2;
  const double dt = s.delta_t;
  const std::array<cplx, 4> h{1.0 - theta + theta * (-l1 * r1 + l2 * r2) / l,
                              theta * dt * l1 * l2 * (r1 - r2) / l, theta * (r2 - r1) / (dt * l),
                              1.0 - theta + theta * (l2 * r1 - l1 * r2) / l};
  out.H << h[0].real(), h[1].real(), h[2].real(), h[3].real();
  for (const auto& x : h) out.max_imag = std::max(out.max_imag, std::abs(x.imag()));
  return out;
}

// Same matrix assembled as P diag(1 - theta - theta rho) P^{-1}.
inline Eigen::Matrix2d dn_iteration_matrix_eigenbasis(const SymbolSet& s, double a, double b, double theta) {
  const cplx r1 = hyp::tanh(s.xi1 * a) * hyp::coth(s.xi1 * b);
  const cplx r2 = hyp::tanh(s.xi3 * a) * hyp::coth(s.xi3 * b);
  Eigen::Matrix2cd P;
  P << s.mu1[0], s.mu3[0], s.mu1[1], s.mu3[1];
  Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
  D(0, 0) = 1.0 - theta - theta * r1;
  D(1, 1) = 1.0 - theta - theta * r2;
  return (P * D * P.inverse()).real();
}

struct DNBound {
  double factor;
  bool switch_recommended;  // bound exceeds 1: use the other subdomain for the Dirichlet step
};

// Contraction factor at theta = 1/2 for Dirichlet width a, Neumann width b.
inline DNBound dn_contraction_bound(const Params& p, double a, double b) {
  require(a > 0 && b > 0, "subdomain widths must be positive");
  if (p.is_real_symbol()) return {std::abs(b - a) / (2 * b), a > 3 * b};
  return {std::abs(b - a) / (std::numbers::sqrt2 * b), a > (1 + std::numbers::sqrt2) * b};
}

// ---- Neumann-Neumann ---------------------------------------------------

// Interface i (1-based) ordering: (g_1, h_1, g_2, h_2, ...).
struct NNMatrix {
  Eigen::MatrixXd T;
  std::vector<double> widths;
  double theta = 0;
  double max_imag = 0;
  // Coefficients of row g_i (alpha) and h_i (beta) over interfaces
  // max(1, i-2) .. min(N-1, i+2), interleaved (g, h).
  std::vector<std::vector<double>> alpha, beta;
  std::vector<int> row_length;

  int interfaces() const { return static_cast<int>(widths.size()) - 1; }
  double inf_norm() const { return T.cwiseAbs().rowwise().sum().maxCoeff(); }
};

namespace detail {

inline void fill_rows(NNMatrix& m) {
  const int n = m.interfaces();
  m.alpha.assign(n, {});
  m.beta.assign(n, {});
  m.row_length.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 2), hi = std::min(n - 1, i + 2);
    for (int l = lo; l <= hi; ++l) {
      m.alpha[i].push_back(m.T(2 * i, 2 * l));
      m.alpha[i].push_back(m.T(2 * i, 2 * l + 1));
      m.beta[i].push_back(m.T(2 * i + 1, 2 * l));
      m.beta[i].push_back(m.T(2 * i + 1, 2 * l + 1));
    }
    m.row_length[i] = 2 * (hi - lo + 1);
  }
}

// Combine the scalar matrices M1 (for xi1) and M3 (for xi3) through the
// eigenvector basis (dt L1, 1), (dt L2, 1).
inline NNMatrix combine(const SymbolSet& s, const Eigen::MatrixXcd& M1, const Eigen::MatrixXcd& M3,
                        std::vector<double> widths, double theta) {
  const int n = static_cast<int>(M1.rows());
  const cplx l1 = s.lambda1, l2 = s.lambda2, l = s.lambda;
  const double dt = s.delta_t;
  NNMatrix out;
  out.widths = std::move(widths);
  out.theta = theta;
  out.T.resize(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cplx m1 = M1(i, k), m3 = M3(i, k);
      const std::array<cplx, 4> e{(l1 * m1 - l2 * m3) / l, dt * l1 * l2 * (m3 - m1) / l, (m1 - m3) / (dt * l),
                                  (l1 * m3 - l2 * m1) / l};
      out.T(2 * i, 2 * k) = e[0].real();
      out.T(2 * i, 2 * k + 1) = e[1].real();
      out.T(2 * i + 1, 2 * k) = e[2].real();
      out.T(2 * i + 1, 2 * k + 1) = e[3].real();
      for (const auto& x : e) out.max_imag = std::max(out.max_imag, std::abs(x.imag()));
    }
  fill_rows(out);
  return out;
}

// Scalar sweep map for w'' = xi^2 w: trace increments K with M = I - theta K.
inline Eigen::MatrixXcd scalar_sweep(cplx xi, const std::vector<double>& d, double theta) {
  const int N = static_cast<int>(d.size());
  const int n = N - 1;
  std::vector<cplx> cth(N), csh(N), th(N);
  for (int i = 0; i < N; ++i) {
    cth[i] = hyp::coth(xi * d[i]);
    csh[i] = hyp::csch(xi * d[i]);
    th[i] = hyp::tanh(xi * d[i]);
  }
  // Flux jump per unit xi as a function of the traces.
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
  // Neumann correction difference per unit 1/xi as a function of the jumps.
  Eigen::MatrixXcd Phi = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const cplx left = i == 0 ? th[0] : cth[i];
    const cplx right = i + 1 == N - 1 ? th[N - 1] : cth[i + 1];
    J(i, i) = left + right;
    Phi(i, i) = cth[i] + cth[i + 1];
    if (i > 0) {
      J(i, i - 1) = -csh[i];
      Phi(i, i - 1) = -csh[i];
    }
    if (i + 1 < n) {
      J(i, i + 1) = -csh[i + 1];
      Phi(i, i + 1) = -csh[i + 1];
    }
  }
  return Eigen::MatrixXcd::Identity(n, n) - theta * (Phi * J);
}

}  // namespace detail

// Closed form of one Neumann-Neumann error sweep on N >= 3 subdomains.
inline NNMatrix nn_iteration_matrix(const SymbolSet& s, const std::vector<double>& widths, double theta) {
  require(widths.size() >= 3, "iteration matrix needs at least three subdomains");
  for (double w : widths) require(w > 0, "subdomain widths must be positive");
  require(std::abs(s.lambda) > 0, "degenerate symbol: lambda1 == lambda2");
  return detail::combine(s, detail::scalar_sweep(s.xi1, widths, theta), detail::scalar_sweep(s.xi3, widths, theta),
                         widths, theta);
}

// Entry-by-entry coefficient tables for the same matrix. `as_printed` keeps
// several known misprints; `corrected` fixes them.
enum class TableVariant { as_printed, corrected };

inline NNMatrix nn_iteration_matrix_tables(const SymbolSet& s, const std::vector<double>& widths, double theta,
                                           TableVariant variant) {
  const int N = static_cast<int>(widths.size());
  require(N >= 5, "coefficient tables need at least five subdomains");
  const bool fix = variant == TableVariant::corrected;
  const cplx l1 = s.lambda1, l2 = s.lambda2, l = s.lambda;
  const double dt = s.delta_t;

  // Upsilon^k_{j,i} for xi_j, 1-based subdomain index i.
  auto upsilon = [&](cplx xi) {
    // sigma and gamma only ever appear in ratios; form them from scaled
    // functions to avoid overflow.
    auto ct = [&](int i) { return hyp::coth(xi * widths[i - 1]); };
    auto cs = [&](int i) { return hyp::csch(xi * widths[i - 1]); };
    auto tn = [&](int i) { return hyp::tanh(xi * widths[i - 1]); };
    // rows[i][offset+2] for offsets -2..2
    std::vector<std::array<cplx, 5>> rows(N, std::array<cplx, 5>{});
    // Row 1.
    rows[1][2] = 1.0 + tn(1) * ct(2) + ct(1) * ct(2) + ct(2) * ct(2) + cs(2) * cs(2);
    rows[1][3] = (fix ? ct(1) * cs(2) : ct(1) * cs(1)) + 2.0 * ct(2) * cs(2) + ct(3) * cs(2);
    rows[1][4] = cs(2) * cs(3);
    // Row 2.
    rows[2][1] = tn(1) * cs(2) + 2.0 * ct(2) * cs(2) + ct(3) * cs(2);
    rows[2][2] = ct(2) * ct(2) + 2.0 * ct(2) * ct(3) + ct(3) * ct(3) + cs(2) * cs(2) + cs(3) * cs(3);
    rows[2][3] = 2.0 * ct(3) * cs(3) + ct(2) * cs(3) + ct(4) * cs(3);
    rows[2][4] = cs(3) * cs(4);
    // Generic rows 3 .. N-3.
    for (int i = 3; i <= N - 3; ++i) {
      rows[i][0] = cs(i - 1) * cs(i);
      rows[i][1] = 2.0 * ct(i) * cs(i) + ct(i - 1) * cs(i) + ct(i + 1) * cs(i);
      rows[i][2] = ct(i) * ct(i) + 2.0 * ct(i) * ct(i + 1) + ct(i + 1) * ct(i + 1) + cs(i) * cs(i) +
                   cs(i + 1) * cs(i + 1);
      rows[i][3] = 2.0 * ct(i + 1) * cs(i + 1) + ct(i) * cs(i + 1) + ct(i + 2) * cs(i + 1);
      rows[i][4] = cs(i + 1) * cs(i + 2);
    }
    // Row N-2.
    {
      const int i = N - 2;
      rows[i][0] = cs(i - 1) * cs(i);
      rows[i][1] = 2.0 * ct(i) * cs(i) + ct(i - 1) * cs(i) + ct(i + 1) * cs(i);
      rows[i][2] = ct(i) * ct(i) + 2.0 * ct(i) * ct(i + 1) + ct(i + 1) * ct(i + 1) + cs(i) * cs(i) +
                   cs(i + 1) * cs(i + 1);
      rows[i][3] = 2.0 * ct(N - 1) * cs(N - 1) + ct(N - 2) * cs(N - 1) + tn(N) * cs(N - 1);
    }
    // Row N-1.
    {
      const int i = N - 1;
      rows[i][0] = cs(N - 2) * cs(N - 1);
      rows[i][1] = 2.0 * ct(N - 1) * cs(N - 1) + ct(N - 2) * cs(N - 1) + ct(N) * cs(N - 1);
      rows[i][2] = 1.0 + ct(N - 1) * ct(N - 1) + ct(N - 1) * ct(N) + cs(N - 1) * cs(N - 1) +
                   (fix ? tn(N) * ct(N - 1) : tn(N - 1) * tn(N));
    }
    return rows;
  };
  const auto U1 = upsilon(s.xi1);
  const auto U3 = upsilon(s.xi3);

  const int n = N - 1;
  NNMatrix out;
  out.widths = widths;
  out.theta = theta;
  out.T = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 1; i <= n; ++i) {
    for (int o = -2; o <= 2; ++o) {
      const int k = i + o;
      if (k < 1 || k > n) continue;
      const cplx y1 = U1[i][o + 2], y3 = U3[i][o + 2];
      // Even offsets enter with +Upsilon, odd offsets with -Upsilon.
      const double sg = (o % 2 == 0) ? 1.0 : -1.0;
      std::array<cplx, 4> e{sg * (-(l1 / l) * y1 + (l2 / l) * y3), sg * (dt * l1 * l2 / l) * (y1 - y3),
                            sg * (-1.0 / (dt * l)) * (y1 - y3), sg * ((l2 / l) * y1 - (l1 / l) * y3)};
      if (!fix) {
        if (i >= 3 && i <= N - 3 && o == -1) e[3] = -(l2 / l) * y1 + (l2 / l) * y3;
        if (i == 2 && o == 0) {
          e[1] = -e[1];
          e[3] = -e[3];
        }
      }
      for (int q = 0; q < 4; ++q) e[q] *= theta;
      if (o == 0) {
        e[0] += 1.0;
        e[3] += 1.0;
      }
      const int r = 2 * (i - 1), c = 2 * (k - 1);
      out.T(r, c) = e[0].real();
      out.T(r, c + 1) = e[1].real();
      out.T(r + 1, c) = e[2].real();
      out.T(r + 1, c + 1) = e[3].real();
      for (const auto& x : e) out.max_imag = std::max(out.max_imag, std::abs(x.imag()));
    }
  }
  detail::fill_rows(out);
  return out;
}

// ---- convergence constants ---------------------------------------------

enum class BoundStatus { provided, not_provided };

struct BoundSet {
  BoundStatus status = BoundStatus::not_provided;
  // Equal widths (1D) or their strip counterparts (2D, per-iteration factor
  // on the squared L2 norm).
  double alpha = 0, beta = 0, d_threshold = 0;
  // Unequal widths: constants with d_min, and the width threshold with the
  // 10 coefficient and with the 11 coefficient that matches the constants.
  double alpha_unequal = 0, beta_unequal = 0, d_threshold_unequal = 0, d_threshold_unequal_11 = 0;
  bool equal_widths = true;
  bool converged_by_theory = false;
  double contraction() const { return std::max(alpha, beta); }
};

// dimension 1: widths are the subdomain widths; dimension 2 additionally uses
// the strip height L for the lowest sine mode p = pi / L.
inline BoundSet nn_bounds(const SymbolSet& s, const std::vector<double>& widths, int dimension = 1,
                          double L = 1.0) {
  require(dimension == 1 || dimension == 2, "dimension must be 1 or 2");
  require(!widths.empty(), "need subdomain widths");
  BoundSet b;
  if (!s.real_regime) return b;
  b.status = BoundStatus::provided;
  const double l1 = s.lambda1.real(), l2 = s.lambda2.real(), l = s.lambda.real(), dt = s.delta_t;
  const double dmin = *std::min_element(widths.begin(), widths.end());
  const double dmax = *std::max_element(widths.begin(), widths.end());
  b.equal_widths = dmax - dmin <= 1e-12 * dmax;
  if (dimension == 1) {
    const double d2 = dmin * dmin;
    const double ca = 12 * (1 + dt * l1) / l;
    const double cb = 12 * (1 + dt * l1) / (dt * l * l2);
    b.alpha = ca / d2;
    b.beta = cb / d2;
    b.d_threshold = std::max(std::sqrt(ca), std::sqrt(cb));
    const double ua = 11 / l + 11 * dt * l1 / l + 1 / (2 * l1);
    const double ub = 11 / (dt * l * l2) + 11 * l1 / (l * l2) + 1 / (2 * l1);
    b.alpha_unequal = ua / d2;
    b.beta_unequal = ub / d2;
    const double ua10 = 11 / l + 10 * dt * l1 / l + 1 / (2 * l1);
    const double ub10 = 11 / (dt * l * l2) + 10 * l1 / (l * l2) + 1 / (2 * l1);
    b.d_threshold_unequal = std::max(std::sqrt(ua10), std::sqrt(ub10));
    b.d_threshold_unequal_11 = std::max(std::sqrt(ua), std::sqrt(ub));
  } else {
    const double p = std::numbers::pi / L;
    const double xi3 = std::sqrt(l2 + p * p);
    const double sig = std::sinh(xi3 * dmin);
    const double s4 = sig * sig * sig * sig;
    const double r1 = l1 / l, r2 = dt * l1 * l2 / l, r3 = 1 / (dt * l);
    const double c1 = 5 / s4 * (r1 * r1 + r2 * r2);
    const double c2 = 5 / s4 * (r1 * r1 + r3 * r3);
    const double ca = 12 * (r1 + r2), cb = 12 * (r1 + r3);
    b.alpha = 576 * c1;
    b.beta = 576 * c2;
    b.d_threshold = std::max(std::asinh(std::sqrt(ca)), std::asinh(std::sqrt(cb))) / xi3;
    const double ua = 11 * r1 + 10 * r2 + 0.5, ub = 11 * r1 + 10 * r3 + 0.5;
    const double ua11 = 11 * r1 + 11 * r2 + 0.5, ub11 = 11 * r1 + 11 * r3 + 0.5;
    b.alpha_unequal = 462.25 * c1;
    b.beta_unequal = 462.25 * c2;
    b.d_threshold_unequal = std::max(std::asinh(std::sqrt(ua)), std::asinh(std::sqrt(ub))) / xi3;
    b.d_threshold_unequal_11 = std::max(std::asinh(std::sqrt(ua11)), std::asinh(std::sqrt(ub11))) / xi3;
  }
  b.converged_by_theory = b.equal_widths ? dmin > b.d_threshold : dmin > b.d_threshold_unequal;
  return b;
}

// ---- scalar inequalities -----------------------------------------------

struct LemmaReport {
  int samples = 0;
  int violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // smallest (bound - value)
  bool holds() const { return violations == 0; }
};

// sinh(a t) / sinh(b t), overflow free.
inline double sinh_ratio(double a, double b, double t) {
  if (b * t < 20) return std::sinh(a * t) / std::sinh(b * t);
  return std::exp((a - b) * t) * (-std::expm1(-2 * a * t)) / (-std::expm1(-2 * b * t));
}

// 0 < sinh(at)/sinh(bt) < a/b and decreasing in t, for 0 < a < b, on a
// sorted set of t values.
inline LemmaReport check_sinh_ratio(double a, double b, std::span<const double> ts) {
  require(a > 0 && b > a, "need 0 < a < b");
  LemmaReport r;
  double prev = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double f = sinh_ratio(a, b, t);
    const double margin = std::min(a / b - f, f);
    ++r.samples;
    if (!(f > 0 && f < a / b && f < prev)) ++r.violations;
    r.worst_margin = std::min(r.worst_margin, margin);
    prev = f;
  }
  return r;
}

// cosh t / sinh^2 t < 2 / t^2 for t > 0.
inline double cosh_over_sinh2(double t) {
  if (t < 20) {
    const double sh = std::sinh(t);
    return std::cosh(t) / (sh * sh);
  }
  const double csch = 2 * std::exp(-t) / (-std::expm1(-2 * t));
  return csch / std::tanh(t);
}

inline LemmaReport check_cosh_sinh2(std::span<const double> ts) {
  LemmaReport r;
  for (double t : ts) {
    require(t > 0, "t must be positive");
    const double f = cosh_over_sinh2(t);
    const double bound = 2 / (t * t);
    ++r.samples;
    if (!(f < bound)) ++r.violations;
    r.worst_margin = std::min(r.worst_margin, (bound - f) / bound);
  }
  return r;
}

}  // namespace chdd
