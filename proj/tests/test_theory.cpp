#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "chdd/theory.hpp"

using namespace chdd;
using Catch::Approx;

namespace {

// Roots of eps^2 dt L^2 - c^2 dt L + 1 by bisection on the real line.
std::pair<double, double> real_roots(double eps, double dt, double c) {
  auto f = [&](double L) { return eps * eps * dt * L * L - c * c * dt * L + 1; };
  const double vertex = c * c / (2 * eps * eps);
  auto bisect = [&](double lo, double hi) {
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (f(lo) > 0) == (f(mid) > 0) ? lo = mid : hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  return {bisect(vertex, 4 * vertex + 1e12), bisect(0, vertex)};
}

// Solution of w'' = xi^2 w on [xl, xr] in the basis cosh, sinh of xi (x - xl).
struct Piece {
  double xl, xr, xi, A, B;
  double value(double x) const { return A * std::cosh(xi * (x - xl)) + B * std::sinh(xi * (x - xl)); }
  double slope(double x) const { return xi * (A * std::sinh(xi * (x - xl)) + B * std::cosh(xi * (x - xl))); }
};

// Each face imposes either a value or an outward derivative.
struct Face {
  bool dirichlet;
  double data;
};

Piece solve_piece(double xl, double xr, double xi, Face left, Face right) {
  Eigen::Matrix2d M;
  Eigen::Vector2d r;
  const double d = xr - xl;
  if (left.dirichlet) M.row(0) << 1, 0;
  else M.row(0) << 0, -xi;
  if (right.dirichlet) M.row(1) << std::cosh(xi * d), std::sinh(xi * d);
  else M.row(1) << xi * std::sinh(xi * d), xi * std::cosh(xi * d);
  r << left.data, right.data;
  const Eigen::Vector2d ab = M.partialPivLu().solve(r);
  return {xl, xr, xi, ab[0], ab[1]};
}

// One continuous Neumann-Neumann sweep for the scalar problem w'' = xi^2 w.
// Both neighbours of interface i take the x-derivative of u_i - u_{i+1}.
std::vector<double> scalar_nn(double xi, const std::vector<double>& d, double theta, const std::vector<double>& g) {
  const int n = int(d.size());
  std::vector<double> x{0};
  for (double w : d) x.push_back(x.back() + w);
  std::vector<Piece> dir;
  for (int i = 0; i < n; ++i)
    dir.push_back(solve_piece(x[i], x[i + 1], xi, i == 0 ? Face{false, 0} : Face{true, g[i - 1]},
                              i == n - 1 ? Face{false, 0} : Face{true, g[i]}));
  std::vector<double> J(n - 1);
  for (int i = 0; i + 1 < n; ++i) J[i] = dir[i].slope(x[i + 1]) - dir[i + 1].slope(x[i + 1]);
  std::vector<Piece> phi;
  for (int i = 0; i < n; ++i)
    phi.push_back(solve_piece(x[i], x[i + 1], xi, Face{false, i == 0 ? 0 : -J[i - 1]},
                              Face{false, i == n - 1 ? 0 : J[i]}));
  std::vector<double> next = g;
  for (int i = 0; i + 1 < n; ++i) next[i] -= theta * (phi[i].value(x[i + 1]) - phi[i + 1].value(x[i + 1]));
  return next;
}

// Full system matrix from the scalar sweeps through the eigenvectors (dt L, 1).
Eigen::MatrixXd oracle_nn(double eps, double dt, double c, const std::vector<double>& d, double theta) {
  const auto [l1, l2] = real_roots(eps, dt, c);
  Eigen::Matrix2d P;
  P << dt * l1, dt * l2, 1, 1;
  const Eigen::Matrix2d Pinv = P.inverse();
  const int ni = int(d.size()) - 1;
  Eigen::MatrixXd T(2 * ni, 2 * ni);
  for (int col = 0; col < 2 * ni; ++col) {
    std::vector<double> a1(ni), a3(ni);
    const Eigen::Vector2d e = col % 2 == 0 ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1);
    const Eigen::Vector2d coeff = Pinv * e;
    a1[col / 2] = coeff[0];
    a3[col / 2] = coeff[1];
    const auto b1 = scalar_nn(std::sqrt(l1), d, theta, a1), b3 = scalar_nn(std::sqrt(l2), d, theta, a3);
    for (int i = 0; i < ni; ++i) T.block<2, 1>(2 * i, col) = P * Eigen::Vector2d(b1[i], b3[i]);
  }
  return T;
}

}  // namespace

TEST_CASE("symbols match independently computed roots", "[theory]") {
  const SymbolSet s = symbols(Params{0.01, 1e-3, 1, 0.5});
  REQUIRE(s.real_regime);
  const auto [l1, l2] = real_roots(0.01, 1e-3, 1);
  CHECK(l1 == Approx(8872.983346207417).epsilon(1e-12));
  CHECK(l2 == Approx(1127.016653792583).epsilon(1e-12));
  CHECK(s.lambda1.real() == Approx(l1).epsilon(1e-12));
  CHECK(s.lambda2.real() == Approx(l2).epsilon(1e-12));
  CHECK(s.xi1.real() == Approx(std::sqrt(l1)));
  CHECK(s.mu1[0].real() == Approx(1e-3 * l1));

  const SymbolSet z = symbols(Params{0.01, 1e-6, 1, 0.5});
  REQUIRE_FALSE(z.real_regime);
  CHECK(z.lambda1.real() == Approx(5000));
  CHECK(z.lambda1.imag() == Approx(-z.lambda2.imag()));
  CHECK(std::abs(z.lambda1 * z.lambda2 - 1e10) / 1e10 < 1e-12);
  for (const auto& t : {s, z})
    for (auto xi : {t.xi1, t.xi3, -t.xi1, -t.xi3}) CHECK(t.determinant_residual(xi) < 1e-12);

  const SymbolSet m = symbols_mode(Params{0.01, 1e-3, 1, 0.5}, 2, 0.5);
  CHECK(m.xi1.real() == Approx(std::sqrt(l1 + 16 * std::numbers::pi * std::numbers::pi)));
  CHECK_THROWS_AS(symbols(Params{0, 1e-3, 1, 0.5}), InvalidArgument);
}

TEST_CASE("Dirichlet-Neumann matrix", "[theory]") {
  const Params p{0.1, 0.1, 1, 0.5};
  const SymbolSet S = symbols(p);
  REQUIRE(S.real_regime);
  for (double theta : {0.2, 0.5, 0.7}) {
    const DNMatrix H = dn_iteration_matrix(S, 0.5, 0.5, theta);
    CHECK((H.H - (1 - 2 * theta) * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (auto [a, b] : {std::pair{0.3, 0.7}, {0.7, 0.3}, {1.0, 2.5}}) {
    const DNMatrix H = dn_iteration_matrix(S, a, b, 0.5);
    CHECK(H.max_imag < 1e-14);
    std::vector<double> expect;
    for (auto xi : {S.xi1.real(), S.xi3.real()})
      expect.push_back(std::sinh((b - a) * xi) / (2 * std::sinh(b * xi) * std::cosh(a * xi)));
    std::sort(expect.begin(), expect.end());
    auto ev = H.eigenvalues();
    std::vector<double> got{ev[0].real(), ev[1].real()};
    std::sort(got.begin(), got.end());
    CHECK(got[0] == Approx(expect[0]).margin(1e-12));
    CHECK(got[1] == Approx(expect[1]).margin(1e-12));
    CHECK((dn_iteration_matrix_eigenbasis(S, a, b, 0.5) - H.H).cwiseAbs().maxCoeff() < 1e-12);
  }
  const SymbolSet Z = symbols(Params{0.01, 1e-6, 1, 0.5});
  const DNMatrix Hz = dn_iteration_matrix(Z, 0.3, 0.7, 0.4);
  CHECK(Hz.max_imag < 1e-10);
  CHECK((dn_iteration_matrix_eigenbasis(Z, 0.3, 0.7, 0.4) - Hz.H).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(dn_iteration_matrix(S, 0, 1, 0.5), InvalidArgument);
}

TEST_CASE("Dirichlet-Neumann contraction bound", "[theory]") {
  const Params real{0.01, 1e-3, 1, 0.5};
  CHECK(dn_contraction_bound(real, 0.4, 0.6).factor == Approx(1.0 / 6));
  CHECK(dn_contraction_bound(real, 1, 1).factor == 0.0);
  CHECK(dn_contraction_bound(real, 0.5, 1).factor == Approx(0.25));
  CHECK_FALSE(dn_contraction_bound(real, 2.9, 1).switch_recommended);
  const DNBound far = dn_contraction_bound(real, 3.5, 1);
  CHECK(far.factor == Approx(1.25));
  CHECK(far.switch_recommended);
  const Params cplx_p{0.01, 1e-6, 1, 0.5};
  CHECK(dn_contraction_bound(cplx_p, 0.5, 1).factor == Approx(0.5 / std::sqrt(2.0)));
  CHECK(dn_contraction_bound(cplx_p, 2.5, 1).switch_recommended);
  // The bound dominates the spectral radius of the closed-form matrix.
  const SymbolSet S = symbols(real);
  for (double a : {0.2, 0.5, 0.8, 1.5}) {
    const DNMatrix H = dn_iteration_matrix(S, a, 1, 0.5);
    CHECK(spectral_radius(H.H) <= dn_contraction_bound(real, a, 1).factor + 1e-12);
  }
}

TEST_CASE("Neumann-Neumann matrix matches a continuous oracle", "[theory]") {
  const double eps = 0.1, dt = 0.1, c = 1;
  const SymbolSet S = symbols(Params{eps, dt, c, 0.25});
  for (const std::vector<double>& w :
       {std::vector<double>{0.375, 0.5, 0.375}, std::vector<double>{0.3, 0.5, 0.4, 0.6}, std::vector<double>(6, 0.5)}) {
    const NNMatrix T = nn_iteration_matrix(S, w, 0.25);
    const Eigen::MatrixXd O = oracle_nn(eps, dt, c, w, 0.25);
    CHECK((T.T - O).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(T.max_imag < 1e-12);
  }
  CHECK_THROWS_AS(nn_iteration_matrix(S, {0.5, 0.5}, 0.25), InvalidArgument);
}

TEST_CASE("Neumann-Neumann matrix structure", "[theory]") {
  const SymbolSet S = symbols(Params{0.1, 0.1, 1, 0.25});
  const std::vector<double> w{0.4, 0.7, 0.5, 0.5, 0.7, 0.4};
  const NNMatrix T = nn_iteration_matrix(S, w, 0.25);
  const int n = T.interfaces();
  REQUIRE(n == 5);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      if (std::abs(i - l) > 2) CHECK(T.T.block<2, 2>(2 * i, 2 * l).cwiseAbs().maxCoeff() == 0.0);
  CHECK(T.row_length == std::vector<int>{6, 8, 10, 8, 6});
  // Mirror-symmetric widths give a mirror-symmetric matrix.
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          CHECK(T.T(2 * i + r, 2 * l + s) == Approx(T.T(2 * (n - 1 - i) + r, 2 * (n - 1 - l) + s)).margin(1e-13));
  CHECK(T.alpha[0].size() == 6u);
  CHECK(T.beta[2].size() == 10u);
}

TEST_CASE("coefficient tables", "[theory]") {
  const SymbolSet S = symbols(Params{0.1, 0.1, 1, 0.25});
  for (int N : {6, 7, 9}) {
    std::vector<double> w;
    for (int i = 0; i < N; ++i) w.push_back(i % 2 ? 0.5 : 0.375);
    const NNMatrix T = nn_iteration_matrix(S, w, 0.25);
    const NNMatrix fixed = nn_iteration_matrix_tables(S, w, 0.25, TableVariant::corrected);
    const NNMatrix printed = nn_iteration_matrix_tables(S, w, 0.25, TableVariant::as_printed);
    CHECK((fixed.T - T.T).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((printed.T - T.T).cwiseAbs().maxCoeff() > 1e-3);
  }
  CHECK_THROWS_AS(nn_iteration_matrix_tables(S, {1, 1, 1, 1}, 0.25, TableVariant::corrected), InvalidArgument);
}

TEST_CASE("Neumann-Neumann convergence constants", "[theory]") {
  const double eps = 0.01, dt = 1e-3, c = 1;
  const SymbolSet S = symbols(Params{eps, dt, c, 0.25});
  const auto [l1, l2] = real_roots(eps, dt, c);
  const double l = l1 - l2;
  const BoundSet b = nn_bounds(S, std::vector<double>(8, 10.0));
  REQUIRE(b.status == BoundStatus::provided);
  CHECK(b.equal_widths);
  CHECK(b.alpha == Approx(12 * (1 + dt * l1) / (l * 100)).epsilon(1e-10));
  CHECK(b.beta == Approx(12 * (1 + dt * l1) / (dt * l * l2 * 100)).epsilon(1e-10));
  CHECK(b.converged_by_theory == (10 > b.d_threshold));
  CHECK(b.d_threshold_unequal_11 >= b.d_threshold_unequal);

  double prev_a = INFINITY, prev_b = INFINITY;
  for (double d : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const BoundSet bd = nn_bounds(S, std::vector<double>(6, d));
    CHECK(bd.alpha < prev_a);
    CHECK(bd.beta < prev_b);
    prev_a = bd.alpha;
    prev_b = bd.beta;
    const BoundSet b2 = nn_bounds(S, std::vector<double>(6, d), 2, 1.0);
    CHECK(b2.status == BoundStatus::provided);
  }

  const NNMatrix T = nn_iteration_matrix(S, std::vector<double>(8, 10.0), 0.25);
  CHECK(T.inf_norm() < b.contraction());

  const std::vector<double> uneq{1, 2, 1, 2, 1, 2};
  const BoundSet bu = nn_bounds(S, uneq);
  CHECK_FALSE(bu.equal_widths);
  CHECK(bu.alpha_unequal > 0);

  const BoundSet none = nn_bounds(symbols(Params{0.01, 1e-6, 1, 0.25}), std::vector<double>(6, 1.0));
  CHECK(none.status == BoundStatus::not_provided);
  CHECK_FALSE(none.converged_by_theory);
}

TEST_CASE("scalar inequalities", "[theory]") {
  CHECK(cosh_over_sinh2(1.0) == Approx(std::cosh(1.0) / std::pow(std::sinh(1.0), 2)));
  CHECK(cosh_over_sinh2(1.0) == Approx(1.1173).margin(1e-4));
  CHECK(cosh_over_sinh2(30.0) == Approx(std::cosh(30.0) / std::pow(std::sinh(30.0), 2)).epsilon(1e-12));
  std::vector<double> ts;
  for (double t = 1e-3; t < 200; t *= 1.3) ts.push_back(t);
  CHECK(check_cosh_sinh2(ts).holds());
  const LemmaReport r = check_sinh_ratio(0.5, 1.5, ts);
  CHECK(r.holds());
  CHECK(r.samples == int(ts.size()));
  CHECK(sinh_ratio(0.5, 1.5, 1e-6) == Approx(1.0 / 3).epsilon(1e-9));
  CHECK(sinh_ratio(2, 3, 400) == Approx(std::exp(-400.0)).epsilon(1e-12));
  CHECK_THROWS_AS(check_sinh_ratio(2, 1, ts), InvalidArgument);
}
