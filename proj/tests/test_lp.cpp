#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "zzpulse/lp.hpp"

using namespace zzp;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// max c^T x over {G x <= h, 0 <= x <= ub} by enumerating every vertex:
// each choice of n active constraints is solved as an equality system.
double vertex_enumeration_max(const MatrixXd& g, const VectorXd& h, const VectorXd& c, const VectorXd& ub) {
  const int n = static_cast<int>(c.size());
  const int rows = static_cast<int>(g.rows()) + 2 * n;
  MatrixXd all(rows, n);
  VectorXd rhs(rows);
  all.topRows(g.rows()) = g;
  rhs.head(g.rows()) = h;
  for (int k = 0; k < n; ++k) {
    all.row(g.rows() + 2 * k) = -VectorXd::Unit(n, k).transpose();
    rhs(g.rows() + 2 * k) = 0.0;
    all.row(g.rows() + 2 * k + 1) = VectorXd::Unit(n, k).transpose();
    rhs(g.rows() + 2 * k + 1) = ub(k);
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == n) {
      MatrixXd sys(n, n);
      VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        sys.row(k) = all.row(pick[k]);
        r(k) = rhs(pick[k]);
      }
      Eigen::FullPivLU<MatrixXd> lu(sys);
      if (lu.rank() < n) return;
      const VectorXd x = lu.solve(r);
      if (((all * x - rhs).array() > 1e-9).any()) return;
      best = std::max(best, c.dot(x));
      return;
    }
    for (int k = start; k < rows; ++k) {
      pick[depth] = k;
      choose(k + 1, depth + 1);
    }
  };
  choose(0, 0);
  return best;
}

// Same problem in the solver's standard form with one slack per row of G.
LinearProgram to_standard_form(const MatrixXd& g, const VectorXd& h, const VectorXd& c, const VectorXd& ub) {
  const Eigen::Index m = g.rows(), n = c.size();
  LinearProgram lp;
  lp.a = MatrixXd::Zero(m, n + m);
  lp.a.leftCols(n) = g;
  lp.a.rightCols(m) = MatrixXd::Identity(m, m);
  lp.b = h;
  lp.c = VectorXd::Zero(n + m);
  lp.c.head(n) = -c;
  lp.upper = VectorXd::Constant(n + m, kLpInfinity);
  lp.upper.head(n) = ub;
  return lp;
}

}  // namespace

TEST_CASE("textbook problem") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
  MatrixXd g(3, 2);
  g << 1, 0, 0, 2, 3, 2;
  const VectorXd h = (VectorXd(3) << 4, 12, 18).finished();
  const VectorXd c = (VectorXd(2) << 3, 5).finished();
  const VectorXd ub = VectorXd::Constant(2, 100.0);
  const LpSolution sol = solve_lp(to_standard_form(g, h, c, ub));
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(-sol.objective == doctest::Approx(36.0).epsilon(1e-8));
  CHECK(sol.x(0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.x(1) == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("random bounded problems agree with vertex enumeration") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 2 + trial % 4;
    MatrixXd g(m, n);
    for (int r = 0; r < m; ++r)
      for (int k = 0; k < n; ++k) g(r, k) = u(rng);
    VectorXd h(m);
    for (int r = 0; r < m; ++r) h(r) = 0.2 + std::abs(u(rng));  // x = 0 feasible
    VectorXd c(n), ub(n);
    for (int k = 0; k < n; ++k) {
      c(k) = u(rng);
      ub(k) = 0.5 + std::abs(u(rng));
    }
    const double oracle = vertex_enumeration_max(g, h, c, ub);
    const LpSolution sol = solve_lp(to_standard_form(g, h, c, ub));
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(-sol.objective == doctest::Approx(oracle).epsilon(1e-7).scale(1.0));
    CHECK(((g * sol.x.head(n) - h).array() <= 1e-8).all());
    CHECK((sol.x.head(n).array() >= -1e-10).all());
    CHECK(((sol.x.head(n) - ub).array() <= 1e-8).all());
  }
}

TEST_CASE("max-min step problem") {
  // max t  s.t. g_i . d >= t, |d| <= r, written with d = y - r, y in [0, 2r].
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3, m = 4;
    const double r = 0.3;
    MatrixXd grads(m, n);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < n; ++k) grads(i, k) = u(rng);
    LinearProgram lp;
    lp.a = MatrixXd::Zero(m, n + 1 + m);
    lp.a.leftCols(n) = grads;
    lp.a.col(n).setConstant(-1.0);
    lp.a.rightCols(m) = -MatrixXd::Identity(m, m);
    lp.b = grads * VectorXd::Constant(n, r);
    lp.c = VectorXd::Zero(n + 1 + m);
    lp.c(n) = -1.0;
    lp.upper = VectorXd::Constant(n + 1 + m, kLpInfinity);
    lp.upper.head(n).setConstant(2 * r);
    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    // Oracle over (d, t): G' = [-g_i, 1] rows, box on d, t in [0, big].
    MatrixXd g2(m, n + 1);
    g2.leftCols(n) = -grads;
    g2.col(n).setOnes();
    // Shift d -> d + r so the box is [0, 2r]; then -g.(d' - r) + t <= 0.
    const VectorXd h2 = -grads * VectorXd::Constant(n, r);
    VectorXd c2 = VectorXd::Zero(n + 1);
    c2(n) = 1.0;
    VectorXd ub2 = VectorXd::Constant(n + 1, 2 * r);
    ub2(n) = 100.0;
    const double oracle = vertex_enumeration_max(g2, h2, c2, ub2);
    CHECK(-sol.objective == doctest::Approx(oracle).epsilon(1e-7).scale(1.0));
    CHECK(-sol.objective >= -1e-9);
  }
}

TEST_CASE("infeasible problem is not reported optimal") {
  LinearProgram lp;
  lp.a = MatrixXd::Ones(1, 2);
  lp.b = VectorXd::Constant(1, 5.0);
  lp.c = VectorXd::Ones(2);
  lp.upper = VectorXd::Ones(2);  // x0 + x1 <= 2 < 5
  const LpSolution sol = solve_lp(lp);
  CHECK(sol.status != LpStatus::optimal);
}

TEST_CASE("dimension checks") {
  LinearProgram lp;
  lp.a = MatrixXd::Ones(1, 2);
  lp.b = VectorXd::Ones(2);
  lp.c = VectorXd::Ones(2);
  lp.upper = VectorXd::Ones(2);
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
  lp.b = VectorXd::Ones(1);
  lp.upper(0) = 0.0;
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}
