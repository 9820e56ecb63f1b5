#include "zzpulse/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace zzp {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Eigen::VectorXd;

// Largest step in [0, 1] keeping v + alpha dv >= 0 (entries selected by mask).
double max_step(const VectorXd& v, const VectorXd& dv, const Eigen::Array<bool, Eigen::Dynamic, 1>* mask = nullptr) {
  double alpha = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (mask && !(*mask)(k)) continue;
    if (dv(k) < 0.0) alpha = std::min(alpha, -v(k) / dv(k));
  }
  return alpha;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  const Eigen::Index m = lp.a.rows();
  const Eigen::Index n = lp.a.cols();
  if (lp.b.size() != m || lp.c.size() != n || lp.upper.size() != n) {
    throw std::invalid_argument("solve_lp: inconsistent problem dimensions");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(lp.upper(k) > 0.0)) throw std::invalid_argument("solve_lp: upper bounds must be positive");
  }

  Eigen::Array<bool, Eigen::Dynamic, 1> bounded(n);
  for (Eigen::Index k = 0; k < n; ++k) bounded(k) = std::isfinite(lp.upper(k));
  const VectorXd u = bounded.select(lp.upper, VectorXd::Zero(n));

  // Starting point: interior of the box, unit duals.
  VectorXd x(n), w(n), z = VectorXd::Ones(n), s(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x(k) = bounded(k) ? 0.5 * u(k) : 1.0;
    w(k) = bounded(k) ? u(k) - x(k) : 0.0;
    s(k) = bounded(k) ? 1.0 : 0.0;
  }
  VectorXd y = VectorXd::Zero(m);

  const double b_scale = 1.0 + lp.b.lpNorm<Eigen::Infinity>();
  const double c_scale = 1.0 + lp.c.lpNorm<Eigen::Infinity>();
  const double u_scale = 1.0 + u.lpNorm<Eigen::Infinity>();
  const Eigen::Index n_comp = n + bounded.count();

  LpSolution out;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    const VectorXd rp = lp.b - lp.a * x;
    const VectorXd ru = bounded.select(u - x - w, VectorXd::Zero(n));
    const VectorXd rd = lp.c - lp.a.transpose() * y - z + s;
    const double gap = x.dot(z) + w.dot(s);
    const double primal_obj = lp.c.dot(x);
    const double mu = gap / static_cast<double>(n_comp);

    if (rp.lpNorm<Eigen::Infinity>() <= options.tolerance * b_scale &&
        ru.lpNorm<Eigen::Infinity>() <= options.tolerance * u_scale &&
        rd.lpNorm<Eigen::Infinity>() <= options.tolerance * c_scale &&
        gap <= options.tolerance * (1.0 + std::abs(primal_obj))) {
      out.status = LpStatus::optimal;
      break;
    }

    // D = (Z/X + S/W)^{-1}
    VectorXd theta_inv = z.cwiseQuotient(x);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (bounded(k)) theta_inv(k) += s(k) / w(k);
    }
    const VectorXd d = theta_inv.cwiseInverse();
    const Eigen::MatrixXd ad = lp.a * d.cwiseSqrt().asDiagonal();
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(m, m);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(ad);
    // Tiny regularization keeps the factorization alive near degenerate vertices.
    normal.diagonal().array() += 1e-14 * (1.0 + normal.diagonal().maxCoeff());
    const Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> chol(normal);
    if (chol.info() != Eigen::Success) {
      out.status = LpStatus::numerical_failure;
      break;
    }

    struct Direction {
      VectorXd dx, dw, dy, dz, ds;
    };
    auto solve_direction = [&](const VectorXd& rxz, const VectorXd& rws) {
      VectorXd rhat = rd - rxz.cwiseQuotient(x);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (bounded(k)) rhat(k) += (rws(k) - s(k) * ru(k)) / w(k);
      }
      Direction dir;
      dir.dy = chol.solve(rp + lp.a * d.cwiseProduct(rhat));
      dir.dx = d.cwiseProduct(lp.a.transpose() * dir.dy - rhat);
      dir.dz = (rxz - z.cwiseProduct(dir.dx)).cwiseQuotient(x);
      dir.dw = VectorXd::Zero(n);
      dir.ds = VectorXd::Zero(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!bounded(k)) continue;
        dir.dw(k) = ru(k) - dir.dx(k);
        dir.ds(k) = (rws(k) - s(k) * dir.dw(k)) / w(k);
      }
      return dir;
    };
    auto step_lengths = [&](const Direction& dir) {
      const double ap = std::min(max_step(x, dir.dx), max_step(w, dir.dw, &bounded));
      const double ad_ = std::min(max_step(z, dir.dz), max_step(s, dir.ds, &bounded));
      return std::pair{ap, ad_};
    };

    // Predictor (affine scaling).
    const VectorXd xz = -x.cwiseProduct(z);
    const VectorXd ws = bounded.select(-w.cwiseProduct(s), VectorXd::Zero(n));
    const Direction aff = solve_direction(xz, ws);
    const auto [ap_aff, ad_aff] = step_lengths(aff);
    const double gap_aff = (x + ap_aff * aff.dx).dot(z + ad_aff * aff.dz) +
                           (w + ap_aff * aff.dw).dot(s + ad_aff * aff.ds);
    const double sigma = std::pow(gap_aff / gap, 3);

    // Corrector with centering.
    VectorXd rxz = xz - aff.dx.cwiseProduct(aff.dz);
    rxz.array() += sigma * mu;
    VectorXd rws = ws - aff.dw.cwiseProduct(aff.ds);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (bounded(k)) rws(k) += sigma * mu;
      else rws(k) = 0.0;
    }
    const Direction dir = solve_direction(rxz, rws);
    auto [ap, ad_] = step_lengths(dir);
    ap = std::min(1.0, 0.995 * ap);
    ad_ = std::min(1.0, 0.995 * ad_);

    x += ap * dir.dx;
    w += ap * dir.dw;
    y += ad_ * dir.dy;
    z += ad_ * dir.dz;
    s += ad_ * dir.ds;
    if (!x.allFinite() || !y.allFinite()) {
      out.status = LpStatus::numerical_failure;
      break;
    }
    out.status = LpStatus::iteration_limit;
    out.iterations = iter + 1;
  }
  out.x = x;
  out.y = y;
  out.objective = lp.c.dot(x);
  return out;
}

}  // namespace zzp
