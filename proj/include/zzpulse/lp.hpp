#pragma once

#include <limits>
#include <string>

#include <Eigen/Dense>

namespace zzp {

/// min c^T x  s.t.  A x = b,  0 <= x <= upper.
/// Entries of `upper` may be +infinity.
struct LinearProgram {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd upper;
};

enum class LpStatus { optimal, iteration_limit, numerical_failure };

std::string to_string(LpStatus s);

struct LpOptions {
  int max_iterations = 100;
  double tolerance = 1e-9;  // relative residuals and duality gap
};

struct LpSolution {
  LpStatus status = LpStatus::numerical_failure;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality multipliers
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

/// Mehrotra predictor-corrector interior-point method on the normal
/// equations A D A^T. Intended for small dense problems (a few thousand
/// variables at most).
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace zzp
