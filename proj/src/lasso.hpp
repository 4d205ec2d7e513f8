#pragma once

#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace bolasso {

// Objective convention used throughout:
//   f(w) = 1/(2n) ||y - X w||_2^2 + mu ||w||_1
// with correlations c = X'(y - X w)/n, so the zero-estimate threshold is
// mu_max = ||X'y/n||_inf.

struct LassoProblem {
  Matrix design;    // n x p
  Vector response;  // n
  bool centered = false;
  bool scaled = false;

  Index n() const { return design.rows(); }
  Index p() const { return design.cols(); }
};

/// Validates finiteness, shapes, and (when flagged) the centering/scaling
/// invariants before wrapping the data.
LassoProblem make_problem(Matrix design, Vector response, bool centered = false, bool scaled = false);

struct PathKnot {
  double mu = 0.0;
  Vector weights;     // p, exact zeros off the support
  IndexSet active;    // indices of nonzero weights
  SignPattern signs;  // sign(weights)
};

/// Breakpoints of the piecewise-linear regularization path, mu strictly
/// decreasing, first knot at mu_max with zero weights.
struct LassoPath {
  std::vector<PathKnot> knots;
};

double mu_max(const LassoProblem& problem);

/// Gram-space quantities shared by the solvers: G = X'X/n, b = X'y/n.
Matrix gram_matrix(const LassoProblem& problem);
Vector gram_rhs(const LassoProblem& problem);

/// LARS with the lasso modification (variables drop when a coefficient
/// crosses zero). Follows the path from mu_max down to 0 or until max_knots
/// breakpoints were emitted. Tied entries are admitted lowest index first;
/// exactly collinear tied columns raise DegenerateDesign.
LassoPath lars_lasso_path(const LassoProblem& problem, Index max_knots);
LassoPath lars_lasso_path(const LassoProblem& problem);

/// Cyclic coordinate descent on the same objective; used as an independent
/// check of the path solver. Stops when the largest coordinate change in a
/// sweep is at most tol * (1 + ||w||_inf); throws NotConverged after
/// max_iter sweeps.
Vector coordinate_descent(const LassoProblem& problem, double mu, double tol, Index max_iter);

/// Path evaluation: zeros at or above mu_max, linear interpolation between
/// bracketing knots, the final knot's weights below the last breakpoint.
Vector path_at(const LassoPath& path, double mu);

/// Support of the path solution at mu. Supports are piecewise constant
/// between knots; at a knot the knot's own (right-limit) support is used.
IndexSet path_support_at(const LassoPath& path, double mu);

/// Max violation of the subgradient optimality conditions:
/// |c_j - mu*sign(w_j)| on the support, max(|c_j| - mu, 0) off it, where
/// c = X'(y - X w)/n. Zero (to rounding) iff w is a global minimizer.
double kkt_residual(const LassoProblem& problem, double mu, const Vector& w);

double lasso_objective(const LassoProblem& problem, double mu, const Vector& w);

IndexSet support_of(const Vector& w, double tol);
SignPattern sign_pattern_of(const Vector& w, double tol);

double mean_squared_error(const Vector& predicted, const Vector& truth);

}  // namespace bolasso
