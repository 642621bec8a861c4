#pragma once

#include <Eigen/Dense>
#include <vector>

namespace invlift::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Options {
  double cost_tol = 1e-9;     // reduced-cost threshold for entering columns
  double pivot_tol = 1e-10;   // smallest pivot magnitude accepted
  double feas_tol = 1e-9;     // phase-1 residual accepted as feasible
  int max_iterations = 20000;
  int bland_after = 60;       // consecutive degenerate pivots before Bland's rule
};

struct Result {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  Eigen::VectorXd y;       // primal solution of the equality form
  Eigen::VectorXd prices;  // simplex multipliers pi with A^T pi <= c at optimum
  int iterations = 0;
};

/* Two-phase dense primal simplex for
 *     min c^T y   s.t.  A y = b,  y >= 0,
 * with A of size k x N.  Designed for the k << N regime that all the
 * polytope queries in this library reduce to (k is the state dimension,
 * N the number of half-space rows), so the basis stays tiny and a fresh
 * LU of the basis every pivot is affordable and robust.
 *
 * On Status::Optimal, `prices` solves B^T pi = c_B for the final basis,
 * which for the dual-form support queries below is exactly the primal
 * optimizer of the original inequality problem. */
Result solve_equality_form(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c, const Options& opts = {});

struct InequalityResult {
  Status status = Status::IterationLimit;
  double objective = 0.0;  // min c^T v
  Eigen::VectorXd v;       // optimizer (recovered from simplex prices)
  int iterations = 0;
};

/* min c^T v  s.t.  A v <= b  with v free, solved through its dual
 * (min b^T u, A^T u = -c, u >= 0) so the simplex basis has only dim(v)
 * columns.  Status is reported for the *inequality* problem:
 *   Infeasible  -> no v satisfies A v <= b
 *   Unbounded   -> the objective is unbounded below on the feasible set
 *                  (or the feasible set is empty; callers that know the
 *                  set is nonempty can take Unbounded at face value,
 *                  everyone else should run a feasibility probe first).
 */
InequalityResult solve_inequality_form(const Eigen::MatrixXd& A,
                                       const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& c,
                                       const Options& opts = {});

}  // namespace invlift::lp
