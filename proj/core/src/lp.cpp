#include "invlift/lp.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "invlift/errors.hpp"

namespace invlift::lp {

namespace {

constexpr int kRefreshEvery = 64;  // recompute basic values from scratch

struct Tableau {
  // Columns 0..N-1 are the structural variables, N..N+k-1 the artificials.
  const Eigen::MatrixXd& A;
  Eigen::VectorXd b;  // flipped so b >= 0
  int k, N;
  std::vector<int> basis;          // size k, column indices into [A | I]
  std::vector<char> is_artificial;  // per column
  Eigen::VectorXd xB;

  Eigen::VectorXd column(int j) const {
    if (j < N) return A.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e(j - N) = 1.0;
    return e;
  }
};

Eigen::MatrixXd basis_matrix(const Tableau& t) {
  Eigen::MatrixXd B(t.k, t.k);
  for (int i = 0; i < t.k; ++i) B.col(i) = t.column(t.basis[i]);
  return B;
}

enum class PivotOutcome { Optimal, Unbounded, Step, Stalled };

/* One simplex phase over the working tableau.  `cost` covers structural
 * and artificial columns; `allow_artificial_entering` is only true in
 * phase 1.  Returns through `outcome`; prices of the final basis are
 * left in `pi`. */
PivotOutcome run_phase(Tableau& t, const Eigen::VectorXd& cost,
                       bool allow_artificial_entering, const Options& opts,
                       int& iter_budget, Eigen::VectorXd& pi) {
  const int total_cols = t.N + t.k;
  int degenerate_streak = 0;
  int since_refresh = 0;

  while (iter_budget-- > 0) {
    Eigen::MatrixXd B = basis_matrix(t);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);

    if (++since_refresh >= kRefreshEvery) {
      t.xB = lu.solve(t.b);
      since_refresh = 0;
    }

    Eigen::VectorXd cB(t.k);
    for (int i = 0; i < t.k; ++i) cB(i) = cost(t.basis[i]);
    pi = lu.transpose().solve(cB);

    const bool bland = degenerate_streak >= opts.bland_after;

    // Pricing: structural columns in one matvec, artificials directly.
    Eigen::VectorXd red = Eigen::VectorXd::Zero(total_cols);
    red.head(t.N) = cost.head(t.N) - t.A.transpose() * pi;
    for (int j = t.N; j < total_cols; ++j) red(j) = cost(j) - pi(j - t.N);

    std::vector<char> in_basis(total_cols, 0);
    for (int idx : t.basis) in_basis[idx] = 1;

    int entering = -1;
    double best = -opts.cost_tol;
    for (int j = 0; j < total_cols; ++j) {
      if (in_basis[j]) continue;
      if (j >= t.N && !allow_artificial_entering) continue;
      const double dj = red(j) / (1.0 + std::abs(cost(j)));
      if (dj >= (bland ? -opts.cost_tol : best)) continue;
      entering = j;
      if (bland) break;  // first eligible index
      best = dj;         // otherwise most negative reduced cost
    }
    if (entering < 0) return PivotOutcome::Optimal;

    Eigen::VectorXd u = lu.solve(t.column(entering));

    int leave_pos = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (int i = 0; i < t.k; ++i) {
      if (u(i) > opts.pivot_tol) {
        const double ratio = std::max(t.xB(i), 0.0) / u(i);
        if (ratio < theta - 1e-12 ||
            (ratio < theta + 1e-12 &&
             (leave_pos < 0 ||
              (bland ? t.basis[i] < t.basis[leave_pos]
                     : u(i) > u(leave_pos))))) {
          theta = ratio;
          leave_pos = i;
        }
      }
    }
    if (leave_pos < 0) return PivotOutcome::Unbounded;

    t.xB -= theta * u;
    t.xB(leave_pos) = theta;
    t.basis[leave_pos] = entering;

    degenerate_streak = (theta <= opts.pivot_tol) ? degenerate_streak + 1 : 0;
  }
  return PivotOutcome::Stalled;
}

}  // namespace

Result solve_equality_form(const Eigen::MatrixXd& A_in, const Eigen::VectorXd& b_in,
                           const Eigen::VectorXd& c, const Options& opts) {
  const int k = static_cast<int>(A_in.rows());
  const int N = static_cast<int>(A_in.cols());
  if (b_in.size() != k || c.size() != N)
    throw ValidationError("lp: inconsistent equality-form dimensions");
  if (!A_in.allFinite() || !b_in.allFinite() || !c.allFinite())
    throw NumericalError("lp: non-finite data in equality form");

  Result res;
  if (k == 0) {  // no constraints: y = 0 unless some cost is negative
    for (int j = 0; j < N; ++j)
      if (c(j) < -opts.cost_tol) {
        res.status = Status::Unbounded;
        return res;
      }
    res.status = Status::Optimal;
    res.y = Eigen::VectorXd::Zero(N);
    res.prices = Eigen::VectorXd::Zero(0);
    return res;
  }

  // Flip rows so the artificial start is feasible with b >= 0.  The flips
  // leave the feasible set and objective alone but negate the multiplier
  // of every flipped row, which is undone when the prices are exported.
  Eigen::MatrixXd A = A_in;
  Eigen::VectorXd b = b_in;
  std::vector<char> flipped(k, 0);
  for (int i = 0; i < k; ++i)
    if (b(i) < 0) {
      A.row(i) = -A.row(i);
      b(i) = -b(i);
      flipped[i] = 1;
    }

  Tableau t{A, b, k, N, {}, {}, {}};
  t.basis.resize(k);
  for (int i = 0; i < k; ++i) t.basis[i] = N + i;
  t.xB = b;

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(N + k);
  phase1_cost.tail(k).setOnes();

  int budget = opts.max_iterations;
  Eigen::VectorXd pi;

  PivotOutcome out = run_phase(t, phase1_cost, true, opts, budget, pi);
  if (out == PivotOutcome::Stalled) {
    res.status = Status::IterationLimit;
    return res;
  }
  if (out == PivotOutcome::Unbounded)
    throw NumericalError("lp: phase 1 reported unbounded (cannot happen)");

  {
    Eigen::MatrixXd B = basis_matrix(t);
    t.xB = B.partialPivLu().solve(t.b);
  }
  double infeas = 0.0;
  for (int i = 0; i < k; ++i)
    if (t.basis[i] >= N) infeas += std::max(t.xB(i), 0.0);
  const double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  if (infeas > opts.feas_tol * scale) {
    res.status = Status::Infeasible;
    return res;
  }

  // Drive leftover zero-level artificials out of the basis; a row where no
  // structural column can pivot is linearly dependent and the artificial
  // simply stays pinned at zero (its cost is zero in phase 2 and it cannot
  // re-enter, so it never moves).
  for (int i = 0; i < k; ++i) {
    if (t.basis[i] < N) continue;
    Eigen::MatrixXd B = basis_matrix(t);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    std::vector<char> in_basis(N, 0);
    for (int idx : t.basis)
      if (idx < N) in_basis[idx] = 1;
    for (int j = 0; j < N; ++j) {
      if (in_basis[j]) continue;
      Eigen::VectorXd u = lu.solve(t.column(j));
      if (std::abs(u(i)) > 1e3 * opts.pivot_tol) {
        t.basis[i] = j;
        break;
      }
    }
  }
  {
    Eigen::MatrixXd B = basis_matrix(t);
    t.xB = B.partialPivLu().solve(t.b);
  }

  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(N + k);
  phase2_cost.head(N) = c;

  out = run_phase(t, phase2_cost, false, opts, budget, pi);
  res.iterations = opts.max_iterations - budget;
  if (out == PivotOutcome::Stalled) {
    res.status = Status::IterationLimit;
    return res;
  }
  if (out == PivotOutcome::Unbounded) {
    res.status = Status::Unbounded;
    return res;
  }

  res.status = Status::Optimal;
  res.y = Eigen::VectorXd::Zero(N);
  {
    Eigen::MatrixXd B = basis_matrix(t);
    t.xB = B.partialPivLu().solve(t.b);
  }
  double obj = 0.0;
  for (int i = 0; i < k; ++i) {
    const double v = std::max(t.xB(i), 0.0);
    if (t.basis[i] < N) {
      res.y(t.basis[i]) = v;
      obj += c(t.basis[i]) * v;
    }
  }
  res.objective = obj;
  res.prices = pi;
  for (int i = 0; i < k; ++i)
    if (flipped[i]) res.prices(i) = -res.prices(i);
  if (!res.prices.allFinite() || !std::isfinite(res.objective))
    throw NumericalError("lp: non-finite simplex result");
  return res;
}

InequalityResult solve_inequality_form(const Eigen::MatrixXd& A,
                                       const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& c,
                                       const Options& opts) {
  const int R = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != R || c.size() != n)
    throw ValidationError("lp: inconsistent inequality-form dimensions");

  // Dual:  min b^T u  s.t.  A^T u = -c,  u >= 0.
  Result dual = solve_equality_form(A.transpose(), -c, b, opts);

  InequalityResult res;
  res.iterations = dual.iterations;
  switch (dual.status) {
    case Status::Optimal:
      res.status = Status::Optimal;
      res.objective = -dual.objective;
      res.v = dual.prices;
      break;
    case Status::Infeasible:
      // No dual multiplier exists: the primal cannot have a finite optimum.
      res.status = Status::Unbounded;
      break;
    case Status::Unbounded:
      res.status = Status::Infeasible;
      break;
    case Status::IterationLimit:
      res.status = Status::IterationLimit;
      break;
  }
  return res;
}

}  // namespace invlift::lp
