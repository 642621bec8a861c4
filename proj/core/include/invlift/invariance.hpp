#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/model.hpp"
#include "invlift/polytope.hpp"

namespace invlift {

/* Outcome of a maximal-admissible-invariant-set iteration.  `omega` lives
 * in the lifted space; `k_star` is the last step whose constraint rows
 * were incorporated.  When `finitely_determined` is set, every row of step
 * k_star + 1 was proven redundant, so omega is the exact fixed point;
 * otherwise the iteration was cut off at k_max and omega is only the
 * truncated intersection. */
struct InvariantResult {
  Polytope omega = Polytope::whole_space(0);
  int k_star = 0;
  bool finitely_determined = false;
  std::vector<int> rows_added;  // non-redundant rows kept per incorporated step
  std::vector<Eigen::VectorXd> tightening_trace;  // accumulated offsets per step
};

/* mask[i] = trajectory i stays in the region through step k. */
std::vector<bool> nonlinear_Ok_membership(const SampleSet& sample, int k);

inline constexpr int kDefaultKMax = 200;

/* Maximal admissible invariant set of xi+ = A xi under C xi in X:
 * intersection of { C A^k xi in X } until every new row is redundant. */
InvariantResult linear_mais(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                            const Polytope& X, int k_max = kDefaultKMax);

/* Robust variant for xi+ = A xi + d with d ranging over the mismatch set:
 * step-k offsets shrink by the accumulated supports of the mismatch along
 * the constraint directions.  An empty result is a valid outcome. */
InvariantResult tightened_mais(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                               const Polytope& X, const MismatchSet& mismatch,
                               int k_max = kDefaultKMax);

/* Same, reading A, C, and the mismatch from a lifted model.  `extra` is an
 * additional additive uncertainty (state disturbance mapped into the
 * lifted space) whose support is summed into the tightening. */
InvariantResult tightened_mais(const LiftedModel& model, const Polytope& X,
                               int k_max = kDefaultKMax,
                               const std::optional<MismatchSet>& extra = std::nullopt);

/* Membership of x in the preimage T^{-1}(omega).  `sys` is needed for
 * stacked transformations and may be null for cascade models. */
bool preimage_contains(const LiftedModel& model, const NonlinearSystem* sys,
                       const Polytope& omega, const Eigen::VectorXd& x,
                       double tol = kGeometryTol);

struct Algorithm1Options {
  double delta_target = 0.01;
  int M_max = 8;
  int k_max = kDefaultKMax;
  std::optional<double> ridge;  // forwarded to the regression
  /* Covering inflation: when eps > 0 the mismatch ball grows to cover
   * states within eps of the sample (needs the Lipschitz constant). */
  double covering_eps = 0.0;
  double lipschitz = 0.0;
  /* Extra lifted-space disturbance summed into the tightening. */
  std::optional<MismatchSet> extra;
};

struct Algorithm1Result {
  int M = 0;
  LiftedModel model;
  InvariantResult invariant;
  std::vector<int> tried_M;            // one entry per fit attempt
  std::vector<double> delta_hats;      // mismatch bound at each attempt
  std::vector<double> delta_schedule;  // target in force at each attempt
};

/* Fit-and-tighten loop: raise the lift order until the sampled mismatch
 * bound clears the target and the tightened set is nonempty, halving the
 * target whenever a small-enough bound still tightens the set away.
 * Throws ExhaustionError when M_max is passed without success. */
Algorithm1Result run_algorithm1(const SampleSet& sample, const Polytope& X,
                                const Algorithm1Options& opts);

}  // namespace invlift
