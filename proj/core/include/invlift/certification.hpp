#pragma once

#include <Eigen/Dense>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/polytope.hpp"

namespace invlift {

/* Exact Lipschitz constant of f over a planar polytope: the gradient is
 * affine in the state, so the spectral norm peaks at a vertex. */
double lipschitz_vertex(const NonlinearSystem& sys, const Polytope& P);

/* Convex over-approximation of the one-step image of Z under the factored
 * dynamics x+ = (A + Abar(x)) x: the hull of all (A + Abar(v)) x over
 * vertex pairs (x, v). */
Hull2d reach_overapprox(const NonlinearSystem& sys, const Polytope& Z);

/* max over vertices v of ||A + Abar(v)||: a decay factor for every
 * trajectory while it stays in P. */
double contraction_factor(const NonlinearSystem& sys, const Polytope& P);

enum class Verdict { Pass, Fail, NotChecked };

/* Evidence that the dynamics admit the regularity a sampled-data pipeline
 * needs: a Lipschitz bound, an invariant subset of X reached from all of
 * X, and exponential envelopes for trajectory norms and for trajectory
 * divergence. */
struct AssumptionReport {
  double lipschitz = 0.0;  // over the (optionally inflated) constraint set

  std::vector<Polytope> reach_chain;
  std::vector<std::vector<Eigen::Vector2d>> chain_vertices;
  std::vector<bool> inside_X;  // chain member inside the constraint set
  int reentry = -1;  // first j with chain[j+1] inside chain[j] inside X

  std::vector<double> rho_factors;  // contraction factor per chain member
  std::vector<double> lip_factors;  // Lipschitz constant per chain member

  double a3_rate = 0.0;      // norm envelope |f^t(x)| <= c rate^t |x|
  double a3_constant = 0.0;
  double a4_rate = 0.0;      // divergence envelope, same shape
  double a4_constant = 0.0;

  Verdict a1 = Verdict::NotChecked;
  Verdict a2 = Verdict::NotChecked;
  Verdict a3 = Verdict::NotChecked;
  Verdict a4 = Verdict::NotChecked;
};

struct CertifyOptions {
  double rho = 0.0;    // widen the Lipschitz region to X + rho * ball
  int max_chain = 20;  // reach-set iterations before giving up on re-entry
  std::uint64_t seed = 1;  // for the factored-form spot check
};

/* Builds the reach chain from X, finds re-entry, and assembles the
 * envelope constants.  The factored form is spot-checked against f on
 * random points before anything relies on it. */
AssumptionReport certify(const NonlinearSystem& sys, const Polytope& X,
                         const CertifyOptions& opts = {});

}  // namespace invlift
