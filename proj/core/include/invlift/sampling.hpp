#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "invlift/polytope.hpp"

namespace invlift {

/* Stateless 64-bit mixer used to derive independent substream seeds. */
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/* Deterministic uniform doubles in [0, 1).  Only the raw engine output is
 * consumed (the standard pins down mt19937_64 bit-for-bit), so sequences
 * are identical across platforms and standard libraries. */
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed);

  double next();              // uniform in [0, 1)
  std::uint64_t next_u64();

 private:
  std::mt19937_64 gen_;
};

/* All grid nodes (integer multiples of eta per coordinate) inside the
 * region.  Throws when the bounding-box node count exceeds the cap. */
std::vector<Eigen::VectorXd> grid_points(const Polytope& region, double eta,
                                         std::size_t max_points = 2000000);

/* N i.i.d. uniform points by rejection from the bounding box.  Throws when
 * the observed acceptance rate degenerates below 1e-4. */
std::vector<Eigen::VectorXd> random_points(const Polytope& region, int N,
                                           std::uint64_t seed);

/* Outer offset of every halfspace by rho: exactly X + rho * unit ball for
 * unit-normalized rows. */
Polytope inflate_region(const Polytope& X, double rho);

/* Pitch that keeps an eta-grid of the region a valid covering after k
 * steps of an L-Lipschitz map: min(1, L^-k) * rho. */
double deflate_pitch(double rho, double lipschitz, int k);

/* Monte-Carlo covering falsifier: probes random region points and reports
 * the worst nearest-neighbor distance to the given point set.  Passing is
 * evidence, not proof; the constructive guarantee comes from the grid
 * pitch rule. */
struct CoveringCheck {
  bool covered = false;
  double worst_distance = 0.0;
  Eigen::VectorXd worst_point;
};

CoveringCheck covering_check(const std::vector<Eigen::VectorXd>& points,
                             const Polytope& region, double epsilon,
                             int probes, std::uint64_t seed);

/* Volume of X + r * unit ball, exact via the Steiner formula.  Supported
 * shapes: any bounded planar polytope (area + perimeter r + pi r^2) and
 * axis-aligned boxes in any dimension.  Throws otherwise. */
double inflated_volume(const Polytope& X, double r);

double unit_ball_volume(int dim);

/* Upper estimate of how many eta-balls it takes to cover any subset of
 * X + rho * ball: vol(X + (rho + eta/2) ball) / vol((eta/2) ball). */
double packing_bound(const Polytope& X, double eta, double rho = 0.0);

/* What a point sample guarantees about covering the sets it was drawn
 * for.  Grid samples cover at epsilon = eta * sqrt(n) with certainty;
 * random samples only with the stated probability. */
struct CoveringCertificate {
  enum class Kind { Grid, Random };
  Kind kind = Kind::Grid;
  double epsilon = 0.0;
  double eta = 0.0;                // pitch (grid) or ball radius (random)
  double probability_bound = 1.0;  // exactly 1 for grids
  double packing_estimate = 0.0;   // volume-ratio bound behind the probability
};

CoveringCertificate grid_certificate(int dim, double eta);

/* Probability bound for N uniform points over X + rho * ball forming an
 * eta-ball covering: 1 - packing * (1 - vol(eta ball)/vol(X + rho ball))^N,
 * clamped to [0, 1].  Conservative on both factors. */
CoveringCertificate random_certificate(const Polytope& X, double eta,
                                       double rho, int N);

}  // namespace invlift
