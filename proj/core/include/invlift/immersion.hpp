#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/model.hpp"

namespace invlift {

/* Ridge least-squares fit of matrices gamma_0..gamma_M with
 *     f^{M+1}(x) ~ sum_l gamma_l f^l(x)
 * over every sample point certified to stay in the region for M+1 steps
 * (violation index >= M+2).  The default ridge is
 * 1e-8 * trace(Gram) / dim(Gram). */
struct GammaFit {
  std::vector<Eigen::MatrixXd> gamma;
  Eigen::VectorXd residuals;      // per-point inf-norm residual, fit order
  std::vector<int> used_indices;  // sample indices that entered the fit
  double ridge = 0.0;
  bool gram_warning = false;      // Gram numerically singular despite ridge
  int M = 0;
};

GammaFit fit_gamma(const SampleSet& sample, int M,
                   std::optional<double> ridge = std::nullopt);

/* Largest inf-norm relation residual over every trajectory point that is
 * certified to lie M+1 steps inside the region: pairs (i, j) with
 * violation_index[i] >= j + M + 2 and j + M + 1 within the horizon.  Seeds
 * are the j = 0 pairs; later shifts are certified interior points that the
 * trajectories already visit, and including them makes the level-(M+1)
 * embedding of a level-M candidate provably no worse. */
double mismatch_bound(const SampleSet& sample,
                      const std::vector<Eigen::MatrixXd>& gamma, int M);

/* gamma' with gamma'_0 = 0 and gamma'_{l+1} = gamma_l: the canonical
 * feasible candidate one level up. */
std::vector<Eigen::MatrixXd> embed_candidate(const std::vector<Eigen::MatrixXd>& gamma);

/* Rank-revealing reduction of the stacked data span.  P selects the
 * coordinates the data actually excites; identity when the stacked map is
 * already independent (the usual case). */
struct BasisReduction {
  Eigen::MatrixXd P;  // (M+1)n x m, orthonormal columns (or identity)
  int m = 0;
  double min_singular_value = 0.0;     // smallest retained
  double dropped_singular_value = 0.0; // largest discarded (0 when none)
};

BasisReduction reduce_basis(const SampleSet& sample, int M, double rank_tol = 1e-8);

/* Companion-form lifted model from a fit: A = P^+ Gamma P, C = [I 0] P,
 * B = P^+ [0; I], with the mismatch set B * inf-ball(delta_hat). */
LiftedModel assemble(const GammaFit& fit, const BasisReduction& basis,
                     double delta_hat, double ball_radius = 0.0);

/* Widens a model's mismatch ball to also cover states up to eps away from
 * the sampled ones: radius grows by L_T (L_f + ||A||) eps with
 * L_T = max(1, L_f, ..., L_f^M) sqrt(M+1). */
MismatchSet inflate_for_covering(const LiftedModel& model, double lipschitz,
                                 double eps);

/* Exact min-max fit of the relation residual by LP, practical only for
 * small samples; at most `cap` filtered points are used (evenly strided).
 * Reports the optimal inf-norm bound next to the least-squares one. */
struct ChebyshevFit {
  std::vector<Eigen::MatrixXd> gamma;
  double delta_lp = 0.0;
  int points_used = 0;
};

ChebyshevFit fit_gamma_chebyshev(const SampleSet& sample, int M, int cap = 400);

}  // namespace invlift
