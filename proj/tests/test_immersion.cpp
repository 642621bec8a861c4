#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/errors.hpp"
#include "invlift/immersion.hpp"
#include "invlift/model.hpp"
#include "invlift/sampling.hpp"

using namespace invlift;

namespace {

/* Mildly nonlinear planar map, contractive on the unit box. */
NonlinearSystem quadratic_system() {
  PolynomialCoordinate f1{{{1, 0}, 0.4}, {{0, 1}, 0.3}, {{2, 0}, 0.05}};
  PolynomialCoordinate f2{{{1, 0}, -0.2}, {{0, 1}, 0.5}, {{1, 1}, 0.04}};
  return NonlinearSystem::polynomial({f1, f2});
}

NonlinearSystem linear_system(const Eigen::MatrixXd& A) {
  return NonlinearSystem::black_box(
      static_cast<int>(A.rows()),
      [A](const Eigen::VectorXd& x) { return Eigen::VectorXd(A * x); });
}

SampleSet grid_sample(const NonlinearSystem& sys, const Polytope& region,
                      double pitch, int horizon) {
  return build_sample(sys, region, grid_points(region, pitch), horizon);
}

Polytope unit_box(int n) {
  return Polytope::box(-Eigen::VectorXd::Ones(n), Eigen::VectorXd::Ones(n));
}

/* Reference mismatch bound: brute force over every certified pair (i, j)
 * with the trajectory still inside for M+1 more steps. */
double mismatch_oracle(const SampleSet& s, const std::vector<Eigen::MatrixXd>& g,
                       int M) {
  double worst = 0.0;
  const int n = static_cast<int>(s.points[0].size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int j = 0; j + M + 1 <= s.horizon; ++j) {
      if (s.violation_index[i] < j + M + 2) continue;
      if (static_cast<int>(s.trajectories[i].size()) <= j + M + 1) continue;
      Eigen::VectorXd pred = Eigen::VectorXd::Zero(n);
      for (int l = 0; l <= M; ++l) pred += g[l] * s.trajectories[i][j + l];
      worst = std::max(
          worst, (s.trajectories[i][j + M + 1] - pred).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("fit recovers the matrix of a linear system exactly") {
  Eigen::MatrixXd A(2, 2);
  A << 0.5, 0.2, -0.1, 0.6;
  const NonlinearSystem sys = linear_system(A);
  const SampleSet s = grid_sample(sys, unit_box(2), 0.25, 4);

  const GammaFit fit = fit_gamma(s, 0);
  REQUIRE(fit.gamma.size() == 1);
  CHECK((fit.gamma[0] - A).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(fit.residuals.maxCoeff() < 1e-6);
  CHECK(mismatch_bound(s, fit.gamma, 0) < 1e-6);
  CHECK_FALSE(fit.gram_warning);
  CHECK(fit.ridge > 0.0);
}

TEST_CASE("fit uses only points certified inside for M+1 steps") {
  Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(1, 1);
  const NonlinearSystem sys = linear_system(A);
  std::vector<Eigen::VectorXd> seeds;
  seeds.push_back(0.5 * Eigen::VectorXd::Ones(1));   // stays inside forever
  seeds.push_back(3.0 * Eigen::VectorXd::Ones(1));   // outside from the start
  seeds.push_back(-0.7 * Eigen::VectorXd::Ones(1));  // also stays inside
  const SampleSet s = build_sample(sys, unit_box(1), seeds, 4);

  const GammaFit fit = fit_gamma(s, 1);
  REQUIRE(fit.used_indices.size() == 2);
  CHECK(fit.used_indices[0] == 0);
  CHECK(fit.used_indices[1] == 2);
}

TEST_CASE("fit errors: no certified data, horizon too short") {
  const NonlinearSystem sys = linear_system(2.0 * Eigen::MatrixXd::Identity(1, 1));
  std::vector<Eigen::VectorXd> outside{3.0 * Eigen::VectorXd::Ones(1)};
  const SampleSet s = build_sample(sys, unit_box(1), outside, 5);
  CHECK_THROWS_AS(fit_gamma(s, 0), InsufficientSampleError);

  const NonlinearSystem stay = linear_system(0.5 * Eigen::MatrixXd::Identity(1, 1));
  const SampleSet s2 =
      build_sample(stay, unit_box(1), {0.5 * Eigen::VectorXd::Ones(1)}, 2);
  CHECK_THROWS_AS(fit_gamma(s2, 3), HorizonError);
  CHECK_THROWS_AS(fit_gamma(s2, -1), ValidationError);
}

TEST_CASE("mismatch bound equals the brute-force pair maximum") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.2, 8);
  for (int M = 0; M <= 2; ++M) {
    const GammaFit fit = fit_gamma(s, M);
    const double got = mismatch_bound(s, fit.gamma, M);
    CHECK(got == doctest::Approx(mismatch_oracle(s, fit.gamma, M)).epsilon(1e-12));
    CHECK(got > 0.0);
  }
}

TEST_CASE("embedding a candidate one level up never hurts the bound") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.2, 8);
  for (int M = 0; M <= 3; ++M) {
    const GammaFit fit = fit_gamma(s, M);
    const auto up = embed_candidate(fit.gamma);
    REQUIRE(up.size() == fit.gamma.size() + 1);
    CHECK(up[0].cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t l = 0; l < fit.gamma.size(); ++l)
      CHECK((up[l + 1] - fit.gamma[l]).cwiseAbs().maxCoeff() == 0.0);
    // The shifted-pair filter makes this an exact inequality, and the
    // refit at M+1 can only improve on the embedded candidate.
    const double at_M = mismatch_bound(s, fit.gamma, M);
    CHECK(mismatch_bound(s, up, M + 1) <= at_M + 1e-12);
    const GammaFit refit = fit_gamma(s, M + 1);
    CHECK(mismatch_bound(s, refit.gamma, M + 1) <= at_M + 1e-9);
  }
}

TEST_CASE("basis reduction: full-rank data keeps the identity") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.25, 5);
  const BasisReduction basis = reduce_basis(s, 1);
  CHECK(basis.m == 4);
  CHECK((basis.P - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(basis.min_singular_value > 0.0);
  CHECK(basis.dropped_singular_value == 0.0);
}

TEST_CASE("basis reduction: linear dynamics collapse the stacked span") {
  // For x+ = 0.5 x the stacked pairs (x, 0.5 x) live on a line.
  const NonlinearSystem sys = linear_system(0.5 * Eigen::MatrixXd::Identity(1, 1));
  const SampleSet s = grid_sample(sys, unit_box(1), 0.1, 4);
  const BasisReduction basis = reduce_basis(s, 1);
  CHECK(basis.m == 1);
  REQUIRE(basis.P.cols() == 1);
  CHECK(basis.P.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // The retained direction is proportional to (1, 0.5).
  const double ratio = basis.P(1, 0) / basis.P(0, 0);
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("assembled model has the companion structure on an identity basis") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.2, 6);
  const int M = 1;
  const GammaFit fit = fit_gamma(s, M);
  const BasisReduction basis = reduce_basis(s, M);
  const double dh = mismatch_bound(s, fit.gamma, M);
  const LiftedModel model = assemble(fit, basis, dh, 0.0);

  CHECK(model.kind == LiftedModel::Transform::Stacked);
  CHECK(model.M == M);
  CHECK(model.lifted_dim() == 4);
  CHECK(model.delta_hat == dh);
  CHECK_FALSE(model.exact);
  // Top block row shifts, bottom block row applies the fitted gammas.
  CHECK((model.A.block(0, 2, 2, 2) - Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs().maxCoeff() == 0.0);
  CHECK(model.A.block(0, 0, 2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((model.A.block(2, 0, 2, 2) - fit.gamma[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((model.A.block(2, 2, 2, 2) - fit.gamma[1]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((model.C - (Eigen::MatrixXd(2, 4) << Eigen::MatrixXd::Identity(2, 2),
                    Eigen::MatrixXd::Zero(2, 2)).finished())
            .cwiseAbs().maxCoeff() == 0.0);
  CHECK((model.B - (Eigen::MatrixXd(4, 2) << Eigen::MatrixXd::Zero(2, 2),
                    Eigen::MatrixXd::Identity(2, 2)).finished())
            .cwiseAbs().maxCoeff() == 0.0);
  CHECK(model.mismatch.delta == dh);
  CHECK(model.mismatch.ball_radius == 0.0);

  // The transform embeds the trajectory stack and reads the state back.
  const Eigen::VectorXd x = 0.3 * Eigen::VectorXd::Ones(2);
  const Eigen::VectorXd Tx = model.transform(&sys, x);
  CHECK((model.C * Tx - x).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXd resid =
      model.transform(&sys, sys.eval(x)) - model.A * Tx;
  CHECK(resid.cwiseAbs().maxCoeff() <= dh + 1e-9);
}

TEST_CASE("model transform on a reduced basis still reads the state back") {
  const NonlinearSystem sys = linear_system(0.5 * Eigen::MatrixXd::Identity(1, 1));
  const SampleSet s = grid_sample(sys, unit_box(1), 0.1, 4);
  const GammaFit fit = fit_gamma(s, 1);
  const BasisReduction basis = reduce_basis(s, 1);
  REQUIRE(basis.m == 1);
  const LiftedModel model =
      assemble(fit, basis, mismatch_bound(s, fit.gamma, 1), 0.0);
  CHECK(model.lifted_dim() == 1);
  for (double x0 : {-0.8, 0.1, 0.7}) {
    const Eigen::VectorXd x = x0 * Eigen::VectorXd::Ones(1);
    const Eigen::VectorXd Tx = model.transform(&sys, x);
    CHECK((model.C * Tx - x).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::VectorXd Tfx = model.transform(&sys, sys.eval(x));
    CHECK((Tfx - model.A * Tx).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("covering inflation widens the ball by the documented rate") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.2, 6);
  const GammaFit fit = fit_gamma(s, 2);
  const BasisReduction basis = reduce_basis(s, 2);
  const LiftedModel model = assemble(fit, basis, 0.01, 0.0);

  const double L = 1.3, eps = 0.05;
  const MismatchSet wide = inflate_for_covering(model, L, eps);
  const double lt = std::max({1.0, L, L * L}) * std::sqrt(3.0);
  const double norm_a =
      Eigen::JacobiSVD<Eigen::MatrixXd>(model.A).singularValues()(0);
  CHECK(wide.ball_radius ==
        doctest::Approx(lt * (L + norm_a) * eps).epsilon(1e-12));
  CHECK(wide.delta == model.mismatch.delta);
  CHECK(inflate_for_covering(model, L, 0.0).ball_radius == 0.0);
  CHECK_THROWS_AS(inflate_for_covering(model, -1.0, eps), ValidationError);
}

TEST_CASE("exact min-max fit never loses to least squares") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.3, 6);
  for (int M = 0; M <= 1; ++M) {
    const GammaFit ls = fit_gamma(s, M);
    const ChebyshevFit cheb = fit_gamma_chebyshev(s, M);
    CHECK(cheb.points_used > 0);
    CHECK(cheb.delta_lp >= 0.0);
    // The LP optimum over the seed pairs cannot exceed the bound the
    // least-squares candidate attains over the larger shifted-pair set.
    CHECK(cheb.delta_lp <= mismatch_bound(s, ls.gamma, M) + 1e-10);
  }

  // On linear data the optimal residual is numerically zero.
  Eigen::MatrixXd A(2, 2);
  A << 0.4, 0.1, -0.2, 0.5;
  const SampleSet lin = grid_sample(linear_system(A), unit_box(2), 0.4, 4);
  CHECK(fit_gamma_chebyshev(lin, 0).delta_lp < 1e-9);
}

TEST_CASE("model serialization round-trips bit for bit") {
  const NonlinearSystem sys = quadratic_system();
  const SampleSet s = grid_sample(sys, unit_box(2), 0.25, 6);
  const GammaFit fit = fit_gamma(s, 1);
  const BasisReduction basis = reduce_basis(s, 1);
  const LiftedModel model =
      assemble(fit, basis, mismatch_bound(s, fit.gamma, 1), 1e-3);

  std::stringstream ss;
  write_model(ss, model);
  const LiftedModel back = read_model(ss);
  CHECK(back.kind == model.kind);
  CHECK(back.M == model.M);
  CHECK(back.exact == model.exact);
  CHECK((back.A - model.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.C - model.C).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.B - model.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.P - model.P).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.P_pinv - model.P_pinv).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.delta_hat == model.delta_hat);
  CHECK(back.mismatch.delta == model.mismatch.delta);
  CHECK(back.mismatch.ball_radius == model.mismatch.ball_radius);
  REQUIRE(back.gamma.size() == model.gamma.size());
  for (std::size_t l = 0; l < model.gamma.size(); ++l)
    CHECK((back.gamma[l] - model.gamma[l]).cwiseAbs().maxCoeff() == 0.0);
}
