/* Acceptance gate for the release: eight end-to-end criteria, one PASS or
 * FAIL line each, exit code equal to the number of failures.  Tolerances
 * and runtime budgets are pinned here on purpose; loosening them is a
 * release decision, not a code change. */

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <bundled_configs.hpp>

#include "invlift/certification.hpp"
#include "invlift/config.hpp"
#include "invlift/dynamics.hpp"
#include "invlift/errors.hpp"
#include "invlift/immersion.hpp"
#include "invlift/invariance.hpp"
#include "invlift/lifting.hpp"
#include "invlift/model.hpp"
#include "invlift/polytope.hpp"
#include "invlift/sampling.hpp"

using namespace invlift;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

/* Inner subset of outer, every outer row verified by a support query (an
 * LP over the inner set). */
bool subset_by_lp(const Polytope& inner, const Polytope& outer, double tol) {
  for (int i = 0; i < outer.num_rows(); ++i) {
    const Eigen::VectorXd a = outer.normals().row(i).transpose();
    if (support(inner, a) > outer.offsets()(i) + tol) return false;
  }
  return true;
}

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

/* Shared building-example artifacts: criterion 3 produces them, criteria
 * 4, 7, and 8 reuse them. */
struct BuildingRun {
  RunConfig cfg;
  NonlinearSystem sys =
      NonlinearSystem::black_box(2, [](const Eigen::VectorXd& x) { return x; });
  Polytope X = Polytope::whole_space(2);
  std::vector<Eigen::VectorXd> grid;
  SampleSet sample;
  Algorithm1Result result;
};
std::optional<BuildingRun> g_building;

Outcome criterion1_exact_cascade_immersion() {
  const auto start = Clock::now();
  const RunConfig cfg = parse_config(tools::kWienerConfig);
  const CascadeSystem cs = make_cascade(cfg.system);
  const LiftedModel model = build_cascade_immersion(cs);
  const Polytope Xl = make_constraints(cfg);
  const NonlinearSystem sys = cascade_dynamics(cs);

  if (model.lifted_dim() != 11)
    return {false, "lifted dimension " + std::to_string(model.lifted_dim()) +
                       ", expected 11"};

  /* 1000 states drawn uniformly from the constraint set: rejection over
   * the coordinate bounds |eta_i| <= 5, |z_i| <= 3 that X implies. */
  UniformSource rng(mix_seed(cfg.pipeline.seed, 101));
  int accepted = 0;
  long draws = 0;
  double worst_relation = 0.0, worst_readback = 0.0;
  while (accepted < 1000) {
    if (++draws > 1000000) return {false, "state sampling stalled"};
    Eigen::VectorXd x(4);
    x << -5 + 10 * rng.next(), -5 + 10 * rng.next(), -3 + 6 * rng.next(),
        -3 + 6 * rng.next();
    const Eigen::VectorXd Tx = model.transform(nullptr, x);
    if (!contains(Xl, Tx)) continue;
    ++accepted;
    const Eigen::VectorXd Tfx = model.transform(nullptr, sys.eval(x));
    worst_relation = std::max(
        worst_relation, (Tfx - model.A * Tx).lpNorm<Eigen::Infinity>());
    worst_readback = std::max(
        worst_readback, (model.C * Tx - x).lpNorm<Eigen::Infinity>());
  }
  const double secs = seconds_since(start);
  const bool pass = worst_relation < 1e-9 && worst_readback < 1e-12 && secs < 1.0;
  return {pass, "dim 11, relation residual " + fmt(worst_relation) +
                    " (< 1e-9), readback " + fmt(worst_readback) +
                    " (< 1e-12), " + fmt(secs, 2) + " s (< 1)"};
}

Outcome criterion2_planar_certification_rates() {
  const auto start = Clock::now();
  const RunConfig cfg = parse_config(tools::kBuildingConfig);
  const NonlinearSystem sys = make_system(cfg.system);
  const Polytope X = make_constraints(cfg);

  CertifyOptions co;
  co.max_chain = cfg.pipeline.max_chain;
  co.seed = cfg.pipeline.seed;
  const AssumptionReport rep = certify(sys, X, co);
  if (rep.reach_chain.size() < 7)
    return {false, "reach chain has only " +
                       std::to_string(rep.reach_chain.size()) + " members"};

  const Polytope& R5 = rep.reach_chain[5];
  const Polytope& R6 = rep.reach_chain[6];
  const double lip_X = rep.lipschitz;
  const double rho_R5 = contraction_factor(sys, R5);
  const double lip_R5 = lipschitz_vertex(sys, R5);
  const bool nested = subset_by_lp(R6, R5, 1e-9) && subset_by_lp(R5, X, 1e-9);

  const double secs = seconds_since(start);
  const bool pass = std::abs(lip_X - 1.5401) < 1e-3 &&
                    std::abs(rho_R5 - 0.5822) < 1e-3 &&
                    std::abs(lip_R5 - 0.6546) < 1e-3 && nested && secs < 5.0;
  return {pass, "Lipschitz over X " + fmt(lip_X, 5) +
                    " (1.5401 +- 1e-3), contraction over step-5 reach set " +
                    fmt(rho_R5, 5) + " (0.5822 +- 1e-3), Lipschitz there " +
                    fmt(lip_R5, 5) + " (0.6546 +- 1e-3), nesting " +
                    (nested ? "verified" : "FAILED") + ", " + fmt(secs, 2) +
                    " s (< 5)"};
}

Outcome criterion3_fit_and_tighten_pipeline() {
  const auto start = Clock::now();
  BuildingRun run{parse_config(tools::kBuildingConfig)};
  run.sys = make_system(run.cfg.system);
  run.X = make_constraints(run.cfg);
  run.grid = grid_points(run.X, *run.cfg.pipeline.grid_pitch);
  run.sample = build_sample(run.sys, run.X, run.grid, run.cfg.pipeline.horizon);

  Algorithm1Options opts;
  opts.delta_target = run.cfg.pipeline.delta_target;
  opts.M_max = run.cfg.pipeline.M_max;
  opts.k_max = run.cfg.pipeline.k_max;
  run.result = run_algorithm1(run.sample, run.X, opts);

  const std::size_t points = run.grid.size();
  const bool grid_ok = points >= 12000 && points <= 14000;
  const bool horizon_ok = run.cfg.pipeline.horizon >= 12;
  const bool nonempty = !run.result.invariant.omega.marked_empty() &&
                        !is_empty(run.result.invariant.omega);
  const double dh = run.result.model.delta_hat;
  const int M = run.result.M;
  g_building = std::move(run);

  const double secs = seconds_since(start);
  const bool pass = grid_ok && horizon_ok && M == 5 && dh < 0.01 && nonempty &&
                    secs < 120.0;
  return {pass, std::to_string(points) + " grid points (12000..14000), " +
                    "selected order " + std::to_string(M) +
                    " (expected 5), mismatch bound " + fmt(dh) +
                    " (< 0.01), invariant set " +
                    (nonempty ? "nonempty" : "EMPTY") + ", " + fmt(secs, 2) +
                    " s (< 120)"};
}

Outcome criterion4_invariance_by_simulation() {
  if (!g_building) return {false, "skipped: the pipeline criterion failed"};
  const BuildingRun& run = *g_building;
  const LiftedModel& model = run.result.model;
  const Polytope& omega = run.result.invariant.omega;

  /* Nominal check: states accepted by the preimage must map back into it
   * and into the constraint set. */
  int accepted = 0, violations = 0;
  std::vector<Eigen::VectorXd> kept;
  for (int batch = 0; accepted < 10000; ++batch) {
    if (batch >= 40) return {false, "preimage sampling stalled"};
    const auto draws =
        random_points(run.X, 20000, mix_seed(run.cfg.pipeline.seed, 400 + batch));
    for (const Eigen::VectorXd& x : draws) {
      if (!preimage_contains(model, &run.sys, omega, x)) continue;
      if (++accepted > 10000) break;
      const Eigen::VectorXd y = run.sys.eval(x);
      if (!preimage_contains(model, &run.sys, omega, y, 1e-7) ||
          !contains(run.X, y, 1e-7))
        ++violations;
      kept.push_back(x);
    }
  }

  /* Disturbed check: tighten for the declared disturbance radius exactly
   * as the pipeline does, then push a subset of accepted states through f
   * plus random disturbances from the Euclidean ball. */
  const double radius = run.cfg.system.disturbance_radius;
  const double L = lipschitz_vertex(run.sys, run.X);
  double gain = 0.0;
  for (int level = 0; level <= model.M; ++level) gain += std::pow(L, level);
  MismatchSet extra = MismatchSet::zero(model.lifted_dim());
  extra.ball_radius = gain * radius;
  const InvariantResult disturbed =
      tightened_mais(model, run.X, run.cfg.pipeline.k_max, extra);
  if (disturbed.omega.marked_empty() || is_empty(disturbed.omega))
    return {false, "disturbed invariant set is empty"};

  std::vector<Eigen::VectorXd> subset;
  for (const Eigen::VectorXd& x : kept) {
    if (subset.size() == 32) break;
    if (preimage_contains(model, &run.sys, disturbed.omega, x))
      subset.push_back(x);
  }
  if (subset.empty()) return {false, "no state accepted by the disturbed set"};

  int disturbed_violations = 0;
  UniformSource rng(mix_seed(run.cfg.pipeline.seed, 500));
  for (const Eigen::VectorXd& x : subset) {
    const Eigen::VectorXd fx = run.sys.eval(x);
    for (int k = 0; k < 1000; ++k) {
      const double angle = 2.0 * 3.14159265358979323846 * rng.next();
      const double r = radius * std::sqrt(rng.next());
      Eigen::VectorXd y = fx;
      y(0) += r * std::cos(angle);
      y(1) += r * std::sin(angle);
      if (!preimage_contains(model, &run.sys, disturbed.omega, y, 1e-7) ||
          !contains(run.X, y, 1e-7))
        ++disturbed_violations;
    }
  }

  const bool pass = violations == 0 && disturbed_violations == 0;
  return {pass, "10000 nominal states: " + std::to_string(violations) +
                    " violations; " + std::to_string(subset.size()) +
                    " x 1000 disturbed steps: " +
                    std::to_string(disturbed_violations) +
                    " violations (tolerance 1e-7)"};
}

Outcome criterion5_linear_mais_vs_brute_force() {
  const auto start = Clock::now();
  UniformSource rng(mix_seed(9, 5));
  const int kSteps = 50;

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() * 4);
    const int m = 1 + static_cast<int>(rng.next() * 4);

    /* Random Schur-stable dynamics and an observable readout. */
    Eigen::MatrixXd A(n, n);
    do {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 2 * rng.next() - 1;
    } while (A.norm() < 1e-6);
    const double spectral =
        Eigen::EigenSolver<Eigen::MatrixXd>(A).eigenvalues().cwiseAbs().maxCoeff();
    A *= (0.5 + 0.35 * rng.next()) / std::max(spectral, 1e-9);

    Eigen::MatrixXd C(m, n);
    for (int tries = 0;; ++tries) {
      if (tries > 100) return {false, "observable readout sampling stalled"};
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) C(i, j) = 2 * rng.next() - 1;
      Eigen::MatrixXd obs(m * n, n);
      Eigen::MatrixXd CAk = C;
      for (int k = 0; k < n; ++k) {
        obs.middleRows(k * m, m) = CAk;
        CAk *= A;
      }
      if (Eigen::FullPivLU<Eigen::MatrixXd>(obs).rank() == n) break;
    }

    /* Bounded output polytope: a box plus two random cuts. */
    Eigen::MatrixXd H(2 * m + 2, m);
    Eigen::VectorXd h(2 * m + 2);
    for (int i = 0; i < m; ++i) {
      H.row(i).setZero();
      H(i, i) = 1;
      h(i) = 0.7 + 0.6 * rng.next();
      H.row(m + i).setZero();
      H(m + i, i) = -1;
      h(m + i) = 0.7 + 0.6 * rng.next();
    }
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd a(m);
      for (int j = 0; j < m; ++j) a(j) = 2 * rng.next() - 1;
      if (a.norm() < 1e-6) a(0) = 1;
      H.row(2 * m + i) = a.transpose() / a.norm();
      h(2 * m + i) = 0.6 + 0.6 * rng.next();
    }
    const Polytope X(H, h);

    const InvariantResult res = linear_mais(A, C, X);

    Eigen::MatrixXd Hb((kSteps + 1) * X.num_rows(), n);
    Eigen::VectorXd hb((kSteps + 1) * X.num_rows());
    Eigen::MatrixXd CAk = C;
    for (int k = 0; k <= kSteps; ++k) {
      Hb.middleRows(k * X.num_rows(), X.num_rows()) = X.normals() * CAk;
      hb.segment(k * X.num_rows(), X.num_rows()) = X.offsets();
      CAk = CAk * A;
    }
    const Polytope brute(Hb, hb);

    if (!res.finitely_determined || res.k_star > kSteps)
      return {false, "trial " + std::to_string(trial) + ": not determined by step " +
                         std::to_string(kSteps)};
    if (!subset_by_lp(res.omega, brute, 1e-7) ||
        !subset_by_lp(brute, res.omega, 1e-7))
      return {false, "trial " + std::to_string(trial) +
                         ": sets differ beyond 1e-7 (n=" + std::to_string(n) +
                         ", m=" + std::to_string(m) + ")"};
  }

  const double secs = seconds_since(start);
  return {secs < 30.0, "20 random stable observable pairs match the 50-step "
                       "intersection bidirectionally at 1e-7, " +
                           fmt(secs, 2) + " s (< 30)"};
}

Outcome criterion6_scalar_tightened_oracles() {
  const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, 0.9);
  const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(1, 1);
  const Polytope X = Polytope::box(-Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
  const Eigen::VectorXd e1 = Eigen::VectorXd::Ones(1);

  /* delta = 0.1 balances the contraction exactly: every tightened row
   * renormalizes to x <= 1, so the box survives unchanged. */
  MismatchSet small;
  small.image_map = Eigen::MatrixXd::Identity(1, 1);
  small.delta = 0.1;
  const InvariantResult keep = tightened_mais(A, C, X, small);
  const bool keep_ok = !keep.omega.marked_empty() &&
                       std::abs(support(keep.omega, e1) - 1.0) < 1e-12 &&
                       std::abs(support(keep.omega, -e1) - 1.0) < 1e-12 &&
                       keep.k_star == 0 && keep.finitely_determined;

  /* delta = 0.2 overwhelms it: offsets 2 - 0.9^{-k} head to minus
   * infinity, so the set empties out. */
  MismatchSet large = small;
  large.delta = 0.2;
  const InvariantResult gone = tightened_mais(A, C, X, large);
  const bool gone_ok = gone.omega.marked_empty() || is_empty(gone.omega);

  return {keep_ok && gone_ok,
          std::string("delta 0.1 keeps [-1, 1] (") +
              (keep_ok ? "ok" : "WRONG") + "), delta 0.2 empties the set (" +
              (gone_ok ? "ok" : "WRONG") + ")"};
}

Outcome criterion7_embedded_candidate_monotonicity() {
  if (!g_building) return {false, "skipped: the pipeline criterion failed"};
  const SampleSet& sample = g_building->sample;

  double worst_excess = -1e300;
  for (int M = 0; M <= 7; ++M) {
    const GammaFit fit = fit_gamma(sample, M);
    const double at_M = mismatch_bound(sample, fit.gamma, M);
    const double embedded =
        mismatch_bound(sample, embed_candidate(fit.gamma), M + 1);
    worst_excess = std::max(worst_excess, embedded - at_M);
  }
  return {worst_excess <= 1e-9,
          "max increase of the embedded bound over orders 0..7 is " +
              fmt(worst_excess) + " (<= 1e-9)"};
}

Outcome criterion8_grid_covering_check() {
  if (!g_building) return {false, "skipped: the pipeline criterion failed"};
  const double eta = *g_building->cfg.pipeline.grid_pitch;
  const double eps = eta * std::sqrt(2.0);
  const CoveringCheck check =
      covering_check(g_building->grid, g_building->X, eps, 10000,
                     mix_seed(g_building->cfg.pipeline.seed, 800));
  return {check.covered, "10000 probes at epsilon " + fmt(eps) +
                             ", worst distance " + fmt(check.worst_distance) +
                             (check.covered ? " (covered)" : " (FALSIFIED)")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact cascade immersion", criterion1_exact_cascade_immersion},
      {"planar certification rates", criterion2_planar_certification_rates},
      {"fit-and-tighten pipeline", criterion3_fit_and_tighten_pipeline},
      {"invariance by simulation", criterion4_invariance_by_simulation},
      {"linear invariant set vs brute force", criterion5_linear_mais_vs_brute_force},
      {"scalar tightened oracles", criterion6_scalar_tightened_oracles},
      {"embedded candidate monotonicity", criterion7_embedded_candidate_monotonicity},
      {"grid covering check", criterion8_grid_covering_check},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("%s  criterion %zu  %s: %s\n", out.pass ? "PASS" : "FAIL",
                i + 1, criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
