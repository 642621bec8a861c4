/* Micro-benchmarks for the hot paths: support queries (the LP behind every
 * geometric operation), the symbolic matrix lift, the linear invariant-set
 * iteration, and the regression fit.  Inputs are seeded so successive runs
 * measure the same problem instances. */

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/immersion.hpp"
#include "invlift/invariance.hpp"
#include "invlift/lifting.hpp"
#include "invlift/polytope.hpp"
#include "invlift/sampling.hpp"

using namespace invlift;

namespace {

/* Bounded polytope in R^dim with a box core and extra random cuts. */
Polytope random_polytope(int dim, int rows, std::uint64_t seed) {
  UniformSource rng(seed);
  Eigen::MatrixXd H(rows, dim);
  Eigen::VectorXd h(rows);
  for (int i = 0; i < rows; ++i) {
    if (i < 2 * dim) {
      H.row(i).setZero();
      H(i, i / 2) = (i % 2 == 0) ? 1.0 : -1.0;
      h(i) = 1.0;
    } else {
      Eigen::VectorXd a(dim);
      for (int j = 0; j < dim; ++j) a(j) = 2 * rng.next() - 1;
      if (a.norm() < 1e-9) a(0) = 1;
      H.row(i) = a.transpose() / a.norm();
      h(i) = 0.8 + 0.4 * rng.next();
    }
  }
  return Polytope(std::move(H), std::move(h));
}

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  UniformSource rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = 2 * rng.next() - 1;
  return m;
}

void BM_support_query(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const Polytope P = random_polytope(4, rows, 11);
  Eigen::VectorXd a = random_matrix(4, 1, 12);
  a /= a.norm();
  for (auto _ : state) benchmark::DoNotOptimize(support(P, a));
  state.SetComplexityN(rows);
}
BENCHMARK(BM_support_query)->Arg(16)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

void BM_lift_matrix(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const Eigen::MatrixXd A = random_matrix(3, 3, 21);
  for (auto _ : state) benchmark::DoNotOptimize(lift_matrix(A, degree));
}
BENCHMARK(BM_lift_matrix)->DenseRange(1, 5);

void BM_linear_mais(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd A = random_matrix(n, n, 31);
  const double spectral =
      Eigen::EigenSolver<Eigen::MatrixXd>(A).eigenvalues().cwiseAbs().maxCoeff();
  A *= 0.85 / spectral;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2, n);
  C(0, 0) = 1;
  C(1, n - 1) = 1;
  const Polytope X = Polytope::box(-Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2));
  for (auto _ : state) benchmark::DoNotOptimize(linear_mais(A, C, X));
}
BENCHMARK(BM_linear_mais)->Arg(2)->Arg(4)->Arg(8);

void BM_fit_gamma(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const PolynomialCoordinate f1{{{1, 0}, 0.4}, {{0, 1}, 0.3}, {{2, 0}, 0.05}};
  const PolynomialCoordinate f2{{{1, 0}, -0.2}, {{0, 1}, 0.5}, {{1, 1}, 0.04}};
  const NonlinearSystem sys = NonlinearSystem::polynomial({f1, f2});
  const Polytope X = Polytope::box(-Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2));
  const SampleSet sample = build_sample(sys, X, grid_points(X, 0.1), 8);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gamma(sample, M));
}
BENCHMARK(BM_fit_gamma)->Arg(0)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
