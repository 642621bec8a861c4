#include "invlift/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invlift/errors.hpp"

namespace invlift {

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = std::accumulate(a.begin(), a.end(), 0);
  const int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da < db;
  // Same degree: descending lexicographic, i.e. (2,0) before (1,1).
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

double evaluate_polynomial(const PolynomialCoordinate& poly, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const auto& term : poly) {
    double mono = term.coefficient;
    for (std::size_t i = 0; i < term.exponents.size(); ++i)
      for (int p = 0; p < term.exponents[i]; ++p) mono *= x(static_cast<Eigen::Index>(i));
    acc += mono;
  }
  return acc;
}

namespace {

/* Differentiates a polynomial table and, when every entry of the Jacobian
 * is affine in x, packages it as an AffineGradient.  Degree <= 2 systems
 * always qualify. */
std::optional<AffineGradient> derive_affine_gradient(
    const std::vector<PolynomialCoordinate>& coords) {
  const int n = static_cast<int>(coords.size());
  AffineGradient g;
  g.A0 = Eigen::MatrixXd::Zero(n, n);
  g.G.assign(n, Eigen::MatrixXd::Zero(n, n));

  for (int i = 0; i < n; ++i) {
    for (const auto& term : coords[i]) {
      for (int j = 0; j < n; ++j) {
        if (term.exponents[j] == 0) continue;
        MultiIndex de = term.exponents;
        de[j] -= 1;
        const double c = term.coefficient * term.exponents[j];
        const int deg = std::accumulate(de.begin(), de.end(), 0);
        if (deg == 0) {
          g.A0(i, j) += c;
        } else if (deg == 1) {
          const auto it = std::find(de.begin(), de.end(), 1);
          g.G[static_cast<int>(it - de.begin())](i, j) += c;
        } else {
          return std::nullopt;  // Jacobian not affine in the state
        }
      }
    }
  }
  return g;
}

void sort_terms(PolynomialCoordinate& poly) {
  std::sort(poly.begin(), poly.end(), [](const auto& a, const auto& b) {
    return graded_lex_less(a.exponents, b.exponents);
  });
}

}  // namespace

NonlinearSystem NonlinearSystem::polynomial(std::vector<PolynomialCoordinate> coords) {
  if (coords.empty()) throw ValidationError("polynomial system: no coordinates");
  const std::size_t n = coords.size();
  for (auto& c : coords) {
    for (const auto& term : c)
      if (term.exponents.size() != n)
        throw ValidationError("polynomial system: exponent tuple length mismatch");
    sort_terms(c);
  }
  NonlinearSystem sys;
  sys.dim_ = static_cast<int>(n);
  sys.coords_ = std::move(coords);
  sys.gradient_ = derive_affine_gradient(sys.coords_);
  // eval_ stays unset: eval() reads the coefficient table directly.
  return sys;
}

NonlinearSystem NonlinearSystem::black_box(
    int dim, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f) {
  if (dim <= 0) throw ValidationError("black-box system: nonpositive dimension");
  if (!f) throw ValidationError("black-box system: missing evaluator");
  NonlinearSystem sys;
  sys.dim_ = dim;
  sys.eval_ = std::move(f);
  return sys;
}

Eigen::VectorXd NonlinearSystem::eval(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw ValidationError("system eval: state dimension mismatch");
  if (is_polynomial()) {
    Eigen::VectorXd y(dim_);
    for (int i = 0; i < dim_; ++i) y(i) = evaluate_polynomial(coords_[i], x);
    return y;
  }
  Eigen::VectorXd y = eval_(x);
  if (y.size() != dim_) throw ValidationError("system eval: map changed dimension");
  return y;
}

void NonlinearSystem::set_factored_form(FactoredForm f) {
  if (f.A.rows() != dim_ || f.A.cols() != dim_ ||
      f.Abar0.rows() != dim_ || f.Abar0.cols() != dim_ ||
      static_cast<int>(f.Abar.size()) != dim_)
    throw ValidationError("factored form: dimension mismatch");
  for (const auto& m : f.Abar)
    if (m.rows() != dim_ || m.cols() != dim_)
      throw ValidationError("factored form: dimension mismatch");
  factored_ = std::move(f);
}

Eigen::VectorXd iterate(const NonlinearSystem& sys, const Eigen::VectorXd& x, int t) {
  if (t < 0) throw ValidationError("iterate: negative step count");
  Eigen::VectorXd y = x;
  for (int s = 0; s < t; ++s) y = sys.eval(y);
  return y;
}

Eigen::VectorXd stack_trajectory(const NonlinearSystem& sys, const Eigen::VectorXd& x, int M) {
  if (M < 0) throw ValidationError("stack_trajectory: negative horizon");
  const int n = sys.dim();
  Eigen::VectorXd out((M + 1) * n);
  Eigen::VectorXd y = x;
  out.head(n) = y;
  for (int s = 1; s <= M; ++s) {
    y = sys.eval(y);
    out.segment(s * n, n) = y;
  }
  return out;
}

SampleSet build_sample(const NonlinearSystem& sys, const Polytope& region,
                       const std::vector<Eigen::VectorXd>& seeds, int horizon,
                       double tol) {
  if (horizon < 0) throw ValidationError("build_sample: negative horizon");
  if (region.dim() != sys.dim())
    throw ValidationError("build_sample: region dimension mismatch");

  SampleSet out;
  out.horizon = horizon;
  out.points.reserve(seeds.size());
  out.trajectories.reserve(seeds.size());
  out.violation_index.reserve(seeds.size());

  for (const auto& seed : seeds) {
    if (seed.size() != sys.dim())
      throw ValidationError("build_sample: seed dimension mismatch");
    std::vector<Eigen::VectorXd> traj;
    traj.reserve(horizon + 1);
    int violation = kNoViolation;
    Eigen::VectorXd y = seed;
    for (int t = 0; t <= horizon; ++t) {
      if (!y.allFinite()) {  // diverged: record and stop storing
        violation = std::min(violation, t);
        break;
      }
      traj.push_back(y);
      if (violation == kNoViolation && !contains(region, y, tol)) violation = t;
      if (t < horizon) y = sys.eval(y);
    }
    out.points.push_back(seed);
    out.trajectories.push_back(std::move(traj));
    out.violation_index.push_back(violation);
  }
  return out;
}

}  // namespace invlift
