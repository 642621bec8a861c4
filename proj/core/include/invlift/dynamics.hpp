#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "invlift/polytope.hpp"

namespace invlift {

/* Dense multi-index: one exponent per state coordinate. */
using MultiIndex = std::vector<int>;

/* One output coordinate of a polynomial map as (exponent, coefficient)
 * terms.  Terms are kept in graded-lexicographic order and summed in that
 * order, so evaluation is reproducible bit-for-bit across runs. */
struct PolynomialTerm {
  MultiIndex exponents;
  double coefficient;
};
using PolynomialCoordinate = std::vector<PolynomialTerm>;

/* Graded-lex comparison: lower total degree first; within a degree,
 * lexicographically descending exponent tuples. */
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

double evaluate_polynomial(const PolynomialCoordinate& poly, const Eigen::VectorXd& x);

/* Gradient affine in the state: grad f(x) = A0 + sum_i x_i * G[i]. */
struct AffineGradient {
  Eigen::MatrixXd A0;
  std::vector<Eigen::MatrixXd> G;
};

/* State-factored form  f(x) = (A + Abar(x)) x  with Abar affine in x:
 * Abar(x) = Abar0 + sum_i x_i * Abar[i].  Declared by the user and checked
 * against f on random points before certification uses it. */
struct FactoredForm {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Abar0;
  std::vector<Eigen::MatrixXd> Abar;
};

/* Discrete-time system x+ = f(x).  Polynomial systems carry their
 * coefficient table (the canonical evaluator); black-box systems only the
 * callable.  The optional blocks feed the certification module. */
class NonlinearSystem {
 public:
  static NonlinearSystem polynomial(std::vector<PolynomialCoordinate> coords);
  static NonlinearSystem black_box(int dim, std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f);

  int dim() const { return dim_; }
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  bool is_polynomial() const { return !coords_.empty(); }
  const std::vector<PolynomialCoordinate>& coefficients() const { return coords_; }

  const std::optional<AffineGradient>& affine_gradient() const { return gradient_; }
  const std::optional<FactoredForm>& factored_form() const { return factored_; }
  void set_factored_form(FactoredForm f);

 private:
  int dim_ = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval_;
  std::vector<PolynomialCoordinate> coords_;
  std::optional<AffineGradient> gradient_;
  std::optional<FactoredForm> factored_;
};

/* f composed t times; t = 0 is the identity. */
Eigen::VectorXd iterate(const NonlinearSystem& sys, const Eigen::VectorXd& x, int t);

/* Stacked map (x, f(x), ..., f^M(x)) as one vector of length (M+1)*n. */
Eigen::VectorXd stack_trajectory(const NonlinearSystem& sys, const Eigen::VectorXd& x, int M);

inline constexpr int kNoViolation = std::numeric_limits<int>::max();

/* Seed points with their forward trajectories and the first step at which
 * each trajectory leaves the region (kNoViolation if it never does within
 * the horizon).  A non-finite state counts as a violation at that step and
 * truncates the stored trajectory. */
struct SampleSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<std::vector<Eigen::VectorXd>> trajectories;  // [i][t], t <= horizon
  std::vector<int> violation_index;
  int horizon = 0;

  std::size_t size() const { return points.size(); }
};

SampleSet build_sample(const NonlinearSystem& sys, const Polytope& region,
                       const std::vector<Eigen::VectorXd>& seeds, int horizon,
                       double tol = kGeometryTol);

}  // namespace invlift
