#pragma once

#include <Eigen/Dense>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/model.hpp"

namespace invlift {

/* Index set of the scaled degree-d monomial lift.  Entry alpha carries the
 * scaling sqrt(d! / prod alpha_i!), which makes the lift isometric on
 * Euclidean norms: ||lift(z)||_2 = ||z||_2^d. */
struct LiftIndex {
  int n = 0;
  int d = 0;
  std::vector<MultiIndex> exponents;  // graded-lex order within the degree
  Eigen::VectorXd scalings;

  int size() const { return static_cast<int>(exponents.size()); }
};

LiftIndex make_lift_index(int n, int d);

int lift_size(int n, int d);          // C(n+d-1, d)
int graded_lift_size(int n, int dmax);  // sum over d = 1..dmax

/* Scaled monomials of exact degree d, ordered as in make_lift_index. */
Eigen::VectorXd lift_vector(const Eigen::VectorXd& z, int d);

/* The unique matrix with  lift(A z, d) = lift_matrix(A, d) * lift(z, d),
 * built by symbolic multinomial expansion of the rows of A. */
Eigen::MatrixXd lift_matrix(const Eigen::MatrixXd& A, int d);

/* Stacked degrees 1..dmax and the matching block-diagonal matrix lift. */
Eigen::VectorXd lift_vector_graded(const Eigen::VectorXd& z, int dmax);
Eigen::MatrixXd lift_matrix_graded(const Eigen::MatrixXd& A, int dmax);

/* Polynomial q(z) with no constant term, rewritten as a row vector on the
 * graded lift: q(z) = row . lift_vector_graded(z, dmax).  Throws when q
 * has a constant term or exceeds dmax. */
Eigen::VectorXd polynomial_to_lift_row(int n_z, int dmax, const PolynomialCoordinate& q);

/* Cascade of a linear block driven by a polynomial function of an
 * autonomous polynomial-free block:
 *     eta+ = A_eta * eta + phi(z),   z+ = A_z * z,
 * with phi(z) = sum_d F[d-1] * lift_vector(z, d). */
struct CascadeSystem {
  Eigen::MatrixXd A_eta;
  Eigen::MatrixXd A_z;
  std::vector<Eigen::MatrixXd> F;  // F[d-1] acts on the degree-d lift

  int n_eta() const { return static_cast<int>(A_eta.rows()); }
  int n_z() const { return static_cast<int>(A_z.rows()); }
  int degree() const { return static_cast<int>(F.size()); }

  Eigen::VectorXd phi(const Eigen::VectorXd& z) const;
};

void validate_cascade(const CascadeSystem& cs);

/* phi given as a polynomial coefficient table in z (one coordinate per
 * eta component), converted to lift-basis blocks. */
std::vector<Eigen::MatrixXd> phi_blocks_from_polynomial(
    int n_eta, int n_z, int degree, const std::vector<PolynomialCoordinate>& phi);

/* The cascade as a plain discrete-time system on (eta, z). */
NonlinearSystem cascade_dynamics(const CascadeSystem& cs);

/* Exact finite-dimensional immersion of the cascade: the lifted state is
 * (eta, z^[1], ..., z^[degree]), the lifted map is upper block-triangular
 * with the graded matrix lift of A_z in the lower block, and reading back
 * the first n_eta + n_z coordinates inverts the transformation.  The
 * returned model has zero mismatch. */
LiftedModel build_cascade_immersion(const CascadeSystem& cs);

}  // namespace invlift
