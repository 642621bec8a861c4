#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/polytope.hpp"

namespace invlift {

/* A linear system (A, C) in a lifted space together with the nonlinear
 * change of coordinates T that embeds the original state, and the additive
 * mismatch set bounding how far T(f(x)) - A T(x) can stray.
 *
 * Two transformation flavours exist.  Stacked models use
 * T(x) = P_pinv * (x, f(x), ..., f^M(x)) and need the dynamics at
 * evaluation time; cascade models use T(eta, z) = (eta, z^[1..d]) and are
 * self-contained.  `exact` marks models whose mismatch is structurally
 * zero rather than estimated from data. */
struct LiftedModel {
  enum class Transform { Stacked, Cascade };

  Transform kind = Transform::Stacked;
  Eigen::MatrixXd A;  // lifted dynamics, m x m
  Eigen::MatrixXd C;  // reads the original state back, n x m
  Eigen::MatrixXd B;  // injects the one-step mismatch, m x n
  MismatchSet mismatch;
  bool exact = false;

  // Stacked route.
  int M = 0;
  Eigen::MatrixXd P;       // (M+1)n x m basis of the stacked data span
  Eigen::MatrixXd P_pinv;  // m x (M+1)n
  std::vector<Eigen::MatrixXd> gamma;
  double delta_hat = 0.0;
  double min_singular_value = 0.0;

  // Cascade route.
  int n_eta = 0;
  int n_z = 0;
  int lift_degree = 0;

  int lifted_dim() const { return static_cast<int>(A.rows()); }
  int state_dim() const { return static_cast<int>(C.rows()); }

  /* T(x).  `sys` is required for stacked models and ignored otherwise. */
  Eigen::VectorXd transform(const NonlinearSystem* sys, const Eigen::VectorXd& x) const;
};

void write_model(std::ostream& os, const LiftedModel& model);
LiftedModel read_model(std::istream& is);

}  // namespace invlift
