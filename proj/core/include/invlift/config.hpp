#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invlift/dynamics.hpp"
#include "invlift/lifting.hpp"
#include "invlift/polytope.hpp"

namespace invlift {

/* One constraint row for cascade systems, expressed on the lifted
 * coordinates: coefficients on eta plus a z part given either directly on
 * the scaled graded lift or as a monomial table to be converted. */
struct LiftedRowConfig {
  Eigen::VectorXd eta;
  Eigen::VectorXd z_lift;      // empty when z_poly is used instead
  PolynomialCoordinate z_poly; // empty when z_lift is used instead
  double offset = 0.0;
};

struct SystemConfig {
  enum class Kind { Polynomial, Cascade };
  Kind kind = Kind::Polynomial;

  /* Polynomial systems: one coefficient table per state coordinate. */
  std::vector<PolynomialCoordinate> coordinates;
  std::optional<FactoredForm> factored;

  /* Cascade systems: eta+ = A_eta eta + phi(z), z+ = A_z z, with phi given
   * per degree on the scaled lift. */
  Eigen::MatrixXd A_eta;
  Eigen::MatrixXd A_z;
  std::vector<Eigen::MatrixXd> phi_lift;

  /* Euclidean bound on the additive state disturbance (0 = none). */
  double disturbance_radius = 0.0;
};

struct ConstraintConfig {
  /* Polynomial systems: rows and/or a box over the state. */
  Eigen::MatrixXd H;  // 0 x n when absent
  Eigen::VectorXd h;
  std::optional<Eigen::VectorXd> box_lower;
  std::optional<Eigen::VectorXd> box_upper;

  /* Cascade systems: rows over the lifted coordinates. */
  std::vector<LiftedRowConfig> lifted_rows;
};

struct PipelineConfig {
  double delta_target = 0.01;
  int horizon = 14;  // trajectory length behind every sample point
  int M_max = 8;
  int k_max = 200;
  std::optional<double> grid_pitch;  // gridded sampling
  std::optional<int> random_count;   // or uniform sampling
  std::uint64_t seed = 1;
  std::optional<double> ridge;
  double rho = 0.0;           // region inflation for the covering machinery
  double covering_eps = 0.0;  // widen the mismatch to cover an eps-net
  int max_chain = 20;         // certification reach-chain cutoff
};

struct OutputConfig {
  int raster_resolution = 200;
  int witness_resolution = 64;  // grid over the quantified-out coordinates
  bool emit_svg = false;
};

struct RunConfig {
  SystemConfig system;
  ConstraintConfig constraints;
  PipelineConfig pipeline;
  OutputConfig output;
};

/* Parses and validates the JSON text; errors name the offending field.
 * Every omitted optional is filled with its default so the returned value
 * is self-contained. */
RunConfig parse_config(const std::string& json_text);

/* The fully-resolved configuration echoed back as JSON, sufficient to
 * reproduce the run bit for bit. */
std::string effective_config_json(const RunConfig& cfg);

/* The dynamics the config describes.  Cascade configs get a black-box
 * system over (eta, z) with the declared blocks. */
NonlinearSystem make_system(const SystemConfig& cfg);

/* For cascade configs only: the declared blocks. */
CascadeSystem make_cascade(const SystemConfig& cfg);

/* The constraint polytope.  For polynomial systems this lives in the
 * state space; for cascade systems in the lifted coordinates (eta, then
 * the graded lift of z). */
Polytope make_constraints(const RunConfig& cfg);

}  // namespace invlift
