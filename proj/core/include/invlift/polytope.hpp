#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace invlift {

inline constexpr double kGeometryTol = 1e-9;

/* Convex polytope in half-space representation { x : H x <= h }.
 *
 * Rows are stored unit-normalized (||H_i||_2 = 1); offsets are rescaled to
 * match, so tolerances have a uniform geometric meaning across rows.  A
 * zero input row is dropped when trivially true (h >= 0) and marks the
 * whole set empty when impossible (h < 0).  A polytope with no rows is
 * the whole space. */
class Polytope {
 public:
  Polytope(Eigen::MatrixXd H, Eigen::VectorXd h);
  static Polytope whole_space(int dim);
  static Polytope empty_set(int dim);
  static Polytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

  int dim() const { return dim_; }
  int num_rows() const { return static_cast<int>(h_.size()); }
  const Eigen::MatrixXd& normals() const { return H_; }
  const Eigen::VectorXd& offsets() const { return h_; }

  /* True when construction or an operation proved the set empty.  A false
   * value is not a nonemptiness certificate; use is_empty() for that. */
  bool marked_empty() const { return marked_empty_; }

 private:
  Polytope() = default;
  int dim_ = 0;
  Eigen::MatrixXd H_;
  Eigen::VectorXd h_;
  bool marked_empty_ = false;
};

/* Additive mismatch set  B * {w : ||w||_inf <= delta}  +  ball_radius * B2,
 * where B2 is the Euclidean unit ball of the ambient space.  Its support
 * function is available in closed form, which is all the tightening
 * recursion ever needs. */
struct MismatchSet {
  Eigen::MatrixXd image_map;  // maps the inf-ball into the ambient space
  double delta = 0.0;
  double ball_radius = 0.0;

  static MismatchSet zero(int ambient_dim);
  int dim() const { return static_cast<int>(image_map.rows()); }
  bool is_zero() const { return delta == 0.0 && ball_radius == 0.0; }
};

/* sup { a^T x : x in P }.  Throws UnboundedDirectionError / EmptySetError. */
double support(const Polytope& P, const Eigen::VectorXd& a);

/* Closed-form support of a mismatch set. */
double support(const MismatchSet& S, const Eigen::VectorXd& a);

/* Pointwise Minkowski difference  P (-) img * S : every offset drops by the
 * support of img*S in that row's direction.  May produce an empty set,
 * which is a valid result. */
Polytope tighten(const Polytope& P, const MismatchSet& S,
                 const Eigen::MatrixXd& img);

Polytope intersect(const Polytope& P, const Polytope& Q);

/* Drops every row whose removal does not change the set, certified row by
 * row with an LP.  Requires a nonempty input. */
Polytope remove_redundancy(const Polytope& P, double tol = kGeometryTol);

bool is_empty(const Polytope& P, double tol = kGeometryTol);
bool contains(const Polytope& P, const Eigen::VectorXd& x, double tol = kGeometryTol);

/* Largest-inscribed-ball center; the standard nonemptiness witness.
 * radius < 0 certifies emptiness.  Throws UnboundedDirectionError when the
 * inscribed radius is unbounded. */
struct ChebyshevBall {
  Eigen::VectorXd center;
  double radius;
};
ChebyshevBall chebyshev_ball(const Polytope& P);

/* Vertex enumeration, planar sets only (dim == 2); returns the vertices in
 * counterclockwise order.  Throws UnsupportedDimensionError otherwise and
 * UnboundedDirectionError for unbounded input. */
std::vector<Eigen::Vector2d> vertices_2d(const Polytope& P, double tol = kGeometryTol);

/* Convex hull of planar points (monotone chain).  Degenerate hulls (a
 * point or a segment) are returned as flat polytopes. */
struct Hull2d {
  Polytope poly;
  std::vector<Eigen::Vector2d> vertices;  // counterclockwise
};
Hull2d hull_2d(std::span<const Eigen::Vector2d> points, double tol = kGeometryTol);

/* Serialization: the augmented matrix [H | h] in the matrix text format. */
void write_polytope(std::ostream& os, const Polytope& P);
Polytope read_polytope(std::istream& is);

/* Area and boundary length of a bounded planar polytope (shoelace). */
struct PlanarMeasure {
  double area;
  double perimeter;
};
PlanarMeasure planar_measure(const Polytope& P);

}  // namespace invlift
