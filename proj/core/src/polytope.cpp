#include "invlift/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "invlift/errors.hpp"
#include "invlift/lp.hpp"
#include "invlift/matrix_io.hpp"

namespace invlift {

namespace {
constexpr double kZeroRowTol = 1e-13;
}

Polytope::Polytope(Eigen::MatrixXd H, Eigen::VectorXd h) {
  if (H.rows() != h.size())
    throw ValidationError("polytope: row count of H does not match h");
  if (!H.allFinite() || !h.allFinite())
    throw ValidationError("polytope: non-finite entries");
  dim_ = static_cast<int>(H.cols());

  std::vector<int> keep;
  keep.reserve(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    const double nrm = H.row(i).norm();
    if (nrm <= kZeroRowTol) {
      if (h(i) < -1e-12) marked_empty_ = true;  // 0 <= negative: impossible
      continue;                                 // trivially true otherwise
    }
    keep.push_back(static_cast<int>(i));
  }
  if (marked_empty_) {
    H_.resize(0, dim_);
    h_.resize(0);
    return;
  }
  H_.resize(keep.size(), dim_);
  h_.resize(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const double nrm = H.row(keep[r]).norm();
    H_.row(r) = H.row(keep[r]) / nrm;
    h_(r) = h(keep[r]) / nrm;
  }
}

Polytope Polytope::whole_space(int dim) {
  return Polytope(Eigen::MatrixXd::Zero(0, dim), Eigen::VectorXd::Zero(0));
}

Polytope Polytope::empty_set(int dim) {
  Polytope P = whole_space(dim);
  P.marked_empty_ = true;
  return P;
}

Polytope Polytope::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const int n = static_cast<int>(lower.size());
  if (upper.size() != n) throw ValidationError("box: bound dimensions differ");
  for (int i = 0; i < n; ++i)
    if (lower(i) > upper(i)) throw ValidationError("box: lower bound above upper");
  Eigen::MatrixXd H(2 * n, n);
  Eigen::VectorXd h(2 * n);
  H.setZero();
  for (int i = 0; i < n; ++i) {
    H(2 * i, i) = 1.0;
    h(2 * i) = upper(i);
    H(2 * i + 1, i) = -1.0;
    h(2 * i + 1) = -lower(i);
  }
  return Polytope(std::move(H), std::move(h));
}

MismatchSet MismatchSet::zero(int ambient_dim) {
  MismatchSet S;
  S.image_map = Eigen::MatrixXd::Zero(ambient_dim, 1);
  return S;
}

double support(const MismatchSet& S, const Eigen::VectorXd& a) {
  if (a.size() != S.dim())
    throw ValidationError("mismatch support: direction dimension mismatch");
  return S.delta * (S.image_map.transpose() * a).lpNorm<1>() +
         S.ball_radius * a.norm();
}

double support(const Polytope& P, const Eigen::VectorXd& a) {
  if (a.size() != P.dim())
    throw ValidationError("support: direction dimension mismatch");
  if (P.marked_empty()) throw EmptySetError("support: empty polytope");
  if (a.norm() <= kZeroRowTol)
    throw ValidationError("support: zero direction");
  if (P.num_rows() == 0)
    throw UnboundedDirectionError("support: whole space is unbounded");

  auto res = lp::solve_inequality_form(P.normals(), P.offsets(), -a);
  switch (res.status) {
    case lp::Status::Optimal:
      return -res.objective;
    case lp::Status::Infeasible:
      throw EmptySetError("support: empty polytope");
    case lp::Status::Unbounded:
      if (is_empty(P)) throw EmptySetError("support: empty polytope");
      throw UnboundedDirectionError("support: unbounded in requested direction");
    default:
      throw NumericalError("support: LP iteration limit");
  }
}

Polytope tighten(const Polytope& P, const MismatchSet& S, const Eigen::MatrixXd& img) {
  if (img.rows() != P.dim() || img.cols() != S.dim())
    throw ValidationError("tighten: image map dimensions inconsistent");
  if (P.marked_empty()) return P;
  Eigen::VectorXd h = P.offsets();
  for (int i = 0; i < P.num_rows(); ++i) {
    const Eigen::VectorXd dir = img.transpose() * P.normals().row(i).transpose();
    h(i) -= support(S, dir);
  }
  return Polytope(P.normals(), std::move(h));
}

Polytope intersect(const Polytope& P, const Polytope& Q) {
  if (P.dim() != Q.dim()) throw ValidationError("intersect: dimension mismatch");
  if (P.marked_empty() || Q.marked_empty()) return Polytope::empty_set(P.dim());
  Eigen::MatrixXd H(P.num_rows() + Q.num_rows(), P.dim());
  Eigen::VectorXd h(P.num_rows() + Q.num_rows());
  H << P.normals(), Q.normals();
  h << P.offsets(), Q.offsets();
  return Polytope(std::move(H), std::move(h));
}

ChebyshevBall chebyshev_ball(const Polytope& P) {
  if (P.marked_empty())
    return {Eigen::VectorXd::Zero(P.dim()),
            -std::numeric_limits<double>::infinity()};
  if (P.num_rows() == 0)
    throw UnboundedDirectionError("chebyshev: whole space has no finite ball");

  const int n = P.dim();
  Eigen::MatrixXd A(P.num_rows(), n + 1);
  A.leftCols(n) = P.normals();
  A.col(n).setOnes();  // rows are unit-normalized, so the radius adds as-is
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
  c(n) = -1.0;  // maximize the inscribed radius

  auto res = lp::solve_inequality_form(A, P.offsets(), c);
  if (res.status == lp::Status::Unbounded)
    throw UnboundedDirectionError("chebyshev: inscribed radius unbounded");
  if (res.status != lp::Status::Optimal)
    throw NumericalError("chebyshev: LP failed");
  return {res.v.head(n), res.v(n)};
}

bool is_empty(const Polytope& P, double tol) {
  if (P.marked_empty()) return true;
  if (P.num_rows() == 0) return false;
  try {
    return chebyshev_ball(P).radius < -tol;
  } catch (const UnboundedDirectionError&) {
    return false;  // unbounded inscribed radius: certainly nonempty
  }
}

bool contains(const Polytope& P, const Eigen::VectorXd& x, double tol) {
  if (x.size() != P.dim())
    throw ValidationError("contains: point dimension mismatch");
  if (P.marked_empty()) return false;
  if (P.num_rows() == 0) return true;
  return ((P.normals() * x - P.offsets()).maxCoeff() <= tol);
}

Polytope remove_redundancy(const Polytope& P, double tol) {
  if (P.marked_empty() || is_empty(P))
    throw EmptySetError("remove_redundancy: empty input");
  const int R = P.num_rows();
  std::vector<char> kept(R, 1);

  for (int i = 0; i < R; ++i) {
    // Collect the other kept rows plus row i with a relaxed offset; the
    // relaxation bounds the LP and lets duplicate rows shadow each other.
    std::vector<int> rows;
    for (int r = 0; r < R; ++r)
      if (kept[r] && r != i) rows.push_back(r);

    Eigen::MatrixXd A(rows.size() + 1, P.dim());
    Eigen::VectorXd b(rows.size() + 1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      A.row(r) = P.normals().row(rows[r]);
      b(r) = P.offsets()(rows[r]);
    }
    A.row(rows.size()) = P.normals().row(i);
    b(rows.size()) = P.offsets()(i) + 1.0;

    const Eigen::VectorXd c = -P.normals().row(i).transpose();
    auto res = lp::solve_inequality_form(A, b, c);
    if (res.status == lp::Status::Optimal && -res.objective <= P.offsets()(i) + tol)
      kept[i] = 0;
    else if (res.status == lp::Status::IterationLimit)
      throw NumericalError("remove_redundancy: LP iteration limit");
    // Unbounded => certainly irredundant; keep the row.
  }

  int count = 0;
  for (char k : kept) count += k;
  Eigen::MatrixXd H(count, P.dim());
  Eigen::VectorXd h(count);
  for (int i = 0, r = 0; i < R; ++i)
    if (kept[i]) {
      H.row(r) = P.normals().row(i);
      h(r) = P.offsets()(i);
      ++r;
    }
  return Polytope(std::move(H), std::move(h));
}

namespace {

/* Clip a counterclockwise polygon by { x : a.x <= b } (Sutherland-Hodgman). */
std::vector<Eigen::Vector2d> clip_halfplane(const std::vector<Eigen::Vector2d>& poly,
                                            const Eigen::Vector2d& a, double b) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % n];
    const double sp = a.dot(p) - b;
    const double sq = a.dot(q) - b;
    const bool pin = sp <= 0.0;
    const bool qin = sq <= 0.0;
    if (pin) out.push_back(p);
    if (pin != qin) {
      const double t = sp / (sp - sq);  // well-defined: signs differ
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

std::vector<Eigen::Vector2d> dedupe_ring(std::vector<Eigen::Vector2d> v, double tol) {
  std::vector<Eigen::Vector2d> out;
  for (const auto& p : v) {
    if (out.empty() || (out.back() - p).norm() > tol) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  return out;
}

/* Strip vertices that sit on the segment between their neighbours. */
std::vector<Eigen::Vector2d> strip_collinear(std::vector<Eigen::Vector2d> v, double tol) {
  if (v.size() < 3) return v;
  std::vector<Eigen::Vector2d> out;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = v[(i + n - 1) % n];
    const Eigen::Vector2d& b = v[i];
    const Eigen::Vector2d& c = v[(i + 1) % n];
    const Eigen::Vector2d u = b - a, w = c - b;
    const double cross = u.x() * w.y() - u.y() * w.x();
    if (std::abs(cross) > tol * (u.norm() * w.norm() + tol)) out.push_back(b);
  }
  return out.size() >= 3 ? out : v;
}

}  // namespace

std::vector<Eigen::Vector2d> vertices_2d(const Polytope& P, double tol) {
  if (P.dim() != 2)
    throw UnsupportedDimensionError(
        "vertices_2d: only planar polytopes are supported");
  if (P.marked_empty() || is_empty(P)) return {};

  // Bounding box through four support calls; throws when unbounded.
  Eigen::Vector2d lo, hi;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
    e(i) = 1.0;
    hi(i) = support(P, e);
    e(i) = -1.0;
    lo(i) = -support(P, e);
  }
  const double margin = 0.5 * std::max(1.0, (hi - lo).norm());
  lo.array() -= margin;
  hi.array() += margin;

  std::vector<Eigen::Vector2d> poly = {
      {lo.x(), lo.y()}, {hi.x(), lo.y()}, {hi.x(), hi.y()}, {lo.x(), hi.y()}};
  for (int i = 0; i < P.num_rows() && !poly.empty(); ++i)
    poly = clip_halfplane(poly, P.normals().row(i).transpose(), P.offsets()(i));

  const double scale = std::max(1.0, (hi - lo).norm());
  poly = dedupe_ring(std::move(poly), tol * scale);
  poly = strip_collinear(std::move(poly), 1e-10);
  return poly;
}

Hull2d hull_2d(std::span<const Eigen::Vector2d> points, double tol) {
  if (points.empty()) throw ValidationError("hull_2d: no input points");

  std::vector<Eigen::Vector2d> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [tol](const auto& a, const auto& b) {
                          return (a - b).norm() <= tol;
                        }),
            pts.end());

  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };

  // Area-scaled threshold: a turn is only a vertex when its cross product
  // exceeds tol relative to the squared data span.
  double span2 = 0.0;
  if (pts.size() >= 2) span2 = (pts.back() - pts.front()).squaredNorm();
  for (const auto& p : pts) span2 = std::max(span2, (p - pts.front()).squaredNorm());
  const double turn_tol = tol * std::max(1.0, span2);

  std::vector<Eigen::Vector2d> hull;
  if (pts.size() >= 3) {
    std::vector<Eigen::Vector2d> lower_chain, upper_chain;
    for (const auto& p : pts) {
      while (lower_chain.size() >= 2 &&
             cross(lower_chain[lower_chain.size() - 2], lower_chain.back(), p) <= turn_tol)
        lower_chain.pop_back();
      lower_chain.push_back(p);
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      while (upper_chain.size() >= 2 &&
             cross(upper_chain[upper_chain.size() - 2], upper_chain.back(), *it) <= turn_tol)
        upper_chain.pop_back();
      upper_chain.push_back(*it);
    }
    lower_chain.pop_back();
    upper_chain.pop_back();
    hull = std::move(lower_chain);
    hull.insert(hull.end(), upper_chain.begin(), upper_chain.end());
  } else {
    hull = pts;
  }

  Hull2d result{Polytope::whole_space(2), hull};

  if (hull.size() == 1) {  // single point: a degenerate box
    Eigen::VectorXd p(2);
    p << hull[0].x(), hull[0].y();
    result.poly = Polytope::box(p, p);
    return result;
  }
  if (hull.size() == 2) {  // segment: equality band plus end caps
    const Eigen::Vector2d p = hull[0], q = hull[1];
    Eigen::Vector2d t = (q - p).normalized();
    Eigen::Vector2d n(-t.y(), t.x());
    Eigen::MatrixXd H(4, 2);
    Eigen::VectorXd h(4);
    H.row(0) = n.transpose();
    h(0) = n.dot(p);
    H.row(1) = -n.transpose();
    h(1) = -n.dot(p);
    H.row(2) = t.transpose();
    h(2) = t.dot(q);
    H.row(3) = -t.transpose();
    h(3) = -t.dot(p);
    result.poly = Polytope(std::move(H), std::move(h));
    return result;
  }

  const std::size_t m = hull.size();
  Eigen::MatrixXd H(m, 2);
  Eigen::VectorXd h(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& p = hull[i];
    const Eigen::Vector2d& q = hull[(i + 1) % m];
    const Eigen::Vector2d d = q - p;
    Eigen::Vector2d n(d.y(), -d.x());  // outward for counterclockwise order
    n.normalize();
    H.row(i) = n.transpose();
    h(i) = n.dot(p);
  }
  result.poly = Polytope(std::move(H), std::move(h));
  return result;
}

void write_polytope(std::ostream& os, const Polytope& P) {
  if (P.marked_empty()) {
    Eigen::MatrixXd m(1, P.dim() + 1);
    m.setZero();
    m(0, P.dim()) = -1.0;  // 0 <= -1: canonical empty marker
    write_matrix(os, m);
    return;
  }
  Eigen::MatrixXd m(P.num_rows(), P.dim() + 1);
  m.leftCols(P.dim()) = P.normals();
  m.col(P.dim()) = P.offsets();
  write_matrix(os, m);
}

Polytope read_polytope(std::istream& is) {
  const Eigen::MatrixXd m = read_matrix(is);
  if (m.cols() < 1) throw ValidationError("polytope text: need at least one column");
  return Polytope(m.leftCols(m.cols() - 1), m.col(m.cols() - 1));
}

PlanarMeasure planar_measure(const Polytope& P) {
  const auto v = vertices_2d(P);
  if (v.empty()) return {0.0, 0.0};
  if (v.size() == 1) return {0.0, 0.0};
  if (v.size() == 2) return {0.0, 2.0 * (v[1] - v[0]).norm()};
  double area2 = 0.0, per = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    area2 += p.x() * q.y() - q.x() * p.y();
    per += (q - p).norm();
  }
  return {0.5 * std::abs(area2), per};
}

}  // namespace invlift
