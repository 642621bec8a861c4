#include "invlift/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "invlift/errors.hpp"

namespace invlift {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct BoundingBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

BoundingBox bounding_box(const Polytope& region) {
  const int n = region.dim();
  BoundingBox box{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    box.hi(j) = support(region, e);
    e(j) = -1.0;
    box.lo(j) = -support(region, e);
  }
  return box;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (0xA0761D6478BD642FULL * (index + 1));
  std::uint64_t out = splitmix64(state);
  return splitmix64(state) ^ out;
}

UniformSource::UniformSource(std::uint64_t seed) : gen_(seed) {}

double UniformSource::next() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::uint64_t UniformSource::next_u64() { return gen_(); }

std::vector<Eigen::VectorXd> grid_points(const Polytope& region, double eta,
                                         std::size_t max_points) {
  if (eta <= 0) throw ValidationError("grid: pitch must be positive");
  const int n = region.dim();
  const BoundingBox box = bounding_box(region);

  std::vector<long> first(n), last(n);
  double count = 1.0;
  for (int j = 0; j < n; ++j) {
    const double pad_lo = kGeometryTol * (1.0 + std::abs(box.lo(j)));
    const double pad_hi = kGeometryTol * (1.0 + std::abs(box.hi(j)));
    first[j] = static_cast<long>(std::ceil((box.lo(j) - pad_lo) / eta));
    last[j] = static_cast<long>(std::floor((box.hi(j) + pad_hi) / eta));
    count *= std::max(0.0, static_cast<double>(last[j] - first[j] + 1));
  }
  if (count > static_cast<double>(max_points))
    throw ValidationError("grid: pitch " + std::to_string(eta) + " yields about " +
                          std::to_string(static_cast<long long>(count)) +
                          " candidate nodes, cap is " + std::to_string(max_points));
  if (count == 0.0) return {};

  std::vector<Eigen::VectorXd> out;
  std::vector<long> idx = first;
  Eigen::VectorXd x(n);
  for (;;) {
    for (int j = 0; j < n; ++j) x(j) = static_cast<double>(idx[j]) * eta;
    if (contains(region, x)) out.push_back(x);
    int j = 0;
    while (j < n && idx[j] == last[j]) {
      idx[j] = first[j];
      ++j;
    }
    if (j == n) break;
    ++idx[j];
  }
  return out;
}

std::vector<Eigen::VectorXd> random_points(const Polytope& region, int N,
                                           std::uint64_t seed) {
  if (N < 0) throw ValidationError("random sample: negative count");
  if (N == 0) return {};
  if (is_empty(region)) throw EmptySetError("random sample: empty region");

  const int n = region.dim();
  const BoundingBox box = bounding_box(region);
  const Eigen::VectorXd span = box.hi - box.lo;

  UniformSource rng(mix_seed(seed, 0));
  std::vector<Eigen::VectorXd> out;
  out.reserve(N);
  Eigen::VectorXd x(n);
  long attempts = 0;
  while (static_cast<int>(out.size()) < N) {
    for (int j = 0; j < n; ++j) x(j) = box.lo(j) + span(j) * rng.next();
    ++attempts;
    if (contains(region, x)) out.push_back(x);
    if (attempts % 16384 == 0 &&
        static_cast<double>(out.size()) < 1e-4 * static_cast<double>(attempts))
      throw InsufficientSampleError(
          "random sample: acceptance rate below 1e-4, region is degenerate "
          "relative to its bounding box");
  }
  return out;
}

Polytope inflate_region(const Polytope& X, double rho) {
  if (rho < 0) throw ValidationError("inflate: negative radius");
  if (X.marked_empty() || rho == 0.0) return X;
  return Polytope(X.normals(),
                  X.offsets() + Eigen::VectorXd::Constant(X.num_rows(), rho));
}

double deflate_pitch(double rho, double lipschitz, int k) {
  if (rho < 0 || lipschitz <= 0 || k < 0)
    throw ValidationError("deflate: need rho >= 0, L > 0, k >= 0");
  return rho * std::min(1.0, std::pow(lipschitz, -k));
}

CoveringCheck covering_check(const std::vector<Eigen::VectorXd>& points,
                             const Polytope& region, double epsilon,
                             int probes, std::uint64_t seed) {
  if (points.empty())
    throw ValidationError("covering check: point set is empty");
  if (probes < 1) throw ValidationError("covering check: need at least one probe");

  const int n = region.dim();
  Eigen::MatrixXd P(points.size(), n);
  for (std::size_t i = 0; i < points.size(); ++i) P.row(i) = points[i].transpose();

  CoveringCheck result;
  result.worst_distance = -1.0;
  for (const auto& probe : random_points(region, probes, mix_seed(seed, 1))) {
    const double d2 =
        (P.rowwise() - probe.transpose()).rowwise().squaredNorm().minCoeff();
    const double d = std::sqrt(d2);
    if (d > result.worst_distance) {
      result.worst_distance = d;
      result.worst_point = probe;
    }
  }
  result.covered = result.worst_distance <= epsilon;
  return result;
}

double unit_ball_volume(int dim) {
  if (dim < 0) throw ValidationError("ball volume: negative dimension");
  return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

namespace {

/* Side lengths when every row of X is an axis direction; empty otherwise. */
std::optional<Eigen::VectorXd> box_sides(const Polytope& X) {
  const int n = X.dim();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < X.num_rows(); ++i) {
    const Eigen::VectorXd row = X.normals().row(i).transpose();
    int axis = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(row(j)) < 1e-12) continue;
      if (axis >= 0 || std::abs(std::abs(row(j)) - 1.0) > 1e-12) return std::nullopt;
      axis = j;
    }
    if (axis < 0) return std::nullopt;
    if (row(axis) > 0)
      hi(axis) = std::min(hi(axis), X.offsets()(i));
    else
      lo(axis) = std::max(lo(axis), -X.offsets()(i));
  }
  Eigen::VectorXd sides(n);
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lo(j)) || !std::isfinite(hi(j))) return std::nullopt;
    sides(j) = hi(j) - lo(j);
  }
  return sides;
}

}  // namespace

double inflated_volume(const Polytope& X, double r) {
  if (r < 0) throw ValidationError("inflated volume: negative radius");
  if (X.marked_empty()) return 0.0;

  if (const auto sides = box_sides(X)) {
    const int n = X.dim();
    if ((sides->array() < 0).any()) return 0.0;
    // Steiner formula for a box: elementary symmetric polynomials of the
    // side lengths weigh the lower-dimensional ball volumes.
    Eigen::VectorXd sym = Eigen::VectorXd::Zero(n + 1);
    sym(0) = 1.0;
    for (int j = 0; j < n; ++j)
      for (int k = n; k >= 1; --k) sym(k) += sym(k - 1) * (*sides)(j);
    double vol = 0.0;
    for (int k = 0; k <= n; ++k)
      vol += sym(n - k) * unit_ball_volume(k) * std::pow(r, k);
    return vol;
  }

  if (X.dim() == 2) {
    const PlanarMeasure pm = planar_measure(X);
    return pm.area + pm.perimeter * r + M_PI * r * r;
  }
  throw UnsupportedDimensionError(
      "inflated volume: exact only for planar polytopes and boxes");
}

double packing_bound(const Polytope& X, double eta, double rho) {
  if (eta <= 0) throw ValidationError("packing bound: pitch must be positive");
  if (rho < 0) throw ValidationError("packing bound: negative inflation");
  const double small = unit_ball_volume(X.dim()) * std::pow(eta / 2.0, X.dim());
  return inflated_volume(X, rho + eta / 2.0) / small;
}

CoveringCertificate grid_certificate(int dim, double eta) {
  if (dim < 1 || eta <= 0) throw ValidationError("grid certificate: bad arguments");
  CoveringCertificate cert;
  cert.kind = CoveringCertificate::Kind::Grid;
  cert.eta = eta;
  cert.epsilon = eta * std::sqrt(static_cast<double>(dim));
  cert.probability_bound = 1.0;
  cert.packing_estimate = 0.0;
  return cert;
}

CoveringCertificate random_certificate(const Polytope& X, double eta,
                                       double rho, int N) {
  if (eta <= 0 || rho < 0 || N < 0)
    throw ValidationError("random certificate: bad arguments");
  CoveringCertificate cert;
  cert.kind = CoveringCertificate::Kind::Random;
  cert.eta = eta;
  cert.epsilon = eta;
  cert.packing_estimate = packing_bound(X, eta, rho);

  const double hit =
      unit_ball_volume(X.dim()) * std::pow(eta, X.dim()) / inflated_volume(X, rho);
  const double miss_all = std::pow(std::max(0.0, 1.0 - hit), N);
  cert.probability_bound =
      std::clamp(1.0 - cert.packing_estimate * miss_all, 0.0, 1.0);
  return cert;
}

}  // namespace invlift
