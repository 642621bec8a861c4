#include "invlift/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "invlift/errors.hpp"

namespace invlift {

namespace {

void enumerate_exponents(int n, int d, int pos, MultiIndex& cur,
                         std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  // Descending first coordinate gives the graded-lex order used everywhere.
  for (int e = d; e >= 0; --e) {
    cur[pos] = e;
    enumerate_exponents(n, d - e, pos + 1, cur, out);
  }
}

double multinomial(int d, const MultiIndex& alpha) {
  double v = std::tgamma(d + 1.0);
  for (int a : alpha) v /= std::tgamma(a + 1.0);
  return v;
}

using Poly = std::map<MultiIndex, double>;

Poly multiply_by_linear_form(const Poly& p, const Eigen::VectorXd& row) {
  Poly out;
  for (const auto& [expo, coeff] : p) {
    for (int j = 0; j < row.size(); ++j) {
      if (row(j) == 0.0) continue;
      MultiIndex e = expo;
      e[j] += 1;
      out[e] += coeff * row(j);
    }
  }
  return out;
}

}  // namespace

int lift_size(int n, int d) {
  // C(n + d - 1, d)
  double v = 1.0;
  for (int i = 1; i <= d; ++i) v = v * (n - 1 + i) / i;
  return static_cast<int>(std::llround(v));
}

int graded_lift_size(int n, int dmax) {
  int total = 0;
  for (int d = 1; d <= dmax; ++d) total += lift_size(n, d);
  return total;
}

LiftIndex make_lift_index(int n, int d) {
  if (n <= 0 || d <= 0) throw ValidationError("lift index: n and d must be positive");
  LiftIndex idx;
  idx.n = n;
  idx.d = d;
  MultiIndex cur(n, 0);
  enumerate_exponents(n, d, 0, cur, idx.exponents);
  idx.scalings.resize(idx.exponents.size());
  for (std::size_t i = 0; i < idx.exponents.size(); ++i)
    idx.scalings(static_cast<Eigen::Index>(i)) = std::sqrt(multinomial(d, idx.exponents[i]));
  return idx;
}

Eigen::VectorXd lift_vector(const Eigen::VectorXd& z, int d) {
  const LiftIndex idx = make_lift_index(static_cast<int>(z.size()), d);
  Eigen::VectorXd out(idx.size());
  for (int i = 0; i < idx.size(); ++i) {
    double mono = 1.0;
    for (int j = 0; j < idx.n; ++j)
      for (int p = 0; p < idx.exponents[i][j]; ++p) mono *= z(j);
    out(i) = idx.scalings(i) * mono;
  }
  return out;
}

Eigen::MatrixXd lift_matrix(const Eigen::MatrixXd& A, int d) {
  if (A.rows() != A.cols()) throw ValidationError("lift_matrix: square matrix required");
  const int n = static_cast<int>(A.rows());
  const LiftIndex idx = make_lift_index(n, d);

  // Position lookup for assembled coefficients.
  std::map<MultiIndex, int> position;
  for (int i = 0; i < idx.size(); ++i) position[idx.exponents[i]] = i;

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(idx.size(), idx.size());
  for (int r = 0; r < idx.size(); ++r) {
    // Expand prod_i (A_i . z)^(alpha_i) symbolically.
    Poly poly;
    poly[MultiIndex(n, 0)] = 1.0;
    for (int i = 0; i < n; ++i)
      for (int rep = 0; rep < idx.exponents[r][i]; ++rep)
        poly = multiply_by_linear_form(poly, A.row(i).transpose());

    for (const auto& [expo, coeff] : poly) {
      const int c = position.at(expo);
      out(r, c) = idx.scalings(r) * coeff / idx.scalings(c);
    }
  }
  return out;
}

Eigen::VectorXd lift_vector_graded(const Eigen::VectorXd& z, int dmax) {
  if (dmax <= 0) throw ValidationError("graded lift: dmax must be positive");
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd out(graded_lift_size(n, dmax));
  int at = 0;
  for (int d = 1; d <= dmax; ++d) {
    const Eigen::VectorXd block = lift_vector(z, d);
    out.segment(at, block.size()) = block;
    at += static_cast<int>(block.size());
  }
  return out;
}

Eigen::MatrixXd lift_matrix_graded(const Eigen::MatrixXd& A, int dmax) {
  if (dmax <= 0) throw ValidationError("graded lift: dmax must be positive");
  const int n = static_cast<int>(A.rows());
  const int total = graded_lift_size(n, dmax);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(total, total);
  int at = 0;
  for (int d = 1; d <= dmax; ++d) {
    const Eigen::MatrixXd block = lift_matrix(A, d);
    out.block(at, at, block.rows(), block.cols()) = block;
    at += static_cast<int>(block.rows());
  }
  return out;
}

Eigen::VectorXd polynomial_to_lift_row(int n_z, int dmax, const PolynomialCoordinate& q) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(graded_lift_size(n_z, dmax));
  // Per-degree indices and block offsets.
  std::vector<LiftIndex> indices;
  std::vector<int> offsets;
  int at = 0;
  for (int d = 1; d <= dmax; ++d) {
    indices.push_back(make_lift_index(n_z, d));
    offsets.push_back(at);
    at += indices.back().size();
  }
  for (const auto& term : q) {
    if (static_cast<int>(term.exponents.size()) != n_z)
      throw ValidationError("lift row: exponent tuple length mismatch");
    const int deg = std::accumulate(term.exponents.begin(), term.exponents.end(), 0);
    if (deg == 0) {
      if (term.coefficient != 0.0)
        throw ValidationError("lift row: constant term belongs in the offset");
      continue;
    }
    if (deg > dmax) throw ValidationError("lift row: term degree exceeds the lift");
    const LiftIndex& idx = indices[deg - 1];
    const auto it = std::find(idx.exponents.begin(), idx.exponents.end(), term.exponents);
    const int pos = static_cast<int>(it - idx.exponents.begin());
    row(offsets[deg - 1] + pos) += term.coefficient / idx.scalings(pos);
  }
  return row;
}

Eigen::VectorXd CascadeSystem::phi(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_eta());
  for (int d = 1; d <= degree(); ++d) out += F[d - 1] * lift_vector(z, d);
  return out;
}

void validate_cascade(const CascadeSystem& cs) {
  if (cs.A_eta.rows() != cs.A_eta.cols() || cs.A_z.rows() != cs.A_z.cols())
    throw ValidationError("cascade: square blocks required");
  if (cs.F.empty()) throw ValidationError("cascade: at least one phi block required");
  for (int d = 1; d <= cs.degree(); ++d) {
    if (cs.F[d - 1].rows() != cs.n_eta() ||
        cs.F[d - 1].cols() != lift_size(cs.n_z(), d))
      throw ValidationError("cascade: phi block has wrong shape at degree " +
                            std::to_string(d));
  }
}

std::vector<Eigen::MatrixXd> phi_blocks_from_polynomial(
    int n_eta, int n_z, int degree, const std::vector<PolynomialCoordinate>& phi) {
  if (static_cast<int>(phi.size()) != n_eta)
    throw ValidationError("phi table: one coordinate per eta component required");
  std::vector<Eigen::MatrixXd> F;
  std::vector<LiftIndex> indices;
  for (int d = 1; d <= degree; ++d) {
    indices.push_back(make_lift_index(n_z, d));
    F.push_back(Eigen::MatrixXd::Zero(n_eta, indices.back().size()));
  }
  for (int i = 0; i < n_eta; ++i) {
    for (const auto& term : phi[i]) {
      const int deg = std::accumulate(term.exponents.begin(), term.exponents.end(), 0);
      if (deg == 0 && term.coefficient == 0.0) continue;
      if (deg == 0) throw ValidationError("phi table: constant term not allowed");
      if (deg > degree) throw ValidationError("phi table: term degree exceeds declared degree");
      const LiftIndex& idx = indices[deg - 1];
      const auto it = std::find(idx.exponents.begin(), idx.exponents.end(), term.exponents);
      const int pos = static_cast<int>(it - idx.exponents.begin());
      F[deg - 1](i, pos) += term.coefficient / idx.scalings(pos);
    }
  }
  return F;
}

NonlinearSystem cascade_dynamics(const CascadeSystem& cs) {
  validate_cascade(cs);
  CascadeSystem local = cs;
  const int ne = cs.n_eta(), nz = cs.n_z();
  return NonlinearSystem::black_box(ne + nz, [local, ne, nz](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(ne + nz);
    out.head(ne) = local.A_eta * x.head(ne) + local.phi(x.tail(nz));
    out.tail(nz) = local.A_z * x.tail(nz);
    return out;
  });
}

LiftedModel build_cascade_immersion(const CascadeSystem& cs) {
  validate_cascade(cs);
  const int ne = cs.n_eta(), nz = cs.n_z(), d = cs.degree();
  const int zlift = graded_lift_size(nz, d);
  const int m = ne + zlift;

  LiftedModel model;
  model.kind = LiftedModel::Transform::Cascade;
  model.exact = true;
  model.n_eta = ne;
  model.n_z = nz;
  model.lift_degree = d;

  model.A = Eigen::MatrixXd::Zero(m, m);
  model.A.topLeftCorner(ne, ne) = cs.A_eta;
  int at = ne;
  for (int deg = 1; deg <= d; ++deg) {
    model.A.block(0, at, ne, cs.F[deg - 1].cols()) = cs.F[deg - 1];
    at += static_cast<int>(cs.F[deg - 1].cols());
  }
  model.A.bottomRightCorner(zlift, zlift) = lift_matrix_graded(cs.A_z, d);

  model.C = Eigen::MatrixXd::Zero(ne + nz, m);
  model.C.leftCols(ne + nz).setIdentity();

  // Mismatch is structurally zero; B keeps the conventional one-step shape.
  model.B = Eigen::MatrixXd::Zero(m, ne + nz);
  model.mismatch = MismatchSet::zero(m);
  return model;
}

}  // namespace invlift
