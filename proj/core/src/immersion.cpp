#include "invlift/immersion.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "invlift/errors.hpp"
#include "invlift/lifting.hpp"
#include "invlift/lp.hpp"
#include "invlift/matrix_io.hpp"

namespace invlift {

namespace {

struct FilteredData {
  Eigen::MatrixXd Phi;  // rows: stacked (x, f(x), ..., f^M(x))
  Eigen::MatrixXd Y;    // rows: f^{M+1}(x)
  std::vector<int> indices;
};

/* Seed points usable at level M: certified inside for M+1 steps and with
 * enough stored trajectory to read f^{M+1}. */
FilteredData filter_level(const SampleSet& sample, int M) {
  if (M < 0) throw ValidationError("immersion: negative lift order");
  if (sample.points.empty())
    throw InsufficientSampleError("immersion: empty sample set");
  if (sample.horizon < M + 1)
    throw HorizonError("immersion: sample horizon shorter than M+1");
  const int n = static_cast<int>(sample.points[0].size());

  std::vector<int> idx;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample.violation_index[i] >= M + 2 &&
        static_cast<int>(sample.trajectories[i].size()) > M + 1)
      idx.push_back(static_cast<int>(i));
  }

  FilteredData out;
  out.indices = idx;
  out.Phi.resize(idx.size(), (M + 1) * n);
  out.Y.resize(idx.size(), n);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto& traj = sample.trajectories[idx[r]];
    for (int l = 0; l <= M; ++l)
      out.Phi.block(r, l * n, 1, n) = traj[l].transpose();
    out.Y.row(r) = traj[M + 1].transpose();
  }
  return out;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& gamma) {
  const int M = static_cast<int>(gamma.size()) - 1;
  const int n = static_cast<int>(gamma[0].rows());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero((M + 1) * n, (M + 1) * n);
  for (int b = 0; b + 1 <= M; ++b)
    G.block(b * n, (b + 1) * n, n, n).setIdentity();
  for (int b = 0; b <= M; ++b) G.block(M * n, b * n, n, n) = gamma[b];
  return G;
}

double spectral_norm(const Eigen::MatrixXd& A) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
}

}  // namespace

GammaFit fit_gamma(const SampleSet& sample, int M, std::optional<double> ridge) {
  const FilteredData data = filter_level(sample, M);
  const int n = static_cast<int>(data.Y.cols());
  const int cols = (M + 1) * n;
  if (static_cast<int>(data.indices.size()) < cols)
    throw InsufficientSampleError(
        "fit_gamma: need at least (M+1)*n certified points, have " +
        std::to_string(data.indices.size()));

  Eigen::MatrixXd gram = data.Phi.transpose() * data.Phi;
  const double lambda = ridge.value_or(1e-8 * gram.trace() / cols);
  gram.diagonal().array() += lambda;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  GammaFit fit;
  fit.M = M;
  fit.ridge = lambda;
  fit.used_indices = data.indices;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  fit.gram_warning =
      es.eigenvalues()(0) <= 1e-14 * std::max(1.0, es.eigenvalues()(cols - 1));

  const Eigen::MatrixXd GT = ldlt.solve(data.Phi.transpose() * data.Y);  // cols x n
  const Eigen::MatrixXd G = GT.transpose();                              // n x cols
  for (int l = 0; l <= M; ++l) fit.gamma.push_back(G.middleCols(l * n, n));

  const Eigen::MatrixXd R = data.Y - data.Phi * GT;
  fit.residuals = R.cwiseAbs().rowwise().maxCoeff();
  return fit;
}

double mismatch_bound(const SampleSet& sample,
                      const std::vector<Eigen::MatrixXd>& gamma, int M) {
  if (static_cast<int>(gamma.size()) != M + 1)
    throw ValidationError("mismatch_bound: gamma must have M+1 blocks");
  if (sample.horizon < M + 1)
    throw HorizonError("mismatch_bound: sample horizon shorter than M+1");

  double worst = -1.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto& traj = sample.trajectories[i];
    const int viol = sample.violation_index[i];
    for (int j = 0;; ++j) {
      if (j + M + 1 > sample.horizon) break;
      if (viol < j + M + 2) break;  // shift no longer certified inside
      if (static_cast<int>(traj.size()) <= j + M + 1) break;
      Eigen::VectorXd r = traj[j + M + 1];
      for (int l = 0; l <= M; ++l) r -= gamma[l] * traj[j + l];
      worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
  }
  if (worst < 0.0)
    throw InsufficientSampleError("mismatch_bound: no certified points at this level");
  return worst;
}

std::vector<Eigen::MatrixXd> embed_candidate(const std::vector<Eigen::MatrixXd>& gamma) {
  if (gamma.empty()) throw ValidationError("embed_candidate: empty gamma");
  const int n = static_cast<int>(gamma[0].rows());
  std::vector<Eigen::MatrixXd> out;
  out.push_back(Eigen::MatrixXd::Zero(n, n));
  out.insert(out.end(), gamma.begin(), gamma.end());
  return out;
}

BasisReduction reduce_basis(const SampleSet& sample, int M, double rank_tol) {
  const FilteredData data = filter_level(sample, M);
  if (data.indices.empty())
    throw InsufficientSampleError("reduce_basis: no certified points at this level");
  const int cols = static_cast<int>(data.Phi.cols());

  Eigen::BDCSVD<Eigen::MatrixXd> svd(data.Phi, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rank_tol * sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;

  BasisReduction red;
  red.m = rank;
  red.min_singular_value = rank > 0 ? sv(rank - 1) : 0.0;
  red.dropped_singular_value = rank < sv.size() ? sv(rank) : 0.0;
  if (rank == cols) {
    red.P = Eigen::MatrixXd::Identity(cols, cols);  // no reduction: keep raw coordinates
  } else {
    red.P = svd.matrixV().leftCols(rank);
  }
  return red;
}

LiftedModel assemble(const GammaFit& fit, const BasisReduction& basis,
                     double delta_hat, double ball_radius) {
  const int M = fit.M;
  const int n = static_cast<int>(fit.gamma[0].rows());
  const int full = (M + 1) * n;
  if (basis.P.rows() != full)
    throw ValidationError("assemble: basis shape does not match the fit order");

  const Eigen::MatrixXd& P = basis.P;
  // Columns of P are orthonormal (or P is the identity), so the
  // pseudo-inverse is just the transpose; keep the general formula anyway.
  const Eigen::MatrixXd P_pinv =
      (P.transpose() * P).ldlt().solve(P.transpose());

  LiftedModel model;
  model.kind = LiftedModel::Transform::Stacked;
  model.exact = false;
  model.M = M;
  model.P = P;
  model.P_pinv = P_pinv;
  model.gamma = fit.gamma;
  model.delta_hat = delta_hat;
  model.min_singular_value = basis.min_singular_value;

  const Eigen::MatrixXd Gamma = companion_matrix(fit.gamma);
  model.A = P_pinv * Gamma * P;
  model.C = P.topRows(n);  // [I_n 0] P

  Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(full, n);
  tail.bottomRows(n).setIdentity();
  model.B = P_pinv * tail;

  model.mismatch = MismatchSet{model.B, delta_hat, ball_radius};
  return model;
}

MismatchSet inflate_for_covering(const LiftedModel& model, double lipschitz,
                                 double eps) {
  if (eps < 0 || lipschitz < 0)
    throw ValidationError("inflate_for_covering: negative arguments");
  double lt = 1.0;
  double pw = 1.0;
  for (int l = 1; l <= model.M; ++l) {
    pw *= lipschitz;
    lt = std::max(lt, pw);
  }
  lt *= std::sqrt(static_cast<double>(model.M + 1));
  MismatchSet out = model.mismatch;
  out.ball_radius += lt * (lipschitz + spectral_norm(model.A)) * eps;
  return out;
}

ChebyshevFit fit_gamma_chebyshev(const SampleSet& sample, int M, int cap) {
  const FilteredData data = filter_level(sample, M);
  const int n = static_cast<int>(data.Y.cols());
  const int cols = (M + 1) * n;
  const int avail = static_cast<int>(data.indices.size());
  if (avail < cols)
    throw InsufficientSampleError("fit_gamma_chebyshev: not enough certified points");

  // Evenly strided subset when the sample exceeds the cap.
  std::vector<int> rows;
  if (avail <= cap) {
    rows.resize(avail);
    for (int i = 0; i < avail; ++i) rows[i] = i;
  } else {
    rows.reserve(cap);
    for (int i = 0; i < cap; ++i) rows.push_back((i * avail) / cap);
  }

  // Variables v = (vec_rows(G), delta); constraints +-(G_i . phi - y_i) <= delta.
  const int nv = n * cols + 1;
  const int nr = 2 * static_cast<int>(rows.size()) * n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nr, nv);
  Eigen::VectorXd b(nr);
  int r = 0;
  for (int pt : rows) {
    for (int i = 0; i < n; ++i) {
      for (int s : {+1, -1}) {
        A.block(r, i * cols, 1, cols) = s * data.Phi.row(pt);
        A(r, nv - 1) = -1.0;
        b(r) = s * data.Y(pt, i);
        ++r;
      }
    }
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
  c(nv - 1) = 1.0;  // minimize delta

  lp::Options opts;
  opts.max_iterations = 200000;
  const auto res = lp::solve_inequality_form(A, b, c, opts);
  if (res.status != lp::Status::Optimal)
    throw NumericalError("fit_gamma_chebyshev: LP did not reach an optimum");

  ChebyshevFit fit;
  fit.points_used = static_cast<int>(rows.size());
  fit.delta_lp = res.v(nv - 1);
  for (int l = 0; l <= M; ++l) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      g.row(i) = res.v.segment(i * cols + l * n, n).transpose();
    fit.gamma.push_back(g);
  }
  return fit;
}

Eigen::VectorXd LiftedModel::transform(const NonlinearSystem* sys,
                                       const Eigen::VectorXd& x) const {
  if (kind == Transform::Cascade) {
    if (x.size() != n_eta + n_z)
      throw ValidationError("transform: state dimension mismatch");
    Eigen::VectorXd out(lifted_dim());
    out.head(n_eta) = x.head(n_eta);
    out.tail(lifted_dim() - n_eta) = lift_vector_graded(x.tail(n_z), lift_degree);
    return out;
  }
  if (sys == nullptr)
    throw ValidationError("transform: stacked models need the dynamics");
  return P_pinv * stack_trajectory(*sys, x, M);
}

namespace {

Eigen::MatrixXd read_named_matrix(std::istream& is, const std::string& expect) {
  std::string key;
  if (!(is >> key) || key != expect)
    throw ValidationError("model text: expected matrix '" + expect + "'");
  return read_matrix(is);
}

}  // namespace

void write_model(std::ostream& os, const LiftedModel& model) {
  os << "invlift-model 1\n";
  os << "kind " << (model.kind == LiftedModel::Transform::Cascade ? "cascade" : "stacked") << '\n';
  os << "exact " << (model.exact ? 1 : 0) << '\n';
  os << "M " << model.M << '\n';
  os << "n_eta " << model.n_eta << " n_z " << model.n_z << " degree "
     << model.lift_degree << '\n';
  os.precision(17);
  os << "delta_hat " << model.delta_hat << '\n';
  os << "min_singular_value " << model.min_singular_value << '\n';
  os << "mismatch_delta " << model.mismatch.delta << '\n';
  os << "mismatch_ball " << model.mismatch.ball_radius << '\n';
  os << "A\n";
  write_matrix(os, model.A);
  os << "C\n";
  write_matrix(os, model.C);
  os << "B\n";
  write_matrix(os, model.B);
  os << "P\n";
  write_matrix(os, model.P);
  os << "mismatch_map\n";
  write_matrix(os, model.mismatch.image_map);
  os << "gamma_count " << model.gamma.size() << '\n';
  for (std::size_t i = 0; i < model.gamma.size(); ++i) {
    os << "gamma" << i << '\n';
    write_matrix(os, model.gamma[i]);
  }
  os << "end\n";
}

LiftedModel read_model(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "invlift-model" || version != 1)
    throw ValidationError("model text: bad header");

  LiftedModel model;
  std::string key;

  auto expect_key = [&](const std::string& want) {
    if (!(is >> key) || key != want)
      throw ValidationError("model text: expected '" + want + "'");
  };

  expect_key("kind");
  std::string kind;
  is >> kind;
  if (kind == "cascade")
    model.kind = LiftedModel::Transform::Cascade;
  else if (kind == "stacked")
    model.kind = LiftedModel::Transform::Stacked;
  else
    throw ValidationError("model text: unknown kind '" + kind + "'");

  int exact = 0;
  expect_key("exact");
  is >> exact;
  model.exact = exact != 0;
  expect_key("M");
  is >> model.M;
  expect_key("n_eta");
  is >> model.n_eta;
  expect_key("n_z");
  is >> model.n_z;
  expect_key("degree");
  is >> model.lift_degree;
  expect_key("delta_hat");
  is >> model.delta_hat;
  expect_key("min_singular_value");
  is >> model.min_singular_value;
  expect_key("mismatch_delta");
  is >> model.mismatch.delta;
  expect_key("mismatch_ball");
  is >> model.mismatch.ball_radius;
  if (!is) throw ValidationError("model text: truncated scalar block");

  model.A = read_named_matrix(is, "A");
  model.C = read_named_matrix(is, "C");
  model.B = read_named_matrix(is, "B");
  model.P = read_named_matrix(is, "P");
  model.mismatch.image_map = read_named_matrix(is, "mismatch_map");

  expect_key("gamma_count");
  std::size_t count = 0;
  is >> count;
  for (std::size_t i = 0; i < count; ++i)
    model.gamma.push_back(read_named_matrix(is, "gamma" + std::to_string(i)));
  expect_key("end");

  if (model.P.size() > 0)
    model.P_pinv = (model.P.transpose() * model.P).ldlt().solve(model.P.transpose());
  return model;
}

}  // namespace invlift
