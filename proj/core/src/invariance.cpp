#include "invlift/invariance.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "invlift/errors.hpp"
#include "invlift/immersion.hpp"

namespace invlift {

namespace {

constexpr double kZeroRowTol = 1e-13;

InvariantResult empty_result(int lifted_dim, int k, bool determined) {
  InvariantResult res;
  res.omega = Polytope::empty_set(lifted_dim);
  res.k_star = k;
  res.finitely_determined = determined;
  return res;
}

/* Shared fixed-point loop.  `one_step_support` gives the support function
 * of the per-step uncertainty in the lifted space (null for none).  Each
 * new constraint row is kept only when its LP maximum over the current set
 * exceeds the (tightened) offset; the iteration stops the first time a
 * whole step is redundant. */
InvariantResult mais_core(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                          const Polytope& X,
                          const std::function<double(const Eigen::VectorXd&)>& one_step_support,
                          int k_max) {
  const int m = static_cast<int>(A.rows());
  if (A.cols() != m) throw ValidationError("mais: A must be square");
  if (C.cols() != m) throw ValidationError("mais: C columns must match A");
  if (X.dim() != C.rows())
    throw ValidationError("mais: constraint dimension must match C rows");
  if (k_max < 0) throw ValidationError("mais: negative step limit");

  InvariantResult res;
  if (X.marked_empty()) return empty_result(m, 0, true);

  const Eigen::MatrixXd& H = X.normals();
  const Eigen::VectorXd& h = X.offsets();
  const int q = X.num_rows();

  Eigen::MatrixXd E = C;  // C A^k while the loop advances
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(q);
  res.tightening_trace.push_back(acc);

  Polytope omega(H * E, h);
  res.rows_added.push_back(omega.num_rows());
  if (is_empty(omega)) return empty_result(m, 0, true);

  for (int k = 1; k <= k_max; ++k) {
    if (one_step_support)
      for (int i = 0; i < q; ++i)
        acc(i) += one_step_support(E.transpose() * H.row(i).transpose());
    E = E * A;
    res.tightening_trace.push_back(acc);

    const Eigen::MatrixXd cand = H * E;
    const Eigen::VectorXd coff = h - acc;

    std::vector<int> keep;
    for (int i = 0; i < q; ++i) {
      const Eigen::VectorXd a = cand.row(i).transpose();
      const double nrm = a.norm();
      if (nrm <= kZeroRowTol) {
        // Constant constraint: impossible offsets empty the whole set.
        if (coff(i) < -kGeometryTol) return empty_result(m, k, true);
        continue;
      }
      bool redundant;
      try {
        redundant = support(omega, a / nrm) <= coff(i) / nrm + kGeometryTol;
      } catch (const UnboundedDirectionError&) {
        redundant = false;
      } catch (const EmptySetError&) {
        return empty_result(m, k, true);
      }
      if (!redundant) keep.push_back(i);
    }

    if (keep.empty()) {
      res.k_star = k - 1;
      res.finitely_determined = true;
      res.omega = std::move(omega);
      return res;
    }

    const int old = omega.num_rows();
    Eigen::MatrixXd Hn(old + keep.size(), m);
    Eigen::VectorXd hn(old + keep.size());
    Hn.topRows(old) = omega.normals();
    hn.head(old) = omega.offsets();
    for (std::size_t j = 0; j < keep.size(); ++j) {
      Hn.row(old + j) = cand.row(keep[j]);
      hn(old + j) = coff(keep[j]);
    }
    omega = Polytope(std::move(Hn), std::move(hn));
    res.rows_added.push_back(static_cast<int>(keep.size()));
    res.k_star = k;
    if (is_empty(omega)) return empty_result(m, k, true);
  }

  res.finitely_determined = false;
  res.k_star = k_max;
  res.omega = std::move(omega);
  return res;
}

}  // namespace

std::vector<bool> nonlinear_Ok_membership(const SampleSet& sample, int k) {
  if (k < 0) throw ValidationError("Ok membership: negative step index");
  if (k > sample.horizon)
    throw HorizonError("Ok membership: step index beyond the sample horizon");
  std::vector<bool> mask(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    mask[i] = sample.violation_index[i] > k;
  return mask;
}

InvariantResult linear_mais(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                            const Polytope& X, int k_max) {
  return mais_core(A, C, X, nullptr, k_max);
}

InvariantResult tightened_mais(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                               const Polytope& X, const MismatchSet& mismatch,
                               int k_max) {
  if (mismatch.is_zero()) return mais_core(A, C, X, nullptr, k_max);
  if (mismatch.dim() != A.rows())
    throw ValidationError("mais: mismatch set dimension must match A");
  auto sup = [&mismatch](const Eigen::VectorXd& a) { return support(mismatch, a); };
  return mais_core(A, C, X, sup, k_max);
}

InvariantResult tightened_mais(const LiftedModel& model, const Polytope& X,
                               int k_max, const std::optional<MismatchSet>& extra) {
  if (!extra) return tightened_mais(model.A, model.C, X, model.mismatch, k_max);
  if (extra->dim() != model.lifted_dim())
    throw ValidationError("mais: extra mismatch dimension must match the model");
  if (extra->is_zero() && model.mismatch.is_zero())
    return mais_core(model.A, model.C, X, nullptr, k_max);
  auto sup = [&](const Eigen::VectorXd& a) {
    return support(model.mismatch, a) + support(*extra, a);
  };
  return mais_core(model.A, model.C, X, sup, k_max);
}

bool preimage_contains(const LiftedModel& model, const NonlinearSystem* sys,
                       const Polytope& omega, const Eigen::VectorXd& x,
                       double tol) {
  if (!x.allFinite()) throw ValidationError("preimage query: non-finite state");
  return contains(omega, model.transform(sys, x), tol);
}

Algorithm1Result run_algorithm1(const SampleSet& sample, const Polytope& X,
                                const Algorithm1Options& opts) {
  if (opts.delta_target <= 0)
    throw ValidationError("algorithm: mismatch target must be positive");
  if (opts.M_max < 0) throw ValidationError("algorithm: negative M_max");
  if (sample.horizon < opts.M_max + 1)
    throw ValidationError("algorithm: trajectory horizon must exceed M_max");
  if (opts.covering_eps > 0 && opts.lipschitz <= 0)
    throw ValidationError("algorithm: covering inflation needs a Lipschitz constant");

  Algorithm1Result out;
  double delta = opts.delta_target;

  for (int M = 0; M <= opts.M_max; ++M) {
    GammaFit fit = fit_gamma(sample, M, opts.ridge);
    const double dhat = mismatch_bound(sample, fit.gamma, M);
    out.tried_M.push_back(M);
    out.delta_hats.push_back(dhat);
    out.delta_schedule.push_back(delta);
    if (dhat >= delta) continue;

    const BasisReduction basis = reduce_basis(sample, M);
    LiftedModel model = assemble(fit, basis, dhat);
    if (opts.covering_eps > 0)
      model.mismatch = inflate_for_covering(model, opts.lipschitz, opts.covering_eps);

    InvariantResult inv = tightened_mais(model, X, opts.k_max, opts.extra);
    if (is_empty(inv.omega)) {
      delta *= 0.5;  // shrink the target before retrying one order higher
      continue;
    }

    out.M = M;
    out.model = std::move(model);
    out.invariant = std::move(inv);
    return out;
  }

  std::ostringstream msg;
  msg << "no nonempty invariant set up to M = " << opts.M_max
      << "; mismatch bounds per order:";
  msg.precision(6);
  for (std::size_t i = 0; i < out.tried_M.size(); ++i)
    msg << " M=" << out.tried_M[i] << ":" << out.delta_hats[i]
        << " (target " << out.delta_schedule[i] << ")";
  throw ExhaustionError(msg.str());
}

}  // namespace invlift
