#include "invlift/certification.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "invlift/errors.hpp"
#include "invlift/sampling.hpp"

namespace invlift {

namespace {

double spectral_norm(const Eigen::MatrixXd& A) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
}

Eigen::MatrixXd gradient_at(const AffineGradient& g, const Eigen::Vector2d& v) {
  Eigen::MatrixXd J = g.A0;
  for (int i = 0; i < 2; ++i) J += v(i) * g.G[i];
  return J;
}

Eigen::MatrixXd factored_at(const FactoredForm& f, const Eigen::Vector2d& v) {
  Eigen::MatrixXd A = f.A + f.Abar0;
  for (int i = 0; i < 2; ++i) A += v(i) * f.Abar[i];
  return A;
}

double max_gradient_norm(const AffineGradient& g,
                         const std::vector<Eigen::Vector2d>& verts) {
  double worst = 0.0;
  for (const auto& v : verts) worst = std::max(worst, spectral_norm(gradient_at(g, v)));
  return worst;
}

double max_factored_norm(const FactoredForm& f,
                         const std::vector<Eigen::Vector2d>& verts) {
  double worst = 0.0;
  for (const auto& v : verts) worst = std::max(worst, spectral_norm(factored_at(f, v)));
  return worst;
}

Hull2d reach_from_vertices(const FactoredForm& f,
                           const std::vector<Eigen::Vector2d>& verts) {
  std::vector<Eigen::Vector2d> images;
  images.reserve(verts.size() * verts.size());
  for (const auto& v : verts) {
    const Eigen::MatrixXd Av = factored_at(f, v);
    for (const auto& x : verts) images.push_back(Av * x);
  }
  return hull_2d(images);
}

bool poly_subset(const Polytope& P, const Polytope& Q, double tol) {
  if (P.marked_empty()) return true;
  for (int i = 0; i < Q.num_rows(); ++i) {
    double s;
    try {
      s = support(P, Q.normals().row(i).transpose());
    } catch (const EmptySetError&) {
      return true;
    } catch (const UnboundedDirectionError&) {
      return false;
    }
    if (s > Q.offsets()(i) + tol) return false;
  }
  return true;
}

void check_factored_form(const NonlinearSystem& sys, const Polytope& X,
                         std::uint64_t seed) {
  const FactoredForm& f = *sys.factored_form();
  if (f.A.rows() != 2 || f.A.cols() != 2 || f.Abar.size() != 2)
    throw ValidationError("certify: factored form blocks must be 2 x 2");
  for (const auto& x : random_points(X, 64, seed)) {
    const Eigen::Vector2d v = x.head<2>();
    const Eigen::VectorXd via_factored = factored_at(f, v) * x;
    const Eigen::VectorXd direct = sys.eval(x);
    const double err = (via_factored - direct).lpNorm<Eigen::Infinity>();
    if (err > 1e-8 * (1.0 + direct.lpNorm<Eigen::Infinity>()))
      throw ValidationError(
          "certify: declared factored form disagrees with the dynamics");
  }
}

/* Largest c with envelope(t) <= c * rate^t: the worst prefix of the
 * factor chain, with the rate itself applying from `reentry` onward. */
double envelope_constant(const std::vector<double>& factors, int reentry,
                         double rate) {
  double c = 1.0;
  double prefix = 1.0;
  double pw = 1.0;
  for (int t = 1; t <= reentry; ++t) {
    prefix *= factors[t - 1];
    pw *= rate;
    c = std::max(c, prefix / pw);
  }
  return c;
}

}  // namespace

double lipschitz_vertex(const NonlinearSystem& sys, const Polytope& P) {
  if (!sys.affine_gradient())
    throw ValidationError(
        "lipschitz: the system has no gradient affine in the state");
  const auto verts = vertices_2d(P);
  if (verts.empty()) throw EmptySetError("lipschitz: the region is empty");
  return max_gradient_norm(*sys.affine_gradient(), verts);
}

Hull2d reach_overapprox(const NonlinearSystem& sys, const Polytope& Z) {
  if (!sys.factored_form())
    throw ValidationError("reach: the system declares no factored form");
  const auto verts = vertices_2d(Z);
  if (verts.empty()) throw EmptySetError("reach: the source set is empty");
  return reach_from_vertices(*sys.factored_form(), verts);
}

double contraction_factor(const NonlinearSystem& sys, const Polytope& P) {
  if (!sys.factored_form())
    throw ValidationError("contraction: the system declares no factored form");
  const auto verts = vertices_2d(P);
  if (verts.empty()) throw EmptySetError("contraction: the region is empty");
  return max_factored_norm(*sys.factored_form(), verts);
}

AssumptionReport certify(const NonlinearSystem& sys, const Polytope& X,
                         const CertifyOptions& opts) {
  if (sys.dim() != 2 || X.dim() != 2)
    throw UnsupportedDimensionError("certify: planar systems only");
  if (opts.max_chain < 1) throw ValidationError("certify: max_chain must be >= 1");

  AssumptionReport rep;
  const bool has_grad = sys.affine_gradient().has_value();
  const bool has_fact = sys.factored_form().has_value();
  if (has_fact) check_factored_form(sys, X, opts.seed);

  if (has_grad) {
    const Polytope region = opts.rho > 0 ? inflate_region(X, opts.rho) : X;
    rep.lipschitz = lipschitz_vertex(sys, region);
    rep.a1 = Verdict::Pass;
  }
  if (!has_fact) return rep;  // no reach chain without the factored form

  const FactoredForm& fact = *sys.factored_form();
  rep.reach_chain.push_back(X);
  rep.chain_vertices.push_back(vertices_2d(X));
  rep.inside_X.push_back(true);

  for (int k = 0; k < opts.max_chain && rep.reentry < 0; ++k) {
    Hull2d next = reach_from_vertices(fact, rep.chain_vertices[k]);
    const bool in_prev = poly_subset(next.poly, rep.reach_chain[k], kGeometryTol);
    rep.inside_X.push_back(poly_subset(next.poly, X, kGeometryTol));
    rep.reach_chain.push_back(std::move(next.poly));
    rep.chain_vertices.push_back(std::move(next.vertices));
    if (in_prev && rep.inside_X[k]) rep.reentry = k;
  }

  for (std::size_t i = 0; i < rep.reach_chain.size(); ++i) {
    rep.rho_factors.push_back(max_factored_norm(fact, rep.chain_vertices[i]));
    if (has_grad)
      rep.lip_factors.push_back(
          max_gradient_norm(*sys.affine_gradient(), rep.chain_vertices[i]));
  }

  rep.a2 = rep.reentry >= 0 ? Verdict::Pass : Verdict::Fail;
  if (rep.reentry < 0) return rep;

  rep.a3_rate = rep.rho_factors[rep.reentry];
  if (rep.a3_rate < 1.0) {
    rep.a3_constant = envelope_constant(rep.rho_factors, rep.reentry, rep.a3_rate);
    rep.a3 = Verdict::Pass;
  } else {
    rep.a3 = Verdict::Fail;
  }

  if (has_grad) {
    rep.a4_rate = rep.lip_factors[rep.reentry];
    if (rep.a4_rate < 1.0) {
      rep.a4_constant = envelope_constant(rep.lip_factors, rep.reentry, rep.a4_rate);
      rep.a4 = Verdict::Pass;
    } else {
      rep.a4 = Verdict::Fail;
    }
  }
  return rep;
}

}  // namespace invlift
