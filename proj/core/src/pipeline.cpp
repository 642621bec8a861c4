#include "invlift/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include "invlift/errors.hpp"
#include "invlift/immersion.hpp"
#include "invlift/lifting.hpp"
#include "invlift/matrix_io.hpp"
#include "invlift/sampling.hpp"

namespace invlift {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("pipeline: cannot write " + path.string());
  return os;
}

std::string num(double v, int precision = 12) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

void write_effective(const RunConfig& cfg, const std::string& out_dir) {
  open_out(fs::path(out_dir) / "effective_config") << effective_config_json(cfg);
}

Polytope fit_region(const RunConfig& cfg, const Polytope& X) {
  return cfg.pipeline.rho > 0 ? inflate_region(X, cfg.pipeline.rho) : X;
}

/* Seed the sample per the config (grid or uniform) and roll trajectories. */
SampleSet config_sample(const RunConfig& cfg, const NonlinearSystem& sys,
                        const Polytope& X) {
  const Polytope region = fit_region(cfg, X);
  std::vector<Eigen::VectorXd> seeds;
  if (cfg.pipeline.grid_pitch)
    seeds = grid_points(region, *cfg.pipeline.grid_pitch);
  else if (cfg.pipeline.random_count)
    seeds = random_points(region, *cfg.pipeline.random_count, cfg.pipeline.seed);
  else
    throw ValidationError("pipeline: no sampling source configured");
  return build_sample(sys, region, seeds, cfg.pipeline.horizon);
}

int model_order(const LiftedModel& model) {
  return model.kind == LiftedModel::Transform::Cascade ? model.lift_degree : model.M;
}

void write_invariant_file(const fs::path& path, const InvariantResult& r,
                          const LiftedModel& model) {
  std::ofstream os = open_out(path);
  const Polytope& omega = r.omega;
  Eigen::MatrixXd aug(omega.num_rows(), omega.dim() + 1);
  if (omega.num_rows() > 0) aug << omega.normals(), omega.offsets();
  write_matrix(os, aug);
  os << "k_star " << r.k_star << "\n";
  os << "finitely_determined " << (r.finitely_determined ? 1 : 0) << "\n";
  os << "empty " << (omega.marked_empty() ? 1 : 0) << "\n";
  os << "M " << model_order(model) << "\n";
  os << "delta_hat " << num(model.delta_hat, 17) << "\n";
}

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
};

/* Extent of the set along coordinate `coord`; throws when unbounded. */
Axis axis_extent(const Polytope& P, int coord) {
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(P.dim());
  dir(coord) = 1.0;
  try {
    Axis ax;
    ax.hi = support(P, dir);
    ax.lo = -support(P, -dir);
    return ax;
  } catch (const UnboundedDirectionError&) {
    throw ValidationError("raster: constraint set unbounded along coordinate " +
                          std::to_string(coord + 1));
  }
}

std::vector<double> linspace(const Axis& ax, int count) {
  std::vector<double> out(count);
  const double step = (ax.hi - ax.lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = ax.lo + step * i;
  return out;
}

template <typename Pred>
void write_raster_csv(const fs::path& path, const std::vector<double>& xs,
                      const std::vector<double>& ys, Pred inside) {
  std::ofstream os = open_out(path);
  os << "x1,x2,inside\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      os << num(xs[i]) << ',' << num(ys[j]) << ','
         << (inside(xs[i], ys[j], i, j) ? 1 : 0) << '\n';
}

/* ---- SVG rendering ------------------------------------------------------
 * The picture is reconstructed from the raster CSVs so that the drawing is
 * a pure function of the emitted data files. */

struct RasterData {
  std::vector<double> xs, ys;              // sorted unique grid coordinates
  std::vector<std::vector<char>> inside;   // [ix][iy]
};

RasterData read_raster_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("svg: cannot read " + path.string());
  std::string line;
  std::getline(is, line);  // header
  std::vector<std::array<double, 3>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::array<double, 3> row{};
    if (!(ls >> row[0] >> row[1] >> row[2]))
      throw ValidationError("svg: malformed raster row in " + path.string());
    rows.push_back(row);
  }
  RasterData data;
  for (const auto& row : rows) {
    data.xs.push_back(row[0]);
    data.ys.push_back(row[1]);
  }
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(data.xs);
  dedupe(data.ys);
  data.inside.assign(data.xs.size(), std::vector<char>(data.ys.size(), 0));
  auto index_of = [](const std::vector<double>& v, double x) {
    return std::lower_bound(v.begin(), v.end(), x) - v.begin();
  };
  for (const auto& row : rows)
    data.inside[index_of(data.xs, row[0])][index_of(data.ys, row[1])] =
        row[2] != 0.0;
  return data;
}

struct SvgPanel {
  std::string title;
  fs::path raster;
  fs::path overlay;                       // empty = none
  std::vector<Eigen::Vector2d> outline;   // empty = none
};

constexpr double kPanelSize = 360.0;
constexpr double kPanelMargin = 42.0;

void render_layer(std::ostream& os, const RasterData& r, double ox, double oy,
                  double x0, double y0, double sx, double sy,
                  const std::string& fill) {
  if (r.xs.size() < 2 || r.ys.size() < 2) return;
  const double wx = (r.xs.back() - r.xs.front()) / (r.xs.size() - 1);
  const double wy = (r.ys.back() - r.ys.front()) / (r.ys.size() - 1);
  // Merge runs of consecutive inside cells per column to keep the file small.
  for (std::size_t i = 0; i < r.xs.size(); ++i) {
    std::size_t j = 0;
    while (j < r.ys.size()) {
      if (!r.inside[i][j]) {
        ++j;
        continue;
      }
      std::size_t j2 = j;
      while (j2 + 1 < r.ys.size() && r.inside[i][j2 + 1]) ++j2;
      const double xl = r.xs[i] - wx / 2, xr = r.xs[i] + wx / 2;
      const double yl = r.ys[j] - wy / 2, yh = r.ys[j2] + wy / 2;
      os << "<rect x=\"" << num(ox + (xl - x0) * sx, 6) << "\" y=\""
         << num(oy + kPanelSize - (yh - y0) * sy, 6) << "\" width=\""
         << num((xr - xl) * sx, 6) << "\" height=\"" << num((yh - yl) * sy, 6)
         << "\" fill=\"" << fill << "\"/>\n";
      j = j2 + 1;
    }
  }
}

void render_svg(const fs::path& path, const std::vector<SvgPanel>& panels) {
  const double width =
      panels.size() * (kPanelSize + kPanelMargin) + kPanelMargin;
  const double height = kPanelSize + 2 * kPanelMargin;
  std::ofstream os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width, 6)
     << "\" height=\"" << num(height, 6) << "\" viewBox=\"0 0 " << num(width, 6)
     << ' ' << num(height, 6) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const SvgPanel& panel = panels[p];
    const RasterData base = read_raster_csv(panel.raster);
    std::optional<RasterData> over;
    if (!panel.overlay.empty()) over = read_raster_csv(panel.overlay);

    double x0 = base.xs.front(), x1 = base.xs.back();
    double y0 = base.ys.front(), y1 = base.ys.back();
    for (const auto& v : panel.outline) {
      x0 = std::min(x0, v.x()), x1 = std::max(x1, v.x());
      y0 = std::min(y0, v.y()), y1 = std::max(y1, v.y());
    }
    if (x1 <= x0 || y1 <= y0) continue;
    const double sx = kPanelSize / (x1 - x0), sy = kPanelSize / (y1 - y0);
    const double ox = kPanelMargin + p * (kPanelSize + kPanelMargin);
    const double oy = kPanelMargin;

    os << "<text x=\"" << num(ox, 6) << "\" y=\"" << num(oy - 12, 6)
       << "\" font-family=\"sans-serif\" font-size=\"14\">" << panel.title
       << "</text>\n";
    os << "<rect x=\"" << num(ox, 6) << "\" y=\"" << num(oy, 6) << "\" width=\""
       << num(kPanelSize, 6) << "\" height=\"" << num(kPanelSize, 6)
       << "\" fill=\"none\" stroke=\"#999999\"/>\n";

    render_layer(os, base, ox, oy, x0, y0, sx, sy, "#9ec4e8");
    if (over) render_layer(os, *over, ox, oy, x0, y0, sx, sy, "#355f8d");

    if (!panel.outline.empty()) {
      os << "<polygon points=\"";
      for (const auto& v : panel.outline)
        os << num(ox + (v.x() - x0) * sx, 6) << ','
           << num(oy + kPanelSize - (v.y() - y0) * sy, 6) << ' ';
      os << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    }
  }
  os << "</svg>\n";
}

/* Lipschitz constant of the dynamics over the (optionally inflated)
 * constraint set; the gradient bound needs planar vertex enumeration. */
double region_lipschitz(const RunConfig& cfg, const NonlinearSystem& sys,
                        const Polytope& X) {
  return lipschitz_vertex(sys, fit_region(cfg, X));
}

}  // namespace

ImmerseArtifacts run_immerse(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_effective(cfg, out_dir);
  ImmerseArtifacts art;

  if (cfg.system.kind == SystemConfig::Kind::Cascade) {
    art.model = build_cascade_immersion(make_cascade(cfg.system));
    art.curve_M = {art.model.lift_degree};
    art.curve_delta = {art.model.delta_hat};
    art.selected_M = art.model.lift_degree;
  } else {
    const NonlinearSystem sys = make_system(cfg.system);
    const Polytope X = make_constraints(cfg);
    const SampleSet sample = config_sample(cfg, sys, X);

    std::vector<std::optional<GammaFit>> fits(cfg.pipeline.M_max + 1);
    int selected = -1;
    for (int M = 0; M <= cfg.pipeline.M_max; ++M) {
      double dhat = std::numeric_limits<double>::quiet_NaN();
      try {
        GammaFit fit = fit_gamma(sample, M, cfg.pipeline.ridge);
        dhat = mismatch_bound(sample, fit.gamma, M);
        fits[M] = std::move(fit);
      } catch (const ValidationError&) {
        // Not enough certified points at this order; recorded as NaN.
      }
      art.curve_M.push_back(M);
      art.curve_delta.push_back(dhat);
      if (selected < 0 && std::isfinite(dhat) && dhat < cfg.pipeline.delta_target)
        selected = M;
    }
    if (selected < 0) {
      std::ostringstream msg;
      msg << "immersion search exhausted: no lift order through M_max="
          << cfg.pipeline.M_max << " met the mismatch target "
          << cfg.pipeline.delta_target << " (bound per order:";
      for (std::size_t i = 0; i < art.curve_delta.size(); ++i)
        msg << ' ' << art.curve_M[i] << ": " << art.curve_delta[i];
      msg << ")";
      throw ExhaustionError(msg.str());
    }
    const BasisReduction basis = reduce_basis(sample, selected);
    art.model = assemble(*fits[selected], basis, art.curve_delta[selected]);
    if (cfg.pipeline.covering_eps > 0)
      art.model.mismatch = inflate_for_covering(
          art.model, region_lipschitz(cfg, sys, X), cfg.pipeline.covering_eps);
    art.selected_M = selected;
  }

  {
    std::ofstream os = open_out(fs::path(out_dir) / "delta_curve.csv");
    os << "M,delta_hat\n";
    for (std::size_t i = 0; i < art.curve_M.size(); ++i)
      os << art.curve_M[i] << ',' << num(art.curve_delta[i], 17) << '\n';
  }
  {
    std::ofstream os = open_out(fs::path(out_dir) / "model.txt");
    write_model(os, art.model);
  }
  return art;
}

InvariantArtifacts run_invariant(const RunConfig& cfg, const std::string& out_dir,
                                 const LiftedModel* reuse) {
  fs::create_directories(out_dir);
  write_effective(cfg, out_dir);

  const NonlinearSystem sys = make_system(cfg.system);
  const Polytope X = make_constraints(cfg);
  InvariantArtifacts art;

  auto cascade_mais = [&](const LiftedModel& model) {
    if (model.lifted_dim() != X.dim())
      throw ValidationError("invariant: model dimension " +
                            std::to_string(model.lifted_dim()) +
                            " does not match the lifted constraint dimension " +
                            std::to_string(X.dim()));
    // Cascade constraints live on the lifted coordinates directly.
    const Eigen::MatrixXd eye =
        Eigen::MatrixXd::Identity(model.lifted_dim(), model.lifted_dim());
    return linear_mais(model.A, eye, X, cfg.pipeline.k_max);
  };

  if (reuse != nullptr) {
    art.model = *reuse;
    if (art.model.kind == LiftedModel::Transform::Cascade) {
      art.nominal = cascade_mais(art.model);
    } else {
      if (art.model.state_dim() != X.dim())
        throw ValidationError("invariant: model state dimension " +
                              std::to_string(art.model.state_dim()) +
                              " does not match the constraint dimension " +
                              std::to_string(X.dim()));
      art.nominal = tightened_mais(art.model, X, cfg.pipeline.k_max);
    }
  } else if (cfg.system.kind == SystemConfig::Kind::Cascade) {
    art.model = build_cascade_immersion(make_cascade(cfg.system));
    art.nominal = cascade_mais(art.model);
  } else {
    const SampleSet sample = config_sample(cfg, sys, X);
    Algorithm1Options opts;
    opts.delta_target = cfg.pipeline.delta_target;
    opts.M_max = cfg.pipeline.M_max;
    opts.k_max = cfg.pipeline.k_max;
    opts.ridge = cfg.pipeline.ridge;
    if (cfg.pipeline.covering_eps > 0) {
      opts.covering_eps = cfg.pipeline.covering_eps;
      opts.lipschitz = region_lipschitz(cfg, sys, X);
    }
    const Algorithm1Result res = run_algorithm1(sample, X, opts);
    art.model = res.model;
    art.nominal = res.invariant;
  }

  if (reuse == nullptr) {
    std::ofstream os = open_out(fs::path(out_dir) / "model.txt");
    write_model(os, art.model);
  }
  // Rows only ever get checked against the set as it stood when they were
  // added, so a final pass trims the ones later steps made redundant.  The
  // set itself is unchanged; the rasters below get much cheaper.
  if (!art.nominal.omega.marked_empty())
    art.nominal.omega = remove_redundancy(art.nominal.omega);
  write_invariant_file(fs::path(out_dir) / "omega.txt", art.nominal, art.model);

  if (cfg.system.disturbance_radius > 0) {
    if (art.model.kind != LiftedModel::Transform::Stacked)
      throw ValidationError(
          "invariant: disturbance tightening needs a regressed model");
    // Accumulated gain of the stacked transformation on a state
    // disturbance: each of the M+1 blocks moves by at most L^level * r.
    const double L = region_lipschitz(cfg, sys, X);
    double gain = 0.0;
    for (int level = 0; level <= art.model.M; ++level) gain += std::pow(L, level);
    MismatchSet extra = MismatchSet::zero(art.model.lifted_dim());
    extra.ball_radius = gain * cfg.system.disturbance_radius;
    art.disturbed = tightened_mais(art.model, X, cfg.pipeline.k_max, extra);
    write_invariant_file(fs::path(out_dir) / "omega_disturbed.txt",
                         *art.disturbed, art.model);
  }

  const int res = cfg.output.raster_resolution;
  std::vector<SvgPanel> panels;

  if (art.model.kind == LiftedModel::Transform::Stacked && X.dim() == 2) {
    const std::vector<double> xs = linspace(axis_extent(X, 0), res);
    const std::vector<double> ys = linspace(axis_extent(X, 1), res);
    auto member = [&](const Polytope& omega, double x, double y) {
      Eigen::Vector2d state(x, y);
      return preimage_contains(art.model, &sys, omega, state);
    };
    const fs::path raster = fs::path(out_dir) / "preimage.csv";
    write_raster_csv(raster, xs, ys,
                     [&](double x, double y, std::size_t, std::size_t) {
                       return member(art.nominal.omega, x, y);
                     });
    SvgPanel panel{"preimage of the invariant set", raster, {}, vertices_2d(X)};
    if (art.disturbed) {
      const fs::path draster = fs::path(out_dir) / "preimage_disturbed.csv";
      write_raster_csv(draster, xs, ys,
                       [&](double x, double y, std::size_t, std::size_t) {
                         return member(art.disturbed->omega, x, y);
                       });
      panel.overlay = draster;
    }
    panels.push_back(std::move(panel));
  } else if (art.model.kind == LiftedModel::Transform::Cascade &&
             art.model.n_eta == 2 && art.model.n_z == 2) {
    const int ne = art.model.n_eta;
    const int degree = art.model.lift_degree;
    const int lift_len = graded_lift_size(art.model.n_z, degree);
    const Eigen::MatrixXd H_eta = art.nominal.omega.normals().leftCols(ne);
    const Eigen::MatrixXd H_lift = art.nominal.omega.normals().rightCols(lift_len);
    const Eigen::VectorXd& h = art.nominal.omega.offsets();
    const bool omega_empty = art.nominal.omega.marked_empty();

    // Split the rows by whether they actually involve eta.  Propagated row
    // normals lose their eta part geometrically (the eta block is stable),
    // so most rows constrain the lift coordinates alone; those are shared
    // by every point of an eta raster column and get checked vectorized.
    std::vector<int> pure, coupled;
    for (int i = 0; i < art.nominal.omega.num_rows(); ++i)
      (H_eta.row(i).norm() <= 1e-12 ? pure : coupled).push_back(i);
    Eigen::MatrixXd Hc(coupled.size(), ne);
    for (std::size_t i = 0; i < coupled.size(); ++i)
      Hc.row(i) = H_eta.row(coupled[i]);

    auto lift_rhs = [&](double zx, double zy) -> Eigen::VectorXd {
      return h - H_lift * lift_vector_graded(Eigen::Vector2d(zx, zy), degree);
    };
    auto pure_feasible = [&](const Eigen::VectorXd& rhs) {
      for (int i : pure)
        if (rhs(i) < -kGeometryTol) return false;
      return true;
    };

    const std::vector<double> exs = linspace(axis_extent(X, 0), res);
    const std::vector<double> eys = linspace(axis_extent(X, 1), res);
    const std::vector<double> zxs = linspace(axis_extent(X, ne), res);
    const std::vector<double> zys = linspace(axis_extent(X, ne + 1), res);

    // Eta panel: a point is inside when some witness z makes the lifted
    // point feasible.  Per witness the feasible eta set is a halfplane
    // intersection, so each raster column reduces to a y-interval.
    const int wres = cfg.output.witness_resolution;
    const std::vector<double> wxs = linspace(axis_extent(X, ne), wres);
    const std::vector<double> wys = linspace(axis_extent(X, ne + 1), wres);
    std::vector<std::vector<char>> eta_hits(exs.size(),
                                            std::vector<char>(eys.size(), 0));
    const double ylo0 = eys.front(), ystep = (eys.back() - eys.front()) / (res - 1);
    if (!omega_empty) {
      for (int wi = 0; wi < wres; ++wi)
        for (int wj = 0; wj < wres; ++wj) {
          const Eigen::VectorXd rhs = lift_rhs(wxs[wi], wys[wj]);
          if (!pure_feasible(rhs)) continue;
          for (std::size_t ix = 0; ix < exs.size(); ++ix) {
            double lo = eys.front(), hi = eys.back();
            bool feasible = true;
            for (std::size_t r = 0; r < coupled.size() && feasible; ++r) {
              const double a1 = Hc(r, 0), a2 = Hc(r, 1);
              const double v = rhs(coupled[r]) + kGeometryTol - a1 * exs[ix];
              if (a2 > 1e-12)
                hi = std::min(hi, v / a2);
              else if (a2 < -1e-12)
                lo = std::max(lo, v / a2);
              else if (v < 0)
                feasible = false;
              if (lo > hi) feasible = false;
            }
            if (!feasible) continue;
            const int jlo = std::max(
                0, static_cast<int>(std::ceil((lo - ylo0) / ystep - 1e-9)));
            const int jhi = std::min(
                res - 1,
                static_cast<int>(std::floor((hi - ylo0) / ystep + 1e-9)));
            for (int j = jlo; j <= jhi; ++j) eta_hits[ix][j] = 1;
          }
        }
    }
    const fs::path eta_raster = fs::path(out_dir) / "preimage.csv";
    write_raster_csv(eta_raster, exs, eys,
                     [&](double, double, std::size_t i, std::size_t j) {
                       return eta_hits[i][j] != 0;
                     });
    panels.push_back({"eta projection of the preimage", eta_raster, {}, {}});

    // Z panel: existence of a feasible eta.  A small eta probe grid settles
    // most interior points; the emptiness LP only runs near the boundary.
    Eigen::MatrixXd probe_vals(coupled.size(), 16);
    {
      const std::vector<double> pxs = linspace(axis_extent(X, 0), 4);
      const std::vector<double> pys = linspace(axis_extent(X, 1), 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          probe_vals.col(i * 4 + j) = Hc * Eigen::Vector2d(pxs[i], pys[j]);
    }
    const fs::path z_raster = fs::path(out_dir) / "preimage_z.csv";
    write_raster_csv(
        z_raster, zxs, zys, [&](double x, double y, std::size_t, std::size_t) {
          if (omega_empty) return false;
          const Eigen::VectorXd rhs = lift_rhs(x, y);
          if (!pure_feasible(rhs)) return false;
          if (coupled.empty()) return true;
          Eigen::VectorXd rc(coupled.size());
          for (std::size_t r = 0; r < coupled.size(); ++r)
            rc(r) = rhs(coupled[r]);
          const Eigen::RowVectorXd probe_worst =
              (probe_vals.colwise() - rc).colwise().maxCoeff();
          if ((probe_worst.array() <= kGeometryTol).any()) return true;
          return !is_empty(Polytope(Hc, rc));
        });
    panels.push_back({"z projection of the preimage", z_raster, {}, {}});
  }

  if (cfg.output.emit_svg && !panels.empty())
    render_svg(fs::path(out_dir) / "preimage.svg", panels);
  return art;
}

AssumptionReport run_certify(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_effective(cfg, out_dir);

  if (cfg.system.kind != SystemConfig::Kind::Polynomial)
    throw ValidationError(
        "certify: only polynomial systems with planar constraints are supported");
  const NonlinearSystem sys = make_system(cfg.system);
  const Polytope X = make_constraints(cfg);

  CertifyOptions opts;
  opts.rho = cfg.pipeline.rho;
  opts.max_chain = cfg.pipeline.max_chain;
  opts.seed = cfg.pipeline.seed;
  const AssumptionReport report = certify(sys, X, opts);

  auto verdict = [](Verdict v) {
    switch (v) {
      case Verdict::Pass: return "PASS";
      case Verdict::Fail: return "FAIL";
      default: return "NOT CHECKED";
    }
  };

  std::ofstream os = open_out(fs::path(out_dir) / "report.txt");
  os << "regularity certification\n";
  os << "state dimension: " << X.dim() << ", constraint rows: " << X.num_rows()
     << ", rho: " << num(opts.rho) << "\n\n";

  os << "A1 Lipschitz bound over the constraint set: " << verdict(report.a1)
     << "\n";
  os << "  L_f = " << num(report.lipschitz) << "\n\n";

  os << "A2 reach-chain re-entry inside the constraints: " << verdict(report.a2)
     << "\n";
  os << "  re-entry index = " << report.reentry << "\n";
  os << "  chain length = " << report.reach_chain.size() << "\n";
  os << "  chain member inside constraints:";
  for (bool in : report.inside_X) os << ' ' << (in ? 1 : 0);
  os << "\n\n";

  os << "A3 trajectory norm envelope c * rate^t: " << verdict(report.a3) << "\n";
  os << "  rate = " << num(report.a3_rate) << "\n";
  os << "  c = " << num(report.a3_constant) << "\n\n";

  os << "A4 trajectory divergence envelope c * rate^t: " << verdict(report.a4)
     << "\n";
  os << "  rate = " << num(report.a4_rate) << "\n";
  os << "  c = " << num(report.a4_constant) << "\n\n";

  os << "contraction factor per chain member:";
  for (double f : report.rho_factors) os << ' ' << num(f);
  os << "\nLipschitz constant per chain member:";
  for (double f : report.lip_factors) os << ' ' << num(f);
  os << "\n";
  return report;
}

}  // namespace invlift
