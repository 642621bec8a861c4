#include "invlift/config.hpp"

#include <json.hpp>
#include <set>
#include <sstream>

#include "invlift/errors.hpp"

namespace invlift {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown field");
}

const json* maybe(const json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
  const Eigen::VectorXd first = as_vector(j[0], path + "[0]");
  Eigen::MatrixXd m(j.size(), first.size());
  m.row(0) = first.transpose();
  for (std::size_t i = 1; i < j.size(); ++i) {
    const Eigen::VectorXd row = as_vector(j[i], path + "[" + std::to_string(i) + "]");
    if (row.size() != m.cols()) fail(path, "rows have inconsistent lengths");
    m.row(i) = row.transpose();
  }
  return m;
}

PolynomialCoordinate as_poly_table(const json& j, const std::string& path, int n) {
  if (!j.is_array()) fail(path, "expected an array of terms");
  PolynomialCoordinate table;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string tpath = path + "[" + std::to_string(t) + "]";
    const json& term = j[t];
    if (!term.is_object()) fail(tpath, "expected an object");
    reject_unknown(term, tpath, {"exponents", "coefficient"});
    const json* exps = maybe(term, "exponents");
    const json* coef = maybe(term, "coefficient");
    if (!exps || !coef) fail(tpath, "needs exponents and coefficient");
    if (!exps->is_array() || static_cast<int>(exps->size()) != n)
      fail(tpath + ".exponents", "expected " + std::to_string(n) + " entries");
    MultiIndex mi(n);
    for (int i = 0; i < n; ++i) {
      mi[i] = as_int((*exps)[i], tpath + ".exponents[" + std::to_string(i) + "]");
      if (mi[i] < 0) fail(tpath + ".exponents", "negative exponent");
    }
    table.push_back({mi, as_number(*coef, tpath + ".coefficient")});
  }
  return table;
}

SystemConfig parse_system(const json& j) {
  SystemConfig sys;
  reject_unknown(j, "system",
                 {"kind", "coordinates", "factored_form", "disturbance_radius",
                  "A_eta", "A_z", "phi_lift"});
  const json* kind = maybe(j, "kind");
  if (!kind || !kind->is_string()) fail("system.kind", "expected a string");
  const std::string k = kind->get<std::string>();
  if (k == "polynomial")
    sys.kind = SystemConfig::Kind::Polynomial;
  else if (k == "cascade")
    sys.kind = SystemConfig::Kind::Cascade;
  else
    fail("system.kind", "expected 'polynomial' or 'cascade'");

  if (const json* d = maybe(j, "disturbance_radius")) {
    sys.disturbance_radius = as_number(*d, "system.disturbance_radius");
    if (sys.disturbance_radius < 0)
      fail("system.disturbance_radius", "must be nonnegative");
  }

  if (sys.kind == SystemConfig::Kind::Polynomial) {
    const json* coords = maybe(j, "coordinates");
    if (!coords || !coords->is_array() || coords->empty())
      fail("system.coordinates", "expected one term table per state coordinate");
    const int n = static_cast<int>(coords->size());
    for (int i = 0; i < n; ++i)
      sys.coordinates.push_back(as_poly_table(
          (*coords)[i], "system.coordinates[" + std::to_string(i) + "]", n));

    if (const json* f = maybe(j, "factored_form")) {
      reject_unknown(*f, "system.factored_form", {"A", "Abar0", "Abar"});
      FactoredForm ff;
      const json* A = maybe(*f, "A");
      const json* Abar = maybe(*f, "Abar");
      if (!A || !Abar) fail("system.factored_form", "needs A and Abar");
      ff.A = as_matrix(*A, "system.factored_form.A");
      if (ff.A.rows() != n || ff.A.cols() != n)
        fail("system.factored_form.A", "expected " + std::to_string(n) + " x " +
                                           std::to_string(n));
      ff.Abar0 = Eigen::MatrixXd::Zero(n, n);
      if (const json* A0 = maybe(*f, "Abar0")) {
        ff.Abar0 = as_matrix(*A0, "system.factored_form.Abar0");
        if (ff.Abar0.rows() != n || ff.Abar0.cols() != n)
          fail("system.factored_form.Abar0", "shape mismatch");
      }
      if (!Abar->is_array() || static_cast<int>(Abar->size()) != n)
        fail("system.factored_form.Abar", "expected one matrix per coordinate");
      for (int i = 0; i < n; ++i) {
        const std::string p = "system.factored_form.Abar[" + std::to_string(i) + "]";
        Eigen::MatrixXd m = as_matrix((*Abar)[i], p);
        if (m.rows() != n || m.cols() != n) fail(p, "shape mismatch");
        ff.Abar.push_back(std::move(m));
      }
      sys.factored = std::move(ff);
    }
    if (maybe(j, "A_eta") || maybe(j, "A_z") || maybe(j, "phi_lift"))
      fail("system", "cascade blocks are invalid for a polynomial system");
    return sys;
  }

  // Cascade
  if (maybe(j, "coordinates") || maybe(j, "factored_form"))
    fail("system", "polynomial blocks are invalid for a cascade system");
  const json* ae = maybe(j, "A_eta");
  const json* az = maybe(j, "A_z");
  const json* phi = maybe(j, "phi_lift");
  if (!ae || !az || !phi) fail("system", "cascade needs A_eta, A_z, phi_lift");
  sys.A_eta = as_matrix(*ae, "system.A_eta");
  sys.A_z = as_matrix(*az, "system.A_z");
  if (sys.A_eta.rows() != sys.A_eta.cols()) fail("system.A_eta", "must be square");
  if (sys.A_z.rows() != sys.A_z.cols()) fail("system.A_z", "must be square");
  if (!phi->is_array() || phi->empty())
    fail("system.phi_lift", "expected one block per degree");
  const int n_eta = static_cast<int>(sys.A_eta.rows());
  const int n_z = static_cast<int>(sys.A_z.rows());
  for (std::size_t d = 0; d < phi->size(); ++d) {
    const std::string p = "system.phi_lift[" + std::to_string(d) + "]";
    Eigen::MatrixXd block = as_matrix((*phi)[d], p);
    if (block.rows() != n_eta ||
        block.cols() != lift_size(n_z, static_cast<int>(d) + 1))
      fail(p, "expected " + std::to_string(n_eta) + " x " +
                  std::to_string(lift_size(n_z, static_cast<int>(d) + 1)));
    sys.phi_lift.push_back(std::move(block));
  }
  return sys;
}

ConstraintConfig parse_constraints(const json& j, const SystemConfig& sys) {
  ConstraintConfig con;
  reject_unknown(j, "constraints", {"rows", "box", "lifted_rows"});

  const bool cascade = sys.kind == SystemConfig::Kind::Cascade;
  const int n = cascade ? 0 : static_cast<int>(sys.coordinates.size());

  if (!cascade) {
    if (maybe(j, "lifted_rows"))
      fail("constraints.lifted_rows", "only valid for cascade systems");
    int rows = 0;
    if (const json* r = maybe(j, "rows")) {
      if (!r->is_array() || r->empty()) fail("constraints.rows", "expected an array");
      con.H.resize(r->size(), n);
      con.h.resize(r->size());
      for (std::size_t i = 0; i < r->size(); ++i) {
        const std::string p = "constraints.rows[" + std::to_string(i) + "]";
        if (!(*r)[i].is_object()) fail(p, "expected an object");
        reject_unknown((*r)[i], p, {"normal", "offset"});
        const json* normal = maybe((*r)[i], "normal");
        const json* offset = maybe((*r)[i], "offset");
        if (!normal || !offset) fail(p, "needs normal and offset");
        const Eigen::VectorXd a = as_vector(*normal, p + ".normal");
        if (a.size() != n) fail(p + ".normal", "expected " + std::to_string(n) + " entries");
        con.H.row(i) = a.transpose();
        con.h(i) = as_number(*offset, p + ".offset");
      }
      rows += static_cast<int>(r->size());
    } else {
      con.H.resize(0, n);
      con.h.resize(0);
    }
    if (const json* b = maybe(j, "box")) {
      reject_unknown(*b, "constraints.box", {"lower", "upper"});
      const json* lo = maybe(*b, "lower");
      const json* hi = maybe(*b, "upper");
      if (!lo || !hi) fail("constraints.box", "needs lower and upper");
      con.box_lower = as_vector(*lo, "constraints.box.lower");
      con.box_upper = as_vector(*hi, "constraints.box.upper");
      if (con.box_lower->size() != n || con.box_upper->size() != n)
        fail("constraints.box", "expected " + std::to_string(n) + " entries per bound");
      if ((con.box_upper->array() < con.box_lower->array()).any())
        fail("constraints.box", "upper bound below lower bound");
      rows += 2 * n;
    }
    if (rows == 0) fail("constraints", "needs rows and/or box");
    return con;
  }

  // Cascade
  if (maybe(j, "rows") || maybe(j, "box"))
    fail("constraints", "cascade systems take lifted_rows");
  const json* lr = maybe(j, "lifted_rows");
  if (!lr || !lr->is_array() || lr->empty())
    fail("constraints.lifted_rows", "expected a nonempty array");
  const int n_eta = static_cast<int>(sys.A_eta.rows());
  const int n_z = static_cast<int>(sys.A_z.rows());
  const int degree = static_cast<int>(sys.phi_lift.size());
  const int lift_len = graded_lift_size(n_z, degree);

  for (std::size_t i = 0; i < lr->size(); ++i) {
    const std::string p = "constraints.lifted_rows[" + std::to_string(i) + "]";
    if (!(*lr)[i].is_object()) fail(p, "expected an object");
    reject_unknown((*lr)[i], p, {"eta", "z_lift", "z_poly", "offset"});
    LiftedRowConfig row;
    const json* eta = maybe((*lr)[i], "eta");
    const json* offset = maybe((*lr)[i], "offset");
    if (!eta || !offset) fail(p, "needs eta and offset");
    row.eta = as_vector(*eta, p + ".eta");
    if (row.eta.size() != n_eta)
      fail(p + ".eta", "expected " + std::to_string(n_eta) + " entries");
    row.offset = as_number(*offset, p + ".offset");

    const json* zl = maybe((*lr)[i], "z_lift");
    const json* zp = maybe((*lr)[i], "z_poly");
    if (zl && zp) fail(p, "z_lift and z_poly are mutually exclusive");
    if (zl) {
      row.z_lift = as_vector(*zl, p + ".z_lift");
      if (row.z_lift.size() != lift_len)
        fail(p + ".z_lift", "expected " + std::to_string(lift_len) + " entries");
    } else if (zp) {
      row.z_poly = as_poly_table(*zp, p + ".z_poly", n_z);
    }
    con.lifted_rows.push_back(std::move(row));
  }
  return con;
}

PipelineConfig parse_pipeline(const json& j, const SystemConfig& sys) {
  PipelineConfig pipe;
  reject_unknown(j, "pipeline",
                 {"delta_target", "horizon", "M_max", "k_max", "grid_pitch",
                  "random_count", "seed", "ridge", "rho", "covering_eps",
                  "max_chain"});
  if (const json* v = maybe(j, "delta_target"))
    pipe.delta_target = as_number(*v, "pipeline.delta_target");
  if (pipe.delta_target <= 0) fail("pipeline.delta_target", "must be positive");
  if (const json* v = maybe(j, "horizon")) pipe.horizon = as_int(*v, "pipeline.horizon");
  if (pipe.horizon < 1) fail("pipeline.horizon", "must be at least 1");
  if (const json* v = maybe(j, "M_max")) pipe.M_max = as_int(*v, "pipeline.M_max");
  if (pipe.M_max < 0) fail("pipeline.M_max", "must be nonnegative");
  if (pipe.horizon < pipe.M_max + 1)
    fail("pipeline.horizon", "must be at least M_max + 1");
  if (const json* v = maybe(j, "k_max")) pipe.k_max = as_int(*v, "pipeline.k_max");
  if (pipe.k_max < 0) fail("pipeline.k_max", "must be nonnegative");
  if (const json* v = maybe(j, "grid_pitch")) {
    pipe.grid_pitch = as_number(*v, "pipeline.grid_pitch");
    if (*pipe.grid_pitch <= 0) fail("pipeline.grid_pitch", "must be positive");
  }
  if (const json* v = maybe(j, "random_count")) {
    pipe.random_count = as_int(*v, "pipeline.random_count");
    if (*pipe.random_count < 1) fail("pipeline.random_count", "must be positive");
  }
  if (pipe.grid_pitch && pipe.random_count)
    fail("pipeline", "grid_pitch and random_count are mutually exclusive");
  if (sys.kind == SystemConfig::Kind::Polynomial && !pipe.grid_pitch &&
      !pipe.random_count)
    fail("pipeline", "polynomial systems need grid_pitch or random_count");
  if (const json* v = maybe(j, "seed")) {
    if (!v->is_number_unsigned() && !v->is_number_integer())
      fail("pipeline.seed", "expected an unsigned integer");
    pipe.seed = v->get<std::uint64_t>();
  }
  if (const json* v = maybe(j, "ridge")) {
    pipe.ridge = as_number(*v, "pipeline.ridge");
    if (*pipe.ridge < 0) fail("pipeline.ridge", "must be nonnegative");
  }
  if (const json* v = maybe(j, "rho")) pipe.rho = as_number(*v, "pipeline.rho");
  if (pipe.rho < 0) fail("pipeline.rho", "must be nonnegative");
  if (const json* v = maybe(j, "covering_eps"))
    pipe.covering_eps = as_number(*v, "pipeline.covering_eps");
  if (pipe.covering_eps < 0) fail("pipeline.covering_eps", "must be nonnegative");
  if (const json* v = maybe(j, "max_chain")) pipe.max_chain = as_int(*v, "pipeline.max_chain");
  if (pipe.max_chain < 1) fail("pipeline.max_chain", "must be at least 1");
  return pipe;
}

OutputConfig parse_output(const json& j) {
  OutputConfig out;
  reject_unknown(j, "output",
                 {"raster_resolution", "witness_resolution", "emit_svg"});
  if (const json* v = maybe(j, "raster_resolution"))
    out.raster_resolution = as_int(*v, "output.raster_resolution");
  if (out.raster_resolution < 2 || out.raster_resolution > 2000)
    fail("output.raster_resolution", "must be between 2 and 2000");
  if (const json* v = maybe(j, "witness_resolution"))
    out.witness_resolution = as_int(*v, "output.witness_resolution");
  if (out.witness_resolution < 2 || out.witness_resolution > 2000)
    fail("output.witness_resolution", "must be between 2 and 2000");
  if (const json* v = maybe(j, "emit_svg")) out.emit_svg = as_bool(*v, "output.emit_svg");
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json poly_json(const PolynomialCoordinate& table) {
  json arr = json::array();
  for (const auto& term : table)
    arr.push_back({{"exponents", term.exponents}, {"coefficient", term.coefficient}});
  return arr;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(j, "config", {"system", "constraints", "pipeline", "output"});

  const json* sys = maybe(j, "system");
  const json* con = maybe(j, "constraints");
  if (!sys) throw ValidationError("config: system: missing");
  if (!con) throw ValidationError("config: constraints: missing");

  RunConfig cfg;
  cfg.system = parse_system(*sys);
  cfg.constraints = parse_constraints(*con, cfg.system);
  const json empty = json::object();
  cfg.pipeline = parse_pipeline(maybe(j, "pipeline") ? *maybe(j, "pipeline") : empty,
                                cfg.system);
  cfg.output = parse_output(maybe(j, "output") ? *maybe(j, "output") : empty);
  return cfg;
}

std::string effective_config_json(const RunConfig& cfg) {
  json sys;
  if (cfg.system.kind == SystemConfig::Kind::Polynomial) {
    sys["kind"] = "polynomial";
    json coords = json::array();
    for (const auto& table : cfg.system.coordinates) coords.push_back(poly_json(table));
    sys["coordinates"] = std::move(coords);
    if (cfg.system.factored) {
      json abar = json::array();
      for (const auto& m : cfg.system.factored->Abar) abar.push_back(matrix_json(m));
      sys["factored_form"] = {{"A", matrix_json(cfg.system.factored->A)},
                              {"Abar0", matrix_json(cfg.system.factored->Abar0)},
                              {"Abar", std::move(abar)}};
    }
  } else {
    sys["kind"] = "cascade";
    sys["A_eta"] = matrix_json(cfg.system.A_eta);
    sys["A_z"] = matrix_json(cfg.system.A_z);
    json phi = json::array();
    for (const auto& block : cfg.system.phi_lift) phi.push_back(matrix_json(block));
    sys["phi_lift"] = std::move(phi);
  }
  sys["disturbance_radius"] = cfg.system.disturbance_radius;

  json con;
  if (cfg.system.kind == SystemConfig::Kind::Polynomial) {
    if (cfg.constraints.H.rows() > 0) {
      json rows = json::array();
      for (Eigen::Index i = 0; i < cfg.constraints.H.rows(); ++i)
        rows.push_back({{"normal", vector_json(cfg.constraints.H.row(i).transpose())},
                        {"offset", cfg.constraints.h(i)}});
      con["rows"] = std::move(rows);
    }
    if (cfg.constraints.box_lower)
      con["box"] = {{"lower", vector_json(*cfg.constraints.box_lower)},
                    {"upper", vector_json(*cfg.constraints.box_upper)}};
  } else {
    json rows = json::array();
    for (const auto& row : cfg.constraints.lifted_rows) {
      json r{{"eta", vector_json(row.eta)}, {"offset", row.offset}};
      if (row.z_lift.size() > 0) r["z_lift"] = vector_json(row.z_lift);
      if (!row.z_poly.empty()) r["z_poly"] = poly_json(row.z_poly);
      rows.push_back(std::move(r));
    }
    con["lifted_rows"] = std::move(rows);
  }

  json pipe{{"delta_target", cfg.pipeline.delta_target},
            {"horizon", cfg.pipeline.horizon},
            {"M_max", cfg.pipeline.M_max},
            {"k_max", cfg.pipeline.k_max},
            {"seed", cfg.pipeline.seed},
            {"rho", cfg.pipeline.rho},
            {"covering_eps", cfg.pipeline.covering_eps},
            {"max_chain", cfg.pipeline.max_chain}};
  if (cfg.pipeline.grid_pitch) pipe["grid_pitch"] = *cfg.pipeline.grid_pitch;
  if (cfg.pipeline.random_count) pipe["random_count"] = *cfg.pipeline.random_count;
  if (cfg.pipeline.ridge) pipe["ridge"] = *cfg.pipeline.ridge;

  json out{{"raster_resolution", cfg.output.raster_resolution},
           {"witness_resolution", cfg.output.witness_resolution},
           {"emit_svg", cfg.output.emit_svg}};

  json root{{"system", std::move(sys)},
            {"constraints", std::move(con)},
            {"pipeline", std::move(pipe)},
            {"output", std::move(out)}};
  return root.dump(2) + "\n";
}

NonlinearSystem make_system(const SystemConfig& cfg) {
  if (cfg.kind == SystemConfig::Kind::Polynomial) {
    NonlinearSystem sys = NonlinearSystem::polynomial(cfg.coordinates);
    if (cfg.factored) sys.set_factored_form(*cfg.factored);
    return sys;
  }
  return cascade_dynamics(make_cascade(cfg));
}

CascadeSystem make_cascade(const SystemConfig& cfg) {
  if (cfg.kind != SystemConfig::Kind::Cascade)
    throw ValidationError("config: system is not a cascade");
  CascadeSystem cs{cfg.A_eta, cfg.A_z, cfg.phi_lift};
  validate_cascade(cs);
  return cs;
}

Polytope make_constraints(const RunConfig& cfg) {
  if (cfg.system.kind == SystemConfig::Kind::Polynomial) {
    const int n = static_cast<int>(cfg.system.coordinates.size());
    int rows = static_cast<int>(cfg.constraints.H.rows());
    const int box_rows = cfg.constraints.box_lower ? 2 * n : 0;
    Eigen::MatrixXd H(rows + box_rows, n);
    Eigen::VectorXd h(rows + box_rows);
    H.topRows(rows) = cfg.constraints.H;
    h.head(rows) = cfg.constraints.h;
    if (box_rows > 0) {
      H.middleRows(rows, n) = Eigen::MatrixXd::Identity(n, n);
      h.segment(rows, n) = *cfg.constraints.box_upper;
      H.bottomRows(n) = -Eigen::MatrixXd::Identity(n, n);
      h.tail(n) = -*cfg.constraints.box_lower;
    }
    return Polytope(std::move(H), std::move(h));
  }

  const int n_eta = static_cast<int>(cfg.system.A_eta.rows());
  const int n_z = static_cast<int>(cfg.system.A_z.rows());
  const int degree = static_cast<int>(cfg.system.phi_lift.size());
  const int lift_len = graded_lift_size(n_z, degree);
  const int dim = n_eta + lift_len;
  const int q = static_cast<int>(cfg.constraints.lifted_rows.size());

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q, dim);
  Eigen::VectorXd h(q);
  for (int i = 0; i < q; ++i) {
    const LiftedRowConfig& row = cfg.constraints.lifted_rows[i];
    H.block(i, 0, 1, n_eta) = row.eta.transpose();
    if (row.z_lift.size() > 0)
      H.block(i, n_eta, 1, lift_len) = row.z_lift.transpose();
    else if (!row.z_poly.empty())
      H.block(i, n_eta, 1, lift_len) =
          polynomial_to_lift_row(n_z, degree, row.z_poly).transpose();
    h(i) = row.offset;
  }
  return Polytope(std::move(H), std::move(h));
}

}  // namespace invlift
