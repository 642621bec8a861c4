#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>

#include "invlift/config.hpp"
#include "invlift/errors.hpp"
#include "invlift/lifting.hpp"
#include "invlift/matrix_io.hpp"

using namespace invlift;

namespace {

/* Minimal valid polynomial run: x+ = (0.5 x1 + 0.1 x2^2, 0.4 x2) on the
 * unit box, gridded sampling. */
const char* kPolyConfig = R"({
  "system": {
    "kind": "polynomial",
    "coordinates": [
      [{"exponents": [1, 0], "coefficient": 0.5},
       {"exponents": [0, 2], "coefficient": 0.1}],
      [{"exponents": [0, 1], "coefficient": 0.4}]
    ]
  },
  "constraints": {"box": {"lower": [-1, -1], "upper": [1, 1]}},
  "pipeline": {"grid_pitch": 0.25}
})";

/* Scalar cascade eta+ = 0.5 eta + z^2, z+ = 0.8 z with one lifted row. */
const char* kCascadeConfig = R"({
  "system": {
    "kind": "cascade",
    "A_eta": [[0.5]],
    "A_z": [[0.8]],
    "phi_lift": [[[0.0]], [[1.0]]]
  },
  "constraints": {
    "lifted_rows": [
      {"eta": [1.0], "z_lift": [0.0, 0.0], "offset": 1.0},
      {"eta": [-1.0], "z_lift": [0.0, 0.0], "offset": 1.0},
      {"eta": [0.0], "z_poly": [{"exponents": [1], "coefficient": 1.0}], "offset": 0.9}
    ]
  }
})";

void expect_rejected(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL_CHECK("config accepted; expected rejection mentioning '" << fragment << "'");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find(fragment) != std::string::npos,
                  "message '" << what << "' does not mention '" << fragment << "'");
  }
}

}  // namespace

TEST_CASE("a parsed config echoes back to a fixed point") {
  const RunConfig cfg = parse_config(kPolyConfig);
  const std::string e1 = effective_config_json(cfg);
  const RunConfig cfg2 = parse_config(e1);
  const std::string e2 = effective_config_json(cfg2);
  CHECK(e1 == e2);  // byte-identical, so the echo reproduces the run

  CHECK(cfg.pipeline.delta_target == 0.01);
  CHECK(cfg.pipeline.horizon == 14);
  CHECK(cfg.pipeline.M_max == 8);
  CHECK(cfg.pipeline.seed == 1);
  REQUIRE(cfg.pipeline.grid_pitch.has_value());
  CHECK(*cfg.pipeline.grid_pitch == 0.25);
  CHECK_FALSE(cfg.pipeline.random_count.has_value());
  CHECK(cfg.output.raster_resolution == 200);
}

TEST_CASE("awkward double values survive the config echo") {
  RunConfig cfg = parse_config(kPolyConfig);
  cfg.system.coordinates[0][0].coefficient = 0.1 + 0.2;  // not a short decimal
  cfg.system.coordinates[0][1].coefficient = 1.0 / 3.0;
  cfg.pipeline.delta_target = 1e-17;
  cfg.pipeline.rho = 4.0 * std::atan(1.0);
  const RunConfig back = parse_config(effective_config_json(cfg));
  CHECK(back.system.coordinates[0][0].coefficient == 0.1 + 0.2);
  CHECK(back.system.coordinates[0][1].coefficient == 1.0 / 3.0);
  CHECK(back.pipeline.delta_target == 1e-17);
  CHECK(back.pipeline.rho == 4.0 * std::atan(1.0));
}

TEST_CASE("the declared polynomial and constraint box come out intact") {
  const RunConfig cfg = parse_config(kPolyConfig);
  const NonlinearSystem sys = make_system(cfg.system);
  Eigen::VectorXd x(2);
  x << 0.6, -0.8;
  Eigen::VectorXd fx = sys.eval(x);
  CHECK(fx(0) == doctest::Approx(0.5 * 0.6 + 0.1 * 0.64).epsilon(1e-15));
  CHECK(fx(1) == doctest::Approx(0.4 * -0.8).epsilon(1e-15));

  const Polytope X = make_constraints(cfg);
  CHECK(X.dim() == 2);
  CHECK(X.num_rows() == 4);
  CHECK(contains(X, Eigen::Vector2d(0.99, -0.99)));
  CHECK_FALSE(contains(X, Eigen::Vector2d(1.01, 0.0)));
}

TEST_CASE("explicit rows stack ahead of the box rows") {
  std::string text = kPolyConfig;
  text.replace(text.find("\"constraints\": {"), 16,
               "\"constraints\": {\"rows\": [{\"normal\": [1, 1], \"offset\": 1.5}], ");
  const RunConfig cfg = parse_config(text);
  const Polytope X = make_constraints(cfg);
  CHECK(X.num_rows() == 5);
  // Construction renormalizes every row to a unit normal.
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(X.normals().row(0).isApprox(Eigen::RowVector2d(s, s)));
  CHECK(X.offsets()(0) == doctest::Approx(1.5 * s).epsilon(1e-15));
  // Then the identity for the upper bounds and its negation for the lower.
  CHECK(X.normals().middleRows(1, 2).isApprox(Eigen::Matrix2d::Identity()));
  CHECK(X.normals().bottomRows(2).isApprox(-Eigen::Matrix2d::Identity()));
}

TEST_CASE("cascade configs produce validated blocks and lifted constraints") {
  const RunConfig cfg = parse_config(kCascadeConfig);
  const CascadeSystem cs = make_cascade(cfg.system);
  CHECK(cs.A_eta(0, 0) == 0.5);
  CHECK(cs.F.size() == 2);

  // Lifted coordinates are (eta, z, z^2), so the constraint space is 3-D.
  const Polytope X = make_constraints(cfg);
  CHECK(X.dim() == 1 + graded_lift_size(1, 2));
  CHECK(X.num_rows() == 3);
  // The z_poly row z <= 0.9 lands on the degree-1 lift coordinate.
  CHECK(X.normals()(2, 0) == 0.0);
  CHECK(X.normals()(2, 1) == doctest::Approx(1.0));
  CHECK(X.normals()(2, 2) == 0.0);
  CHECK(X.offsets()(2) == doctest::Approx(0.9));

  // Cascade pipelines have no sampling requirement, so defaults suffice.
  CHECK(cfg.pipeline.k_max == 200);
  CHECK_FALSE(cfg.pipeline.grid_pitch.has_value());

  const RunConfig poly = parse_config(kPolyConfig);
  CHECK_THROWS_AS(make_cascade(poly.system), ValidationError);
}

TEST_CASE("cascade configs echo back to a fixed point too") {
  const std::string e1 = effective_config_json(parse_config(kCascadeConfig));
  const std::string e2 = effective_config_json(parse_config(e1));
  CHECK(e1 == e2);
}

TEST_CASE("malformed documents are rejected with the offending field named") {
  expect_rejected("{", "not valid JSON");
  expect_rejected("[1, 2]", "top level");
  expect_rejected(R"({"system": {}, "constraints": {}, "extra": 1})", "config.extra");
  expect_rejected(R"({"constraints": {}})", "system: missing");
  expect_rejected(R"({"system": {"kind": "polynomial", "coordinates": [[]]}})",
                  "constraints: missing");
}

TEST_CASE("system blocks are cross-checked against the declared kind") {
  expect_rejected(R"({"system": {"kind": "affine"}, "constraints": {}})", "system.kind");

  std::string text = kPolyConfig;
  text.replace(text.find("\"kind\": \"polynomial\","), 21,
               "\"kind\": \"polynomial\", \"A_z\": [[1]],");
  expect_rejected(text, "cascade blocks are invalid");

  text = kCascadeConfig;
  text.replace(text.find("\"kind\": \"cascade\","), 18,
               "\"kind\": \"cascade\", \"coordinates\": [],");
  expect_rejected(text, "polynomial blocks are invalid");

  expect_rejected(R"({
    "system": {"kind": "cascade", "A_eta": [[1], [2]], "A_z": [[1]], "phi_lift": [[[1]]]},
    "constraints": {"lifted_rows": [{"eta": [1], "offset": 1}]}
  })", "A_eta");
}

TEST_CASE("term tables are validated entry by entry") {
  std::string text = kPolyConfig;
  text.replace(text.find("[1, 0]"), 6, "[1]");
  expect_rejected(text, "exponents");

  text = kPolyConfig;
  text.replace(text.find("[1, 0]"), 6, "[-1, 0]");
  expect_rejected(text, "negative exponent");

  text = kPolyConfig;
  text.replace(text.find("\"coefficient\": 0.5}"), 19,
               "\"coefficient\": 0.5, \"label\": 3}");
  expect_rejected(text, "label");
}

TEST_CASE("factored form shapes must match the state dimension") {
  std::string text = kPolyConfig;
  const std::string anchor = "]\n    ]\n  },";
  const std::string with_factored =
      "]\n    ],\n    \"factored_form\": {\"A\": [[0.5]], "
      "\"Abar\": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]}\n  },";
  text.replace(text.find(anchor), anchor.size(), with_factored);
  expect_rejected(text, "factored_form.A");
}

TEST_CASE("constraint blocks are matched to the system kind") {
  std::string text = kPolyConfig;
  text.replace(text.find("\"box\""), 5, "\"lifted_rows\"");
  expect_rejected(text, "lifted_rows");

  expect_rejected(R"({
    "system": {"kind": "polynomial",
               "coordinates": [[{"exponents": [1], "coefficient": 0.5}]]},
    "constraints": {"box": {"lower": [1], "upper": [-1]}},
    "pipeline": {"grid_pitch": 0.5}
  })", "upper bound below lower");

  expect_rejected(R"({
    "system": {"kind": "polynomial",
               "coordinates": [[{"exponents": [1], "coefficient": 0.5}]]},
    "constraints": {},
    "pipeline": {"grid_pitch": 0.5}
  })", "rows and/or box");

  std::string cas = kCascadeConfig;
  cas.replace(cas.find("\"lifted_rows\""), 13, "\"box\"");
  expect_rejected(cas, "cascade systems take lifted_rows");

  cas = kCascadeConfig;
  cas.replace(cas.find("[0.0, 0.0]"), 10, "[0.0, 0.0, 0.0]");
  expect_rejected(cas, "z_lift");

  cas = kCascadeConfig;
  cas.replace(cas.find("\"z_poly\""), 8, "\"z_lift\": [0.0, 0.0], \"z_poly\"");
  expect_rejected(cas, "mutually exclusive");
}

TEST_CASE("pipeline cross-field constraints are enforced") {
  std::string text = kPolyConfig;
  text.replace(text.find("{\"grid_pitch\": 0.25}"), 20,
               "{\"grid_pitch\": 0.25, \"horizon\": 5, \"M_max\": 5}");
  expect_rejected(text, "at least M_max + 1");

  text = kPolyConfig;
  text.replace(text.find("{\"grid_pitch\": 0.25}"), 20,
               "{\"grid_pitch\": 0.25, \"random_count\": 100}");
  expect_rejected(text, "mutually exclusive");

  text = kPolyConfig;
  text.replace(text.find("{\"grid_pitch\": 0.25}"), 20, "{}");
  expect_rejected(text, "grid_pitch or random_count");

  text = kPolyConfig;
  text.replace(text.find("{\"grid_pitch\": 0.25}"), 20, "{\"grid_pitch\": 0}");
  expect_rejected(text, "must be positive");

  text = kPolyConfig;
  text.replace(text.find("{\"grid_pitch\": 0.25}"), 20,
               "{\"grid_pitch\": 0.25, \"stride\": 2}");
  expect_rejected(text, "pipeline.stride");

  text = kPolyConfig;
  text.replace(text.find("{\"grid_pitch\": 0.25}"), 20,
               "{\"grid_pitch\": 0.25, \"seed\": 1.5}");
  expect_rejected(text, "seed");
}

TEST_CASE("output limits are enforced") {
  std::string text = kPolyConfig;
  const std::string anchor = "\"pipeline\": {\"grid_pitch\": 0.25}";
  text.replace(text.find(anchor), anchor.size(),
               anchor + ", \"output\": {\"raster_resolution\": 1}");
  expect_rejected(text, "raster_resolution");
}

TEST_CASE("matrix text round-trips doubles exactly") {
  Eigen::MatrixXd m(3, 2);
  m << 0.1, 1.0 / 3.0, 1e-300, 1e300, 4.0 * std::atan(1.0), -123456.789012345678;
  const std::string text = matrix_to_string(m);
  CHECK(text.substr(0, text.find('\n')) == "3 2");
  const Eigen::MatrixXd back = matrix_from_string(text);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(back(i, j) == m(i, j));

  CHECK_THROWS_AS(matrix_from_string("not a matrix"), ValidationError);
  CHECK_THROWS_AS(matrix_from_string("2 2\n1 2 3"), ValidationError);
}

TEST_CASE("point sets round-trip through the CSV form") {
  Eigen::MatrixXd pts(2, 3);
  pts << 0.5, -1.25, 1.0 / 3.0, 2e-7, 0.0, -0.875;
  std::ostringstream os;
  write_points_csv(os, pts);
  const std::string text = os.str();
  CHECK(text.substr(0, text.find('\n')) == "x1,x2,x3");

  std::istringstream is(text);
  const Eigen::MatrixXd back = read_points_csv(is);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(back(i, j) == pts(i, j));

  std::istringstream ragged("x1,x2\n1,2\n3\n");
  CHECK_THROWS_AS(read_points_csv(ragged), ValidationError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_points_csv(empty), ValidationError);
}
