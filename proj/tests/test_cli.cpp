#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "invlift/config.hpp"

namespace fs = std::filesystem;
using namespace invlift;

namespace {

/* The driver binary location is baked in at configure time. */
const char* kCli = INVLIFT_CLI_PATH;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

CliRun run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.log";
  const fs::path err = dir / "stderr.log";
  const std::string cmd = std::string("\"") + kCli + "\" " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "invlift_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

/* Quadratic map whose order-0 fit cannot reach an absurdly small target:
 * the run must exhaust and report the bounds it saw. */
const char* kExhaustingConfig = R"({
  "system": {
    "kind": "polynomial",
    "coordinates": [
      [{"exponents": [1, 0], "coefficient": 0.5},
       {"exponents": [2, 0], "coefficient": 0.3}],
      [{"exponents": [0, 1], "coefficient": 0.4}]
    ]
  },
  "constraints": {"box": {"lower": [-1, -1], "upper": [1, 1]}},
  "pipeline": {"grid_pitch": 0.2, "M_max": 0, "horizon": 3, "delta_target": 1e-12}
})";

}  // namespace

TEST_CASE("the building example writes the full artifact set") {
  const fs::path dir = fresh_dir("building");
  const CliRun r = run_cli("example building --out " + dir.string() + " --svg", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("selected lift order 5") != std::string::npos);

  for (const char* name :
       {"effective_config", "model.txt", "delta_curve.csv", "omega.txt",
        "omega_disturbed.txt", "preimage.csv", "preimage_disturbed.csv",
        "report.txt", "preimage.svg"})
    CHECK_MESSAGE(fs::exists(dir / name), "missing artifact: " << name);

  // The echoed configuration must itself parse back to the same echo.
  const std::string echoed = slurp(dir / "effective_config");
  CHECK(effective_config_json(parse_config(echoed)) == echoed);

  const std::string raster = slurp(dir / "preimage.csv");
  CHECK(raster.substr(0, raster.find('\n')) == "x1,x2,inside");
  const std::string curve = slurp(dir / "delta_curve.csv");
  CHECK(curve.substr(0, curve.find('\n')) == "M,delta_hat");
  CHECK(slurp(dir / "preimage.svg").find("<svg") != std::string::npos);
  CHECK(slurp(dir / "report.txt").find("A1") != std::string::npos);
}

TEST_CASE("the cascade example writes lifted artifacts without a report") {
  const fs::path dir = fresh_dir("wiener");
  const CliRun r = run_cli("example wiener --out " + dir.string(), dir);
  CHECK(r.code == 0);
  for (const char* name : {"effective_config", "model.txt", "delta_curve.csv",
                           "omega.txt", "preimage.csv", "preimage_z.csv"})
    CHECK_MESSAGE(fs::exists(dir / name), "missing artifact: " << name);
  // Certification is planar-polynomial only, so no report is produced.
  CHECK_FALSE(fs::exists(dir / "report.txt"));
  CHECK_FALSE(fs::exists(dir / "preimage.svg"));  // svg not requested
}

TEST_CASE("a saved model can be reused without being rewritten") {
  const fs::path dir1 = fresh_dir("reuse_fit");
  write_file(dir1 / "config.json", kExhaustingConfig);
  // Raise the target so the fit succeeds, then reuse its model.
  std::string ok = kExhaustingConfig;
  ok.replace(ok.find("1e-12"), 5, "0.5");
  write_file(dir1 / "config.json", ok);

  const CliRun fit = run_cli(
      "immerse --config " + (dir1 / "config.json").string() + " --out " + dir1.string(),
      dir1);
  REQUIRE(fit.code == 0);
  REQUIRE(fs::exists(dir1 / "model.txt"));

  const fs::path dir2 = fresh_dir("reuse_apply");
  const CliRun inv = run_cli("invariant --config " + (dir1 / "config.json").string() +
                                 " --out " + dir2.string() + " --model " +
                                 (dir1 / "model.txt").string(),
                             dir2);
  CHECK(inv.code == 0);
  CHECK(fs::exists(dir2 / "omega.txt"));
  CHECK(fs::exists(dir2 / "preimage.csv"));
  // Reuse must not overwrite the model slot in the new output directory.
  CHECK_FALSE(fs::exists(dir2 / "model.txt"));
}

TEST_CASE("a seed override lands in the effective configuration") {
  const fs::path dir = fresh_dir("seed_override");
  std::string ok = kExhaustingConfig;
  ok.replace(ok.find("1e-12"), 5, "0.5");
  write_file(dir / "config.json", ok);
  const CliRun r = run_cli("immerse --config " + (dir / "config.json").string() +
                               " --out " + dir.string() + " --seed 42",
                           dir);
  CHECK(r.code == 0);
  CHECK(slurp(dir / "effective_config").find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("validation problems exit with code 2") {
  const fs::path dir = fresh_dir("validation");

  const CliRun missing =
      run_cli("invariant --config " + (dir / "nope.json").string(), dir);
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot read") != std::string::npos);

  write_file(dir / "bad.json", R"({"system": {"kind": "affine"}, "constraints": {}})");
  const CliRun bad =
      run_cli("invariant --config " + (dir / "bad.json").string(), dir);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("system.kind") != std::string::npos);

  const CliRun unknown = run_cli("example nosuch --out " + dir.string(), dir);
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("unknown example") != std::string::npos);

  const CliRun no_sub = run_cli("", dir);
  CHECK(no_sub.code == 2);
}

TEST_CASE("an unreachable mismatch target exits with code 3") {
  const fs::path dir = fresh_dir("exhaustion");
  write_file(dir / "config.json", kExhaustingConfig);
  const CliRun r = run_cli("invariant --config " + (dir / "config.json").string() +
                               " --out " + dir.string(),
                           dir);
  CHECK(r.code == 3);
  CHECK(r.err.find("no nonempty invariant set up to M = 0") != std::string::npos);
  CHECK(r.err.find("target") != std::string::npos);
}
