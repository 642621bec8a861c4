#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bundled_configs.hpp"
#include "invlift/errors.hpp"
#include "invlift/pipeline.hpp"

namespace {

using namespace invlift;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool svg = false;
};

RunConfig load_config(const std::string& text, const CommonArgs& args) {
  RunConfig cfg = parse_config(text);
  if (args.seed) cfg.pipeline.seed = *args.seed;
  if (args.svg) cfg.output.emit_svg = true;
  return cfg;
}

void print_invariant_summary(const InvariantArtifacts& art) {
  const InvariantResult& r = art.nominal;
  std::cout << "invariant set: " << r.omega.num_rows() << " rows in dimension "
            << r.omega.dim() << ", k* = " << r.k_star
            << (r.finitely_determined ? "" : " (truncated)")
            << (r.omega.marked_empty() ? ", empty" : "") << "\n";
  if (art.disturbed)
    std::cout << "disturbed variant: " << art.disturbed->omega.num_rows()
              << " rows"
              << (art.disturbed->omega.marked_empty() ? ", empty" : "") << "\n";
}

void print_certify_summary(const AssumptionReport& report) {
  auto verdict = [](Verdict v) {
    switch (v) {
      case Verdict::Pass: return "PASS";
      case Verdict::Fail: return "FAIL";
      default: return "NOT CHECKED";
    }
  };
  std::cout << "A1 " << verdict(report.a1) << "  L_f = " << report.lipschitz
            << "\n";
  std::cout << "A2 " << verdict(report.a2) << "  re-entry = " << report.reentry
            << "\n";
  std::cout << "A3 " << verdict(report.a3) << "  rate = " << report.a3_rate
            << "\n";
  std::cout << "A4 " << verdict(report.a4) << "  rate = " << report.a4_rate
            << "\n";
}

int dispatch(const std::string& cmd, const CommonArgs& args,
             const std::string& model_path, const std::string& example_name) {
  if (cmd == "immerse") {
    const RunConfig cfg = load_config(read_file(args.config_path), args);
    const ImmerseArtifacts art = run_immerse(cfg, args.out_dir);
    std::cout << "selected lift order " << art.selected_M << " (mismatch bound "
              << art.curve_delta.back() << " at the last order tried)\n";
    std::cout << "wrote model.txt and delta_curve.csv to " << args.out_dir
              << "\n";
    return 0;
  }
  if (cmd == "invariant") {
    const RunConfig cfg = load_config(read_file(args.config_path), args);
    InvariantArtifacts art;
    if (!model_path.empty()) {
      std::ifstream is(model_path);
      if (!is) throw ValidationError("cannot read " + model_path);
      const LiftedModel model = read_model(is);
      art = run_invariant(cfg, args.out_dir, &model);
    } else {
      art = run_invariant(cfg, args.out_dir);
    }
    print_invariant_summary(art);
    std::cout << "wrote omega.txt and rasters to " << args.out_dir << "\n";
    return 0;
  }
  if (cmd == "certify") {
    const RunConfig cfg = load_config(read_file(args.config_path), args);
    const AssumptionReport report = run_certify(cfg, args.out_dir);
    print_certify_summary(report);
    std::cout << "wrote report.txt to " << args.out_dir << "\n";
    return 0;
  }

  // example: full run from a bundled config.
  const char* text = nullptr;
  if (example_name == "wiener") text = tools::kWienerConfig;
  if (example_name == "building") text = tools::kBuildingConfig;
  if (text == nullptr)
    throw ValidationError("unknown example '" + example_name +
                          "' (available: wiener, building)");
  const RunConfig cfg = load_config(text, args);
  const ImmerseArtifacts immersed = run_immerse(cfg, args.out_dir);
  std::cout << "selected lift order " << immersed.selected_M << "\n";
  const InvariantArtifacts art = run_invariant(cfg, args.out_dir);
  print_invariant_summary(art);
  if (cfg.system.kind == SystemConfig::Kind::Polynomial && cfg.system.factored) {
    const AssumptionReport report = run_certify(cfg, args.out_dir);
    print_certify_summary(report);
  }
  std::cout << "all artifacts written to " << args.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inner approximations of maximal admissible invariant sets via "
               "linear immersions"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string model_path;
  std::string example_name;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", args.config_path, "configuration JSON file")
          ->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the configured RNG seed");
    return cmd;
  };

  add_common(app.add_subcommand("immerse", "fit the lifted linear model"), true);
  CLI::App* inv = add_common(
      app.add_subcommand("invariant", "compute the invariant set and rasters"),
      true);
  inv->add_option("--model", model_path, "reuse a saved model file");
  inv->add_flag("--svg", args.svg, "render preimage.svg from the rasters");
  add_common(app.add_subcommand("certify", "check the regularity assumptions"),
             true);
  CLI::App* ex = add_common(
      app.add_subcommand("example", "run a bundled example end to end"), false);
  ex->add_option("name", example_name, "wiener or building")->required();
  ex->add_flag("--svg", args.svg, "render preimage.svg from the rasters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), args, model_path,
                    example_name);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptySetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnboundedDirectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ExhaustionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
