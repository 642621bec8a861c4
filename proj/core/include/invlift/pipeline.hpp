#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invlift/certification.hpp"
#include "invlift/config.hpp"
#include "invlift/invariance.hpp"

namespace invlift {

/* Driver layer behind the CLI subcommands.  Each run writes its artifacts
 * under `out_dir` with fixed names and echoes the resolved configuration
 * to `effective_config` so the run can be reproduced verbatim. */

struct ImmerseArtifacts {
  LiftedModel model;
  /* Mismatch bound per lift order 0..M_max (NaN where the fit was not
   * possible).  Cascade systems have a single structurally exact entry. */
  std::vector<int> curve_M;
  std::vector<double> curve_delta;
  int selected_M = 0;
};

/* Fits every lift order, writes delta_curve.csv and the selected model to
 * model.txt.  Throws ExhaustionError when no order meets the target. */
ImmerseArtifacts run_immerse(const RunConfig& cfg, const std::string& out_dir);

struct InvariantArtifacts {
  LiftedModel model;
  InvariantResult nominal;
  std::optional<InvariantResult> disturbed;
};

/* Computes the invariant set and writes omega.txt plus the preimage
 * rasters (preimage.csv, and preimage_z.csv / omega_disturbed.txt /
 * preimage_disturbed.csv where applicable).  Without `reuse` the model is
 * built from the config: the fit-and-tighten loop for polynomial systems,
 * the exact immersion for cascades; either way it is saved to model.txt.
 * With `reuse` the given model is used as-is and model.txt is left alone. */
InvariantArtifacts run_invariant(const RunConfig& cfg, const std::string& out_dir,
                                 const LiftedModel* reuse = nullptr);

/* Runs the regularity certification over the constraint set and writes a
 * human-readable report.txt.  Polynomial planar systems only. */
AssumptionReport run_certify(const RunConfig& cfg, const std::string& out_dir);

}  // namespace invlift
