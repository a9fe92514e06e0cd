#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torusfpras/acquisition.hpp"
#include "torusfpras/extraction.hpp"
#include "torusfpras/moment_sos.hpp"
#include "torusfpras/qsim.hpp"
#include "torusfpras/trig_poly.hpp"

namespace torusfpras {

// Full configuration of one end-to-end run. Identical configs (seed
// included) reproduce every numeric report field bit-for-bit.
struct RunConfig {
  std::string instance_path;
  double epsilon = 0.5;
  double delta = 0.25;
  std::uint64_t seed = 0;
  std::string grid = "tight";        // "tight" | "conservative"
  std::string acquisition = "exact"; // "exact" | "shots"
  int level_lo = 0;                  // 0 = automatic (max surrogate degree)
  int level_hi = 0;                  // 0 = automatic (start + 3)
  long long shot_cap = kDefaultShotCap;
  double rank_tol = 1e-6;
  std::string out_dir;  // empty = no artifact persistence
};

// Everything a run produced. `document` is the full machine-readable report
// (also what gets persisted); the struct fields duplicate the values callers
// need programmatically.
struct RunReport {
  nlohmann::json document;
  double estimate = 0.0;             // best certified lower bound from the sweep
  std::vector<double> theta_hat;     // candidate minimizer (extraction or fallback)
  double surrogate_value = 0.0;      // surrogate at theta_hat
  double true_value = 0.0;           // exact circuit expectation at theta_hat
  bool flat_found = false;           // some swept level passed the flat check
  bool used_fallback = false;        // grid minimization supplied theta_hat
  long long total_queries = 0;       // simulator shot draws (0 in exact mode)
};

// Instance file schema:
//   {"ansatz": {"type": "qaoa-maxcut", "p": 1,
//               "graph": {"n": 3, "edges": [[0,1], [1,2], [0,2]]}}}
//   {"ansatz": {"type": "hea-ion-trap", "n": 2, "depth": 1, "J0": 0.5,
//               "decay_exp": 0.0, "quant_level": 1, "sharing": [0, 1]}}
//   {"ansatz": {"type": "phase-rotation"}}
// plus an optional "observable" override: "identity", "pauli-x",
// "maxcut-negated" (the QAOA default), or {"diagonal": [reals of length 2^n]}.
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& path);

// Canonical serialization and content addressing of report documents: the
// digest is the 16-hex-digit FNV-1a hash of the sorted-key dump with the
// "timings" block removed, so wall-clock noise never changes identities.
nlohmann::json strip_timings(const nlohmann::json& doc);
std::string content_address(const nlohmann::json& doc);

// Writes doc to <dir>/<prefix>-<digest>.json and returns the path.
std::string write_artifact(const std::string& dir, const std::string& prefix,
                           const nlohmann::json& doc);

// The full staged pipeline: grid build -> shot budget -> acquisition ->
// surrogate reconstruction -> relaxation level sweep -> flat check and atom
// extraction (grid-minimization fallback when no swept level is flat).
// Stage failures rethrow with a stage tag after persisting a partial report
// (when an output directory is configured).
RunReport run_fpras(const RunConfig& config);

// Gap-promise decision: run the scheme at epsilon = min(1, (b-a)/3),
// delta = 1/3 and answer YES iff the estimate is at most (a+b)/2. Inputs
// violating the promise (optimum inside (a, b)) still get a verdict, with
// `warning` set when the estimate lands in the open middle third.
struct GapVerdict {
  bool yes = false;
  double estimate = 0.0;
  double midpoint = 0.0;
  bool warning = false;
  RunReport report;
};

GapVerdict gap_decide(const RunConfig& base, double a, double b);

}  // namespace torusfpras
