#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torusfpras/fft_nd.hpp"
#include "torusfpras/qsim.hpp"
#include "torusfpras/trig_poly.hpp"

namespace torusfpras {

// Equispaced torus sampling grid. Index t (centered, per axis in [-d_j, d_j])
// maps to the point theta_j = 2*pi*t_j / N_j in (-pi, pi).
struct SamplingGrid {
  std::vector<int> sizes;  // odd N_j
  std::string mode;        // "tight" | "conservative"
};

// Everything the acquisition stage produced: the grid, the a-priori shot
// accounting, and the (exact or shot-noisy) evaluation tensor.
struct AcquisitionReport {
  SamplingGrid grid;
  long long shots_per_point = 0;
  long long total_queries = 0;  // shots_per_point * prod N_j in shots mode, else 0
  EvalTensor evals;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string mode;  // "exact" | "shots"
};

// Default per-point shot-budget cap; exceeding it in shots mode is an error
// that advises falling back to exact mode.
inline constexpr long long kDefaultShotCap = 10'000'000;

// tight: N_j = 2*d_j + 1 per coordinate; conservative: every
// N_j = 2*conservative_bound + 1 (the single over-approximating box).
SamplingGrid build_grid(const DegreeProfile& profile, const std::string& mode);

// Hoeffding budget N = ceil((8*|S|^2*O_max^2 / epsilon^2) * ln(2*|S|/delta)):
// per-point accuracy epsilon/(2|S|) with per-point failure probability
// delta/|S|, which union-bounds to (epsilon/2, delta) uniformly on the grid.
// A zero observable needs no shots.
long long shot_budget(double epsilon, double delta, long long grid_size, double o_max);

// Evaluates the instance on every grid point: exact expectations in "exact"
// mode, sample means of `shot_budget` draws in "shots" mode with the
// per-point stream derived from (master_seed, flattened point index) so that
// results are independent of evaluation order. total_queries is fixed before
// the first simulator call.
AcquisitionReport acquire(const Instance& instance, const SamplingGrid& grid,
                          const std::string& mode, double epsilon, double delta,
                          std::uint64_t master_seed, long long shot_cap = kDefaultShotCap);

// Surrogate reconstruction: inverse FFT of the evaluation tensor, Hermitian
// symmetrization, near-zero pruning; degree bounds are inferred from the
// surviving support (never larger than the grid's d_j).
Htp reconstruct(const AcquisitionReport& report);

// Grid point of a centered multi-index.
std::vector<double> grid_theta(const SamplingGrid& grid, const std::vector<int>& index);

nlohmann::json report_to_json(const AcquisitionReport& report);
AcquisitionReport report_from_json(const nlohmann::json& j);

}  // namespace torusfpras
