#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "torusfpras/sdp_solver.hpp"
#include "torusfpras/trig_poly.hpp"

namespace torusfpras {

// Index bookkeeping for the max-degree moment relaxation at a given level:
// matrix rows/columns enumerate the nonnegative box {0..level}^M
// lexicographically (side (level+1)^M), entries depend only on the index
// difference gamma in {-level..level}^M (multilevel Toeplitz), and the
// pseudo-moment vector stores one representative per conjugate pair —
// the canonical gamma is 0 or has a positive first nonzero entry — giving
// ((2*level+1)^M + 1) / 2 complex variables.
struct MomentIndexing {
  int M = 0;
  int level = 0;
  int side = 0;
  int diff_count = 0;
  int reduced_count = 0;
  int zero_slot = 0;  // reduced slot of gamma = 0 (the normalization entry)

  std::vector<FrequencyVector> basis;           // row multi-indices, lex order
  std::vector<FrequencyVector> reduced_gammas;  // canonical gamma per slot, lex order
  std::vector<int> full_to_slot;                // full diff index -> reduced slot
  std::vector<unsigned char> full_conjugated;   // whether that slot holds the conjugate

  // Flat index into the full difference box (entries in [-level, level]).
  int diff_index(const FrequencyVector& gamma) const;
};

MomentIndexing make_indexing(int M, int level);

// Lexicographic enumeration of {0..level}^M (the moment-matrix basis box).
std::vector<FrequencyVector> basis_box(int M, int level);

// The relaxation
//   minimize sum_gamma f_gamma y_gamma   s.t.  y_0 = 1,  T(y) >= 0,
// with T(y)[a, b] = y_{b-a}, prepared as the structured form the SDP solver
// consumes: precomputed entry tables, per-slot objective coefficients, and
// the diagonal multiplicities m_gamma = prod_j (level+1-|gamma_j|) of T*T.
struct Relaxation {
  MomentIndexing idx;
  std::vector<std::complex<double>> c;  // objective per reduced slot
  std::vector<double> multiplicity;     // diag(T*T) per reduced slot
  std::vector<int> entry_slot;          // per matrix entry (row-major)
  std::vector<unsigned char> entry_conj;

  void assemble(const std::vector<std::complex<double>>& y, Eigen::MatrixXcd& out) const;
  void adjoint(const Eigen::MatrixXcd& X, std::vector<std::complex<double>>& out) const;
  double objective(const std::vector<std::complex<double>>& y) const;
};

// Requires level >= max_j degree_j so every frequency of f fits the
// difference box; throws otherwise.
Relaxation build_relaxation(const Htp& htp, int level);

// Truncation-error level floor: sqrt(6) * ceil(K * delta_max / 2).
double l0(int M, int K, int delta_max);

// Epsilon-sufficient relaxation level
//   ceil(max{ sqrt(2)*l0,
//             (2*l0/sqrt(eps)) * sqrt(M * 2^M * (1/2 + (2K*delta_max+1)^M * O_max)) }).
// Advisory at desk scale (the constants are enormous); always reported.
long long required_level(double epsilon, int M, int K, int delta_max, double O_max);

struct MomentSolution {
  int M = 0;
  int level = 0;
  double lower_bound = 0.0;  // rigorous dual bound: <= the relaxation optimum
  double objective = 0.0;    // objective at the PSD-rounded feasible y
  std::vector<std::complex<double>> y;  // reduced pseudo-moments, slot order
  Eigen::MatrixXcd matrix;              // assembled moment matrix at y
  std::string status;                   // "converged" | "max_iter"
  long long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double min_eigenvalue = 0.0;
  double equivalent_symmetric_degree = 0.0;  // level / 2 under the Toeplitz quotient
};

struct SolveOptions {
  double tol = 1e-7;
  long long max_iters = 100000;
};

// Solves the relaxation at one level; `warm` (a lower-level solution) embeds
// into the new variable vector, zeros elsewhere.
MomentSolution solve_relaxation(const Htp& htp, int level, const SolveOptions& opts = {},
                                const MomentSolution* warm = nullptr);

struct SweepResult {
  std::vector<MomentSolution> solutions;  // ascending levels
  double best_lower_bound = 0.0;
  int best_level = 0;
  bool early_stopped = false;
};

// Level sweep level_lo .. level_cap (level_lo defaults to max_j degree_j;
// a larger override raises the starting level, never lowers it below the
// admissible floor) with warm starts, stopping early once successive lower
// bounds differ by less than epsilon/10.
SweepResult sweep_levels(const Htp& htp, int level_cap, double epsilon,
                         const SolveOptions& opts = {}, int level_lo_override = 0);

// Moment matrix of a (possibly lower) sub-level assembled from a level-`idx.level`
// reduced moment vector; basis is basis_box(M, sub_level).
Eigen::MatrixXcd moment_matrix(const MomentIndexing& idx,
                               const std::vector<std::complex<double>>& y, int sub_level);

// {"level": l, "lower_bound": f, "status": s, "y": [{"gamma", "re", "im"}...]}
// plus diagnostic fields; y entries are the conjugate-reduced representatives
// in lexicographic gamma order.
nlohmann::json solution_to_json(const MomentSolution& sol);
MomentSolution solution_from_json(const nlohmann::json& j);

}  // namespace torusfpras
