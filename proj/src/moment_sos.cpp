#include "torusfpras/moment_sos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

using cd = std::complex<double>;

bool is_canonical(const FrequencyVector& gamma) {
  for (int g : gamma) {
    if (g > 0) return true;
    if (g < 0) return false;
  }
  return true;  // gamma = 0
}

long long checked_pow(long long base, int exp, const char* who) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) {
    if (out > (1LL << 40) / base)
      throw resource_limit_error(std::string(who) + ": index box too large");
    out *= base;
  }
  return out;
}

}  // namespace

std::vector<FrequencyVector> basis_box(int M, int level) {
  const long long count = checked_pow(level + 1, M, "basis_box");
  std::vector<FrequencyVector> out;
  out.reserve(count);
  FrequencyVector cur(M, 0);
  for (long long i = 0; i < count; ++i) {
    out.push_back(cur);
    for (int j = M - 1; j >= 0; --j) {
      if (++cur[j] <= level) break;
      cur[j] = 0;
    }
  }
  return out;
}

int MomentIndexing::diff_index(const FrequencyVector& gamma) const {
  int off = 0;
  for (int j = 0; j < M; ++j) {
    if (gamma[j] < -level || gamma[j] > level)
      throw validation_error("diff_index: frequency outside the difference box");
    off = off * (2 * level + 1) + (gamma[j] + level);
  }
  return off;
}

MomentIndexing make_indexing(int M, int level) {
  if (M < 1) throw validation_error("make_indexing: M must be >= 1");
  if (level < 0) throw validation_error("make_indexing: negative level");
  MomentIndexing idx;
  idx.M = M;
  idx.level = level;
  idx.side = static_cast<int>(checked_pow(level + 1, M, "make_indexing"));
  idx.diff_count = static_cast<int>(checked_pow(2 * level + 1, M, "make_indexing"));
  idx.reduced_count = (idx.diff_count + 1) / 2;
  idx.basis = basis_box(M, level);

  idx.full_to_slot.assign(idx.diff_count, -1);
  idx.full_conjugated.assign(idx.diff_count, 0);
  FrequencyVector gamma(M, -level);
  for (int i = 0; i < idx.diff_count; ++i) {
    if (is_canonical(gamma)) {
      const int slot = static_cast<int>(idx.reduced_gammas.size());
      idx.reduced_gammas.push_back(gamma);
      idx.full_to_slot[i] = slot;
      FrequencyVector neg(M);
      bool is_zero = true;
      for (int j = 0; j < M; ++j) {
        neg[j] = -gamma[j];
        is_zero = is_zero && gamma[j] == 0;
      }
      if (is_zero) {
        idx.zero_slot = slot;
      } else {
        const int neg_idx = idx.diff_index(neg);
        idx.full_to_slot[neg_idx] = slot;
        idx.full_conjugated[neg_idx] = 1;
      }
    }
    for (int j = M - 1; j >= 0; --j) {
      if (++gamma[j] <= level) break;
      gamma[j] = -level;
    }
  }
  if (static_cast<int>(idx.reduced_gammas.size()) != idx.reduced_count)
    throw numerical_error("make_indexing: conjugate-pair count mismatch");
  return idx;
}

void Relaxation::assemble(const std::vector<cd>& y, Eigen::MatrixXcd& out) const {
  out.resize(idx.side, idx.side);
  const cd* yp = y.data();
  for (int a = 0; a < idx.side; ++a) {
    for (int b = 0; b < idx.side; ++b) {
      const int e = a * idx.side + b;
      const cd v = yp[entry_slot[e]];
      out(a, b) = entry_conj[e] ? std::conj(v) : v;
    }
  }
}

void Relaxation::adjoint(const Eigen::MatrixXcd& X, std::vector<cd>& out) const {
  out.assign(idx.reduced_count, cd(0.0, 0.0));
  for (int a = 0; a < idx.side; ++a) {
    for (int b = 0; b < idx.side; ++b) {
      const int e = a * idx.side + b;
      if (!entry_conj[e]) out[entry_slot[e]] += X(a, b);
    }
  }
}

double Relaxation::objective(const std::vector<cd>& y) const {
  double obj = c[idx.zero_slot].real() * y[idx.zero_slot].real();
  for (int s = 0; s < idx.reduced_count; ++s)
    if (s != idx.zero_slot) obj += 2.0 * (c[s] * y[s]).real();
  return obj;
}

Relaxation build_relaxation(const Htp& htp, int level) {
  for (int d : htp.degrees) {
    if (level < d)
      throw validation_error("build_relaxation: level below the polynomial degree");
  }
  Relaxation relax;
  relax.idx = make_indexing(htp.M, level);
  const MomentIndexing& idx = relax.idx;

  relax.c.assign(idx.reduced_count, cd(0.0, 0.0));
  for (const auto& [alpha, f] : htp.coeffs) {
    const int full = idx.diff_index(alpha);
    if (!idx.full_conjugated[full]) relax.c[idx.full_to_slot[full]] = f;
  }
  relax.c[idx.zero_slot] = cd(relax.c[idx.zero_slot].real(), 0.0);

  relax.multiplicity.resize(idx.reduced_count);
  for (int s = 0; s < idx.reduced_count; ++s) {
    double m = 1.0;
    for (int g : idx.reduced_gammas[s]) m *= level + 1 - std::abs(g);
    relax.multiplicity[s] = m;
  }

  relax.entry_slot.resize(static_cast<std::size_t>(idx.side) * idx.side);
  relax.entry_conj.resize(relax.entry_slot.size());
  FrequencyVector gamma(htp.M);
  for (int a = 0; a < idx.side; ++a) {
    for (int b = 0; b < idx.side; ++b) {
      for (int j = 0; j < htp.M; ++j) gamma[j] = idx.basis[b][j] - idx.basis[a][j];
      const int full = idx.diff_index(gamma);
      const std::size_t e = static_cast<std::size_t>(a) * idx.side + b;
      relax.entry_slot[e] = idx.full_to_slot[full];
      relax.entry_conj[e] = idx.full_conjugated[full];
    }
  }
  return relax;
}

double l0(int M, int K, int delta_max) {
  if (M < 1 || K < 1 || delta_max < 1)
    throw validation_error("l0: inputs must be positive");
  return std::sqrt(6.0) * std::ceil(0.5 * K * delta_max);
}

long long required_level(double epsilon, int M, int K, int delta_max, double O_max) {
  if (epsilon <= 0.0) throw validation_error("required_level: epsilon must be positive");
  if (O_max < 0.0) throw validation_error("required_level: negative norm bound");
  const double ell0 = l0(M, K, delta_max);
  const double box = std::pow(2.0 * K * delta_max + 1.0, M);
  const double payload = M * std::pow(2.0, M) * (0.5 + box * O_max);
  const double branch = (2.0 * ell0 / std::sqrt(epsilon)) * std::sqrt(payload);
  const double value = std::ceil(std::max(std::numbers::sqrt2 * ell0, branch));
  if (!(value < 9.0e18))
    throw resource_limit_error("required_level: formula value exceeds integer range");
  return static_cast<long long>(value);
}

MomentSolution solve_relaxation(const Htp& htp, int level, const SolveOptions& opts,
                                const MomentSolution* warm) {
  const Relaxation relax = build_relaxation(htp, level);
  const MomentIndexing& idx = relax.idx;

  StructuredSDP problem;
  problem.side = idx.side;
  problem.n_reduced = idx.reduced_count;
  problem.c = relax.c;
  problem.multiplicity = relax.multiplicity;
  problem.normalization_index = idx.zero_slot;
  problem.assemble = [&relax](const std::vector<cd>& y, Eigen::MatrixXcd& out) {
    relax.assemble(y, out);
  };
  problem.adjoint = [&relax](const Eigen::MatrixXcd& X, std::vector<cd>& out) {
    relax.adjoint(X, out);
  };
  problem.tol = opts.tol;
  problem.max_iters = opts.max_iters;

  if (warm != nullptr) {
    if (warm->level > level)
      throw validation_error("solve_relaxation: warm start from a higher level");
    const MomentIndexing warm_idx = make_indexing(htp.M, warm->level);
    std::vector<cd> embedded(idx.reduced_count, cd(0.0, 0.0));
    for (int s = 0; s < warm_idx.reduced_count; ++s) {
      const int full = idx.diff_index(warm_idx.reduced_gammas[s]);
      embedded[idx.full_to_slot[full]] = warm->y[s];
    }
    problem.warm_y = std::move(embedded);
  }

  const SDPResult res = solve(problem);
  MomentSolution sol;
  sol.M = htp.M;
  sol.level = level;
  sol.lower_bound = res.dual_bound;
  sol.objective = res.objective;
  sol.y = res.y;
  sol.matrix = res.matrix;
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.primal_residual = res.primal_residual;
  sol.dual_residual = res.dual_residual;
  sol.min_eigenvalue = res.min_eigenvalue;
  sol.equivalent_symmetric_degree = 0.5 * level;
  return sol;
}

SweepResult sweep_levels(const Htp& htp, int level_cap, double epsilon,
                         const SolveOptions& opts, int level_lo_override) {
  if (epsilon <= 0.0) throw validation_error("sweep_levels: epsilon must be positive");
  const int degree_lo = htp.degrees.empty()
                            ? 0
                            : *std::max_element(htp.degrees.begin(), htp.degrees.end());
  const int level_lo = std::max(degree_lo, level_lo_override);
  const int cap = std::max(level_cap, level_lo);

  SweepResult sweep;
  const MomentSolution* warm = nullptr;
  for (int level = level_lo; level <= cap; ++level) {
    sweep.solutions.push_back(solve_relaxation(htp, level, opts, warm));
    warm = &sweep.solutions.back();
    const std::size_t k = sweep.solutions.size();
    if (k >= 2 && std::abs(sweep.solutions[k - 1].lower_bound -
                           sweep.solutions[k - 2].lower_bound) < epsilon / 10.0) {
      sweep.early_stopped = true;
      break;
    }
  }
  sweep.best_lower_bound = sweep.solutions.front().lower_bound;
  sweep.best_level = sweep.solutions.front().level;
  for (const MomentSolution& sol : sweep.solutions) {
    if (sol.lower_bound > sweep.best_lower_bound) {
      sweep.best_lower_bound = sol.lower_bound;
      sweep.best_level = sol.level;
    }
  }
  return sweep;
}

Eigen::MatrixXcd moment_matrix(const MomentIndexing& idx, const std::vector<cd>& y,
                               int sub_level) {
  if (sub_level < 0 || sub_level > idx.level)
    throw validation_error("moment_matrix: sub-level outside [0, level]");
  const std::vector<FrequencyVector> sub_basis = basis_box(idx.M, sub_level);
  const int side = static_cast<int>(sub_basis.size());
  Eigen::MatrixXcd out(side, side);
  FrequencyVector gamma(idx.M);
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      for (int j = 0; j < idx.M; ++j) gamma[j] = sub_basis[b][j] - sub_basis[a][j];
      const int full = idx.diff_index(gamma);
      const cd v = y[idx.full_to_slot[full]];
      out(a, b) = idx.full_conjugated[full] ? std::conj(v) : v;
    }
  }
  return out;
}

nlohmann::json solution_to_json(const MomentSolution& sol) {
  const MomentIndexing idx = make_indexing(sol.M, sol.level);
  if (sol.y.size() != static_cast<std::size_t>(idx.reduced_count))
    throw validation_error("solution_to_json: moment vector length mismatch");
  nlohmann::json yj = nlohmann::json::array();
  for (int s = 0; s < idx.reduced_count; ++s) {  // slots are in lex gamma order
    yj.push_back({{"gamma", idx.reduced_gammas[s]},
                  {"re", sol.y[s].real()},
                  {"im", sol.y[s].imag()}});
  }
  return {{"M", sol.M},
          {"level", sol.level},
          {"lower_bound", sol.lower_bound},
          {"objective", sol.objective},
          {"status", sol.status},
          {"iterations", sol.iterations},
          {"equivalent_symmetric_degree", sol.equivalent_symmetric_degree},
          {"min_eigenvalue", sol.min_eigenvalue},
          {"y", std::move(yj)}};
}

MomentSolution solution_from_json(const nlohmann::json& j) {
  MomentSolution sol;
  sol.M = j.at("M").get<int>();
  sol.level = j.at("level").get<int>();
  sol.lower_bound = j.at("lower_bound").get<double>();
  sol.status = j.at("status").get<std::string>();
  sol.objective = j.value("objective", 0.0);
  sol.iterations = j.value("iterations", 0LL);
  sol.equivalent_symmetric_degree = j.value("equivalent_symmetric_degree", 0.5 * sol.level);
  sol.min_eigenvalue = j.value("min_eigenvalue", 0.0);

  const MomentIndexing idx = make_indexing(sol.M, sol.level);
  sol.y.assign(idx.reduced_count, std::complex<double>(0.0, 0.0));
  std::vector<bool> seen(idx.reduced_count, false);
  for (const auto& entry : j.at("y")) {
    const FrequencyVector gamma = entry.at("gamma").get<FrequencyVector>();
    const int full = idx.diff_index(gamma);
    if (idx.full_conjugated[full])
      throw validation_error("solution_from_json: non-canonical gamma in file");
    const int slot = idx.full_to_slot[full];
    sol.y[slot] = {entry.at("re").get<double>(), entry.at("im").get<double>()};
    seen[slot] = true;
  }
  for (int s = 0; s < idx.reduced_count; ++s) {
    if (!seen[s]) throw validation_error("solution_from_json: missing moment entry");
  }
  sol.matrix = moment_matrix(idx, sol.y, sol.level);
  return sol;
}

}  // namespace torusfpras
