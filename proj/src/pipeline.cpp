#include "torusfpras/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

using cd = std::complex<double>;
using steady = std::chrono::steady_clock;

double elapsed_ms(steady::time_point t0) {
  return std::chrono::duration<double, std::milli>(steady::now() - t0).count();
}

nlohmann::json config_to_json(const RunConfig& c) {
  return {{"instance_path", c.instance_path},
          {"epsilon", c.epsilon},
          {"delta", c.delta},
          {"seed", c.seed},
          {"grid", c.grid},
          {"acquisition", c.acquisition},
          {"level_lo", c.level_lo},
          {"level_hi", c.level_hi},
          {"shot_cap", c.shot_cap},
          {"rank_tol", c.rank_tol},
          {"out_dir", c.out_dir}};
}

void validate_config(const RunConfig& c) {
  if (c.instance_path.empty()) {
    throw validation_error("run config: instance path is required");
  }
  if (!(c.epsilon > 0.0) || c.epsilon > 1.0) {
    throw validation_error("run config: epsilon must lie in (0, 1]");
  }
  if (!(c.delta > 0.0) || c.delta > 1.0) {
    throw validation_error("run config: delta must lie in (0, 1]");
  }
  if (c.grid != "tight" && c.grid != "conservative") {
    throw validation_error("run config: grid must be \"tight\" or \"conservative\"");
  }
  if (c.acquisition != "exact" && c.acquisition != "shots") {
    throw validation_error("run config: acquisition must be \"exact\" or \"shots\"");
  }
  if (c.level_lo < 0 || c.level_hi < 0) {
    throw validation_error("run config: level bounds must be nonnegative");
  }
  if (c.level_hi > 0 && c.level_lo > c.level_hi) {
    throw validation_error("run config: level_lo exceeds level_hi");
  }
  if (c.shot_cap <= 0) throw validation_error("run config: shot cap must be positive");
  if (!(c.rank_tol > 0.0)) throw validation_error("run config: rank_tol must be positive");
}

// Re-raises the in-flight exception with a stage prefix, preserving its type
// (unknown kinds surface as numerical errors).
[[noreturn]] void rethrow_with_stage(const std::string& stage) {
  const std::string prefix = "stage " + stage + ": ";
  try {
    throw;
  } catch (const validation_error& e) {
    throw validation_error(prefix + e.what());
  } catch (const resource_limit_error& e) {
    throw resource_limit_error(prefix + e.what());
  } catch (const numerical_error& e) {
    throw numerical_error(prefix + e.what());
  } catch (const std::exception& e) {
    throw numerical_error(prefix + e.what());
  }
}

void apply_observable_override(Instance& inst, const nlohmann::json& o) {
  const Eigen::Index dim = Eigen::Index(1) << inst.circuit.n;
  if (o.is_string()) {
    const std::string name = o.get<std::string>();
    if (name == "identity") {
      inst.observable = make_observable(Matrix::Identity(dim, dim), 1.0);
    } else if (name == "pauli-x") {
      if (inst.circuit.n != 1) {
        throw validation_error("instance: the pauli-x observable needs a 1-qubit circuit");
      }
      Matrix x(2, 2);
      x << 0.0, 1.0, 1.0, 0.0;
      inst.observable = make_observable(x, 1.0);
    } else if (name == "maxcut-negated") {
      if (!inst.metadata.graph) {
        throw validation_error("instance: maxcut-negated observable needs a graph");
      }
      const Observable cost = maxcut_hamiltonian(*inst.metadata.graph);
      inst.observable = make_observable(-cost.matrix, cost.norm_bound);
    } else {
      throw validation_error("instance: unknown observable override \"" + name + "\"");
    }
  } else if (o.is_object() && o.contains("diagonal")) {
    const std::vector<double> diag = o.at("diagonal").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(diag.size()) != dim) {
      throw validation_error("instance: diagonal observable must have 2^n entries");
    }
    Matrix m = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    inst.observable = make_observable(m);
  } else {
    throw validation_error("instance: observable override must be a name or {\"diagonal\": [...]}");
  }
}

}  // namespace

Instance instance_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("ansatz")) {
      throw validation_error("instance: missing \"ansatz\" object");
    }
    const nlohmann::json& a = j.at("ansatz");
    const std::string type = a.at("type").get<std::string>();
    Instance inst;
    if (type == "qaoa-maxcut") {
      GraphSpec graph;
      graph.n = a.at("graph").at("n").get<int>();
      for (const nlohmann::json& e : a.at("graph").at("edges")) {
        graph.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
      inst = qaoa_maxcut(graph, a.at("p").get<int>());
    } else if (type == "hea-ion-trap") {
      const int n = a.at("n").get<int>();
      const int depth = a.at("depth").get<int>();
      inst.circuit = hea_ion_trap(n, depth, a.at("J0").get<double>(),
                                  a.at("decay_exp").get<double>(),
                                  a.at("quant_level").get<int>(),
                                  a.at("sharing").get<std::vector<int>>());
      inst.metadata.name =
          "hea-ion-trap-n" + std::to_string(n) + "-d" + std::to_string(depth);
      if (!j.contains("observable")) {
        throw validation_error("instance: hea-ion-trap requires an \"observable\" override");
      }
    } else if (type == "phase-rotation") {
      inst = phase_rotation_instance();
    } else {
      throw validation_error("instance: unknown ansatz type \"" + type + "\"");
    }
    if (j.contains("observable")) apply_observable_override(inst, j.at("observable"));
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("instance: malformed JSON structure: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("instance: cannot open \"" + path + "\"");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("instance: JSON parse failure in \"" + path + "\": " + e.what());
  }
  return instance_from_json(j);
}

nlohmann::json strip_timings(const nlohmann::json& doc) {
  nlohmann::json out = doc;
  if (out.is_object()) out.erase("timings");
  return out;
}

std::string content_address(const nlohmann::json& doc) {
  const std::uint64_t h = fnv1a64(strip_timings(doc).dump());
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

std::string write_artifact(const std::string& dir, const std::string& prefix,
                           const nlohmann::json& doc) {
  if (dir.empty()) throw validation_error("write_artifact: output directory is empty");
  std::filesystem::create_directories(dir);
  const std::string path =
      (std::filesystem::path(dir) / (prefix + "-" + content_address(doc) + ".json")).string();
  std::ofstream out(path);
  if (!out) throw resource_limit_error("write_artifact: cannot write \"" + path + "\"");
  out << doc.dump(2) << '\n';
  return path;
}

RunReport run_fpras(const RunConfig& config) {
  validate_config(config);
  const steady::time_point run_start = steady::now();

  RunReport report;
  nlohmann::json& doc = report.document;
  doc["format"] = "torus-fpras-report";
  doc["config"] = config_to_json(config);
  nlohmann::json timings = nlohmann::json::object();

  // Runs one stage, timing it; on failure the partial report is persisted
  // (best effort) and the error resurfaces with a stage tag.
  const auto stage = [&](const char* name, auto&& body) {
    const steady::time_point t0 = steady::now();
    try {
      body();
    } catch (const std::exception& e) {
      doc["error"] = {{"stage", name}, {"message", e.what()}};
      timings[name] = elapsed_ms(t0);
      doc["timings"] = timings;
      if (!config.out_dir.empty()) {
        try {
          write_artifact(config.out_dir, "report-partial", doc);
        } catch (...) {
          // Persistence of a failing run is advisory only.
        }
      }
      rethrow_with_stage(name);
    }
    timings[name] = elapsed_ms(t0);
  };

  Instance inst;
  stage("instance", [&] {
    std::ifstream in(config.instance_path);
    if (!in) throw validation_error("cannot open \"" + config.instance_path + "\"");
    nlohmann::json raw;
    try {
      raw = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw validation_error("JSON parse failure: " + std::string(e.what()));
    }
    inst = instance_from_json(raw);
    doc["instance"] = {{"name", inst.metadata.name},
                       {"n", inst.circuit.n},
                       {"M", inst.circuit.M},
                       {"o_max", inst.observable.norm_bound},
                       {"digest", content_address(raw)}};
  });

  DegreeProfile profile;
  stage("degrees", [&] {
    profile = degree_profile(inst.circuit);
    doc["degrees"] = {{"d", profile.d}, {"conservative_bound", profile.conservative_bound}};
  });

  SamplingGrid grid;
  stage("grid", [&] { grid = build_grid(profile, config.grid); });

  AcquisitionReport acq;
  stage("acquire", [&] {
    const long long before = query_counter::value();
    acq = acquire(inst, grid, config.acquisition, config.epsilon, config.delta, config.seed,
                  config.shot_cap);
    const long long observed = query_counter::value() - before;
    doc["acquisition"] = {{"grid_sizes", acq.grid.sizes},
                          {"grid_mode", acq.grid.mode},
                          {"mode", acq.mode},
                          {"shots_per_point", acq.shots_per_point},
                          {"total_queries", acq.total_queries},
                          {"observed_queries", observed},
                          {"epsilon", acq.epsilon},
                          {"delta", acq.delta}};
    report.total_queries = acq.total_queries;
    if (!config.out_dir.empty()) {
      doc["artifacts"]["acquisition"] = write_artifact(config.out_dir, "acquisition",
                                                       report_to_json(acq));
    }
  });

  Htp surrogate;
  stage("reconstruct", [&] {
    surrogate = reconstruct(acq);
    const nlohmann::json sj = htp_to_json(surrogate);
    doc["surrogate"] = {{"digest", content_address(sj)},
                        {"coefficients", surrogate.coeffs.size()},
                        {"degrees", surrogate.degrees}};
    if (!config.out_dir.empty()) {
      doc["artifacts"]["surrogate"] = write_artifact(config.out_dir, "surrogate", sj);
    }
  });

  stage("formulas", [&] {
    const int k_layers = static_cast<int>(inst.circuit.layers.size());
    int delta_max = 0;
    for (const Layer& layer : inst.circuit.layers) {
      delta_max = std::max(delta_max,
                           static_cast<int>(std::llround(layer.generator.spectral_diameter)));
    }
    nlohmann::json f;
    f["l0"] = l0(inst.circuit.M, k_layers, delta_max);
    try {
      f["required_level"] = required_level(config.epsilon, inst.circuit.M, k_layers, delta_max,
                                           inst.observable.norm_bound);
    } catch (const resource_limit_error&) {
      f["required_level"] = "overflow";
    }
    long long points = 1;
    for (int s : grid.sizes) points *= s;
    try {
      f["shot_formula"] = shot_budget(config.epsilon, config.delta, points,
                                      inst.observable.norm_bound);
    } catch (const resource_limit_error&) {
      f["shot_formula"] = "overflow";
    }
    doc["formulas"] = f;
  });

  SweepResult sweep;
  std::vector<FlatCheck> flatness;
  stage("sweep", [&] {
    const int degree_lo = surrogate.degrees.empty()
                              ? 0
                              : *std::max_element(surrogate.degrees.begin(),
                                                  surrogate.degrees.end());
    const int lo = std::max(config.level_lo, degree_lo);
    const int hi = config.level_hi > 0 ? std::max(config.level_hi, lo) : lo + 3;
    sweep = sweep_levels(surrogate, hi, config.epsilon, SolveOptions{}, config.level_lo);

    nlohmann::json table = nlohmann::json::array();
    for (const MomentSolution& sol : sweep.solutions) {
      const MomentIndexing idx = make_indexing(sol.M, sol.level);
      const FlatCheck fc = flat_check(idx, sol.y, config.rank_tol);
      flatness.push_back(fc);
      table.push_back({{"level", sol.level},
                       {"lower_bound", sol.lower_bound},
                       {"objective", sol.objective},
                       {"status", sol.status},
                       {"iterations", sol.iterations},
                       {"primal_residual", sol.primal_residual},
                       {"dual_residual", sol.dual_residual},
                       {"min_eigenvalue", sol.min_eigenvalue},
                       {"equivalent_symmetric_degree", sol.equivalent_symmetric_degree},
                       {"flat", fc.flat},
                       {"rank_lo", fc.rank_lo},
                       {"rank_hi", fc.rank_hi}});
    }
    doc["sweep"] = table;
    doc["estimate"] = sweep.best_lower_bound;
    doc["best_level"] = sweep.best_level;
    doc["early_stopped"] = sweep.early_stopped;
    report.estimate = sweep.best_lower_bound;
    if (!config.out_dir.empty()) {
      // Persist the solution the estimate came from.
      for (const MomentSolution& sol : sweep.solutions) {
        if (sol.level == sweep.best_level) {
          doc["artifacts"]["solution"] =
              write_artifact(config.out_dir, "solution", solution_to_json(sol));
        }
      }
    }
  });

  stage("extract", [&] {
    RngStream stream(config.seed, "extract");
    nlohmann::json attempts = nlohmann::json::array();
    bool extracted = false;
    for (std::size_t i = sweep.solutions.size(); i-- > 0 && !extracted;) {
      if (!flatness[i].flat) continue;
      report.flat_found = true;
      const MomentSolution& sol = sweep.solutions[i];
      try {
        const MomentIndexing idx = make_indexing(sol.M, sol.level);
        const AtomSet atoms =
            extract_minimizers(idx, sol.y, surrogate, stream, config.rank_tol);
        nlohmann::json ej = atomset_to_json(atoms);
        ej["level"] = sol.level;
        doc["extraction"] = ej;
        report.theta_hat = atoms.best_theta;
        report.surrogate_value = atoms.best_value;
        extracted = true;
      } catch (const numerical_error& e) {
        attempts.push_back({{"level", sol.level}, {"message", e.what()}});
      }
    }
    if (!extracted) {
      // No swept level supports atom extraction: fall back to direct grid
      // minimization of the surrogate and flag the report.
      report.used_fallback = true;
      const int degree_max = surrogate.degrees.empty()
                                 ? 0
                                 : *std::max_element(surrogate.degrees.begin(),
                                                     surrogate.degrees.end());
      const int points = std::max(2 * degree_max + 1, 65);
      const auto [theta, value] = grid_minimize(surrogate, points);
      doc["extraction"] = {{"fallback", "grid-minimize"},
                           {"points_per_axis", points},
                           {"attempts", attempts}};
      report.theta_hat = theta;
      report.surrogate_value = value;
    }
    doc["flat_found"] = report.flat_found;
    doc["used_fallback"] = report.used_fallback;
  });

  stage("evaluate", [&] {
    const StateVector state = prepare(inst.circuit, report.theta_hat);
    report.true_value = expectation(state, inst.observable);
    doc["evaluation"] = {{"theta_hat", report.theta_hat},
                         {"surrogate_value", report.surrogate_value},
                         {"true_value", report.true_value}};
  });

  doc["guarantee"] = {{"type", "additive"},
                      {"epsilon", config.epsilon},
                      {"delta", config.delta},
                      {"o_max", inst.observable.norm_bound}};
  timings["total"] = elapsed_ms(run_start);
  doc["timings"] = timings;
  if (!config.out_dir.empty()) {
    stage("persist", [&] {
      doc["artifacts"]["report"] = write_artifact(config.out_dir, "report", doc);
    });
  }
  return report;
}

GapVerdict gap_decide(const RunConfig& base, double a, double b) {
  if (!(b - a > 0.0)) throw validation_error("gap_decide: the promise requires b - a > 0");
  RunConfig cfg = base;
  cfg.epsilon = std::min(1.0, (b - a) / 3.0);
  cfg.delta = 1.0 / 3.0;

  GapVerdict verdict;
  verdict.report = run_fpras(cfg);
  verdict.estimate = verdict.report.estimate;
  verdict.midpoint = (a + b) / 2.0;
  verdict.yes = verdict.estimate <= verdict.midpoint;
  // An estimate inside the open middle third is evidence the promise
  // (optimum <= a or >= b) may not hold; the verdict still stands.
  const double third = (b - a) / 3.0;
  verdict.warning = verdict.estimate > a + third && verdict.estimate < b - third;
  return verdict;
}

}  // namespace torusfpras
