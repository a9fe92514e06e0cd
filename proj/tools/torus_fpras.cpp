// Command-line driver for the torus optimization pipeline. Each subcommand
// exposes one pipeline stage (plus the end-to-end run and the gap decider)
// and prints a machine-readable JSON document on stdout.
//
// Exit codes: 0 success, 2 validation/parse error, 3 resource cap exceeded,
// 4 numerical failure.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "torusfpras/acquisition.hpp"
#include "torusfpras/errors.hpp"
#include "torusfpras/extraction.hpp"
#include "torusfpras/moment_sos.hpp"
#include "torusfpras/pipeline.hpp"
#include "torusfpras/qsim.hpp"
#include "torusfpras/rng.hpp"
#include "torusfpras/trig_poly.hpp"

namespace {

using torusfpras::validation_error;

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open \"" + path + "\"");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("JSON parse failure in \"" + path + "\": " + e.what());
  }
}

// "--levels LO..HI" -> pair of nonnegative ints.
void parse_levels(const std::string& text, int& lo, int& hi) {
  const std::size_t sep = text.find("..");
  if (sep == std::string::npos) {
    throw validation_error("--levels expects the form LO..HI, got \"" + text + "\"");
  }
  try {
    lo = std::stoi(text.substr(0, sep));
    hi = std::stoi(text.substr(sep + 2));
  } catch (const std::exception&) {
    throw validation_error("--levels expects integers, got \"" + text + "\"");
  }
  if (lo < 0 || hi < 0 || lo > hi) {
    throw validation_error("--levels requires 0 <= LO <= HI");
  }
}

void emit(const nlohmann::json& doc) { std::cout << doc.dump(2) << std::endl; }

int grid_points_for(const torusfpras::Htp& htp, int requested) {
  const int degree_max =
      htp.degrees.empty() ? 0 : *std::max_element(htp.degrees.begin(), htp.degrees.end());
  return requested > 0 ? requested : std::max(2 * degree_max + 1, 65);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified global minimization of parameterized-circuit landscapes"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string surrogate_path;
  std::string solution_path;
  std::string grid_mode = "tight";
  std::string acq_mode = "exact";
  std::string levels_text;
  std::string out_dir;
  double epsilon = 0.5;
  double delta = 0.25;
  double rank_tol = 1e-6;
  double gap_a = 0.0;
  double gap_b = 0.0;
  std::uint64_t seed = 0;
  long long shot_cap = torusfpras::kDefaultShotCap;
  int oracle_points = 0;

  const auto add_common = [&](CLI::App* sub, bool with_eps) {
    sub->add_option("--grid", grid_mode, "Sampling grid: tight|conservative");
    sub->add_option("--mode", acq_mode, "Acquisition mode: exact|shots");
    sub->add_option("--seed", seed, "Master seed for all derived random streams");
    sub->add_option("--shot-cap", shot_cap, "Per-point shot budget cap");
    sub->add_option("--out", out_dir, "Directory for content-addressed artifacts");
    if (with_eps) {
      sub->add_option("--epsilon", epsilon, "Additive accuracy target in (0, 1]");
      sub->add_option("--delta", delta, "Failure probability in (0, 1]");
    }
  };

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Exact surrogate from eigenprojector branching, plus its grid minimum");
  oracle->add_option("--instance", instance_path, "Instance JSON file")->required();
  oracle->add_option("--points", oracle_points, "Grid points per axis for the minimum");
  oracle->add_option("--out", out_dir, "Directory for content-addressed artifacts");

  CLI::App* acquire_cmd =
      app.add_subcommand("acquire", "Evaluate the instance on the sampling grid");
  acquire_cmd->add_option("--instance", instance_path, "Instance JSON file")->required();
  add_common(acquire_cmd, true);

  CLI::App* optimize = app.add_subcommand(
      "optimize", "Moment-relaxation level sweep on a saved surrogate");
  optimize->add_option("--surrogate", surrogate_path, "Surrogate JSON file")->required();
  optimize->add_option("--levels", levels_text, "Level range LO..HI");
  optimize->add_option("--epsilon", epsilon, "Early-stop scale (bounds closer than eps/10)");
  optimize->add_option("--out", out_dir, "Directory for content-addressed artifacts");

  CLI::App* extract = app.add_subcommand(
      "extract", "Flat-extension minimizer extraction from a saved moment solution");
  extract->add_option("--solution", solution_path, "Moment solution JSON file")->required();
  extract->add_option("--surrogate", surrogate_path, "Surrogate JSON file")->required();
  extract->add_option("--seed", seed, "Master seed for the extraction stream");
  extract->add_option("--rank-tol", rank_tol, "Relative numerical-rank tolerance");
  extract->add_option("--out", out_dir, "Directory for content-addressed artifacts");

  CLI::App* run = app.add_subcommand("run", "End-to-end certified minimization");
  run->add_option("--instance", instance_path, "Instance JSON file")->required();
  run->add_option("--levels", levels_text, "Relaxation level range LO..HI");
  run->add_option("--rank-tol", rank_tol, "Relative numerical-rank tolerance");
  add_common(run, true);

  CLI::App* gap = app.add_subcommand(
      "gap-decide", "Promise-gap decision: is the optimum <= a or >= b?");
  gap->add_option("--instance", instance_path, "Instance JSON file")->required();
  gap->add_option("--a", gap_a, "Lower promise threshold")->required();
  gap->add_option("--b", gap_b, "Upper promise threshold")->required();
  gap->add_option("--levels", levels_text, "Relaxation level range LO..HI");
  gap->add_option("--rank-tol", rank_tol, "Relative numerical-rank tolerance");
  add_common(gap, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (oracle->parsed()) {
      const torusfpras::Instance inst = torusfpras::load_instance(instance_path);
      const torusfpras::Htp htp = torusfpras::projector_htp(inst);
      const torusfpras::DegreeProfile profile = torusfpras::degree_profile(inst.circuit);
      const auto [theta, value] =
          torusfpras::grid_minimize(htp, grid_points_for(htp, oracle_points));
      nlohmann::json doc = {{"surrogate", torusfpras::htp_to_json(htp)},
                            {"degrees", profile.d},
                            {"conservative_bound", profile.conservative_bound},
                            {"minimum", value},
                            {"argmin", theta}};
      if (!out_dir.empty()) {
        doc["artifact"] = torusfpras::write_artifact(out_dir, "oracle", doc);
      }
      emit(doc);
    } else if (acquire_cmd->parsed()) {
      const torusfpras::Instance inst = torusfpras::load_instance(instance_path);
      const torusfpras::DegreeProfile profile = torusfpras::degree_profile(inst.circuit);
      const torusfpras::SamplingGrid sampling = torusfpras::build_grid(profile, grid_mode);
      const torusfpras::AcquisitionReport rep =
          torusfpras::acquire(inst, sampling, acq_mode, epsilon, delta, seed, shot_cap);
      nlohmann::json doc = torusfpras::report_to_json(rep);
      if (!out_dir.empty()) {
        doc["artifact"] = torusfpras::write_artifact(out_dir, "acquisition", doc);
      }
      emit(doc);
    } else if (optimize->parsed()) {
      const torusfpras::Htp htp = torusfpras::htp_from_json(parse_file(surrogate_path));
      int lo = 0;
      int hi = 0;
      if (!levels_text.empty()) parse_levels(levels_text, lo, hi);
      const int degree_max =
          htp.degrees.empty() ? 0
                              : *std::max_element(htp.degrees.begin(), htp.degrees.end());
      const int start = std::max(lo, degree_max);
      const int cap = hi > 0 ? std::max(hi, start) : start + 3;
      const torusfpras::SweepResult sweep =
          torusfpras::sweep_levels(htp, cap, epsilon, torusfpras::SolveOptions{}, lo);
      nlohmann::json table = nlohmann::json::array();
      const torusfpras::MomentSolution* best = nullptr;
      for (const torusfpras::MomentSolution& sol : sweep.solutions) {
        table.push_back({{"level", sol.level},
                         {"lower_bound", sol.lower_bound},
                         {"status", sol.status},
                         {"iterations", sol.iterations}});
        if (sol.level == sweep.best_level) best = &sol;
      }
      nlohmann::json doc = {{"sweep", table},
                            {"best_lower_bound", sweep.best_lower_bound},
                            {"best_level", sweep.best_level},
                            {"early_stopped", sweep.early_stopped}};
      if (best != nullptr) doc["best_solution"] = torusfpras::solution_to_json(*best);
      if (!out_dir.empty() && best != nullptr) {
        doc["artifact"] =
            torusfpras::write_artifact(out_dir, "solution", torusfpras::solution_to_json(*best));
      }
      emit(doc);
    } else if (extract->parsed()) {
      const torusfpras::MomentSolution sol =
          torusfpras::solution_from_json(parse_file(solution_path));
      const torusfpras::Htp htp = torusfpras::htp_from_json(parse_file(surrogate_path));
      const torusfpras::MomentIndexing idx = torusfpras::make_indexing(sol.M, sol.level);
      torusfpras::RngStream stream(seed, "extract");
      const torusfpras::AtomSet atoms =
          torusfpras::extract_minimizers(idx, sol.y, htp, stream, rank_tol);
      nlohmann::json doc = torusfpras::atomset_to_json(atoms);
      doc["level"] = sol.level;
      if (!out_dir.empty()) {
        doc["artifact"] = torusfpras::write_artifact(out_dir, "atoms", doc);
      }
      emit(doc);
    } else if (run->parsed()) {
      torusfpras::RunConfig cfg;
      cfg.instance_path = instance_path;
      cfg.epsilon = epsilon;
      cfg.delta = delta;
      cfg.seed = seed;
      cfg.grid = grid_mode;
      cfg.acquisition = acq_mode;
      if (!levels_text.empty()) parse_levels(levels_text, cfg.level_lo, cfg.level_hi);
      cfg.shot_cap = shot_cap;
      cfg.rank_tol = rank_tol;
      cfg.out_dir = out_dir;
      const torusfpras::RunReport report = torusfpras::run_fpras(cfg);
      emit(report.document);
    } else if (gap->parsed()) {
      torusfpras::RunConfig cfg;
      cfg.instance_path = instance_path;
      cfg.seed = seed;
      cfg.grid = grid_mode;
      cfg.acquisition = acq_mode;
      if (!levels_text.empty()) parse_levels(levels_text, cfg.level_lo, cfg.level_hi);
      cfg.shot_cap = shot_cap;
      cfg.rank_tol = rank_tol;
      cfg.out_dir = out_dir;
      const torusfpras::GapVerdict verdict = torusfpras::gap_decide(cfg, gap_a, gap_b);
      nlohmann::json doc = {{"verdict", verdict.yes ? "YES" : "NO"},
                            {"estimate", verdict.estimate},
                            {"midpoint", verdict.midpoint},
                            {"off_promise_warning", verdict.warning},
                            {"epsilon_used", std::min(1.0, (gap_b - gap_a) / 3.0)},
                            {"delta_used", 1.0 / 3.0}};
      if (verdict.report.document.contains("artifacts")) {
        doc["artifacts"] = verdict.report.document["artifacts"];
      }
      emit(doc);
    }
    return 0;
  } catch (const torusfpras::validation_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const torusfpras::resource_limit_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  } catch (const torusfpras::numerical_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  }
}
