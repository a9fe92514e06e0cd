#include "torusfpras/acquisition.hpp"

#include <cmath>
#include <numbers>

#include "torusfpras/errors.hpp"

namespace torusfpras {

namespace {

long long grid_point_count(const std::vector<int>& sizes) {
  long long count = 1;
  for (int n : sizes) {
    if (n < 1 || n % 2 == 0)
      throw validation_error("acquisition: grid sizes must be odd and >= 1");
    count *= n;
  }
  return count;
}

}  // namespace

SamplingGrid build_grid(const DegreeProfile& profile, const std::string& mode) {
  SamplingGrid grid;
  grid.mode = mode;
  if (mode == "tight") {
    for (int d : profile.d) {
      if (d < 0) throw validation_error("build_grid: negative degree");
      grid.sizes.push_back(2 * d + 1);
    }
  } else if (mode == "conservative") {
    if (profile.conservative_bound < 0)
      throw validation_error("build_grid: negative conservative bound");
    grid.sizes.assign(profile.d.size(), 2 * profile.conservative_bound + 1);
  } else {
    throw validation_error("build_grid: mode must be \"tight\" or \"conservative\"");
  }
  return grid;
}

long long shot_budget(double epsilon, double delta, long long grid_size, double o_max) {
  if (epsilon <= 0.0 || delta <= 0.0)
    throw validation_error("shot_budget: epsilon and delta must be positive");
  if (grid_size < 1) throw validation_error("shot_budget: empty grid");
  if (o_max < 0.0) throw validation_error("shot_budget: negative norm bound");
  if (o_max == 0.0) return 0;  // degenerate zero observable
  const double s = static_cast<double>(grid_size);
  const double value =
      std::ceil(8.0 * s * s * o_max * o_max / (epsilon * epsilon) * std::log(2.0 * s / delta));
  if (!(value < 9.0e18))
    throw resource_limit_error("shot_budget: budget exceeds integer range");
  return std::max<long long>(0, static_cast<long long>(value));
}

std::vector<double> grid_theta(const SamplingGrid& grid, const std::vector<int>& index) {
  if (index.size() != grid.sizes.size())
    throw validation_error("grid_theta: index rank differs from grid rank");
  std::vector<double> theta(index.size());
  for (std::size_t j = 0; j < index.size(); ++j)
    theta[j] = 2.0 * std::numbers::pi * index[j] / grid.sizes[j];
  return theta;
}

AcquisitionReport acquire(const Instance& instance, const SamplingGrid& grid,
                          const std::string& mode, double epsilon, double delta,
                          std::uint64_t master_seed, long long shot_cap) {
  if (mode != "exact" && mode != "shots")
    throw validation_error("acquire: mode must be \"exact\" or \"shots\"");
  if (static_cast<int>(grid.sizes.size()) != instance.circuit.M)
    throw validation_error("acquire: grid rank differs from parameter count");
  const long long points = grid_point_count(grid.sizes);

  AcquisitionReport report;
  report.grid = grid;
  report.mode = mode;
  report.epsilon = epsilon;
  report.delta = delta;

  // The a-priori query count: fixed here, before any simulator call.
  if (mode == "shots") {
    report.shots_per_point =
        shot_budget(epsilon, delta, points, instance.observable.norm_bound);
    if (report.shots_per_point > shot_cap)
      throw resource_limit_error(
          "acquire: per-point shot budget " + std::to_string(report.shots_per_point) +
          " exceeds the cap " + std::to_string(shot_cap) +
          "; loosen epsilon/delta, raise the cap, or use exact mode");
    report.total_queries = report.shots_per_point * points;
  }

  report.evals.sizes = grid.sizes;
  report.evals.data.resize(points);

  const int m = static_cast<int>(grid.sizes.size());
  std::vector<int> index(m);
  for (int j = 0; j < m; ++j) index[j] = -(grid.sizes[j] - 1) / 2;
  for (long long flat = 0; flat < points; ++flat) {
    const std::vector<double> theta = grid_theta(grid, index);
    const StateVector state = prepare(instance.circuit, theta);
    double value = 0.0;
    if (mode == "exact") {
      value = expectation(state, instance.observable);
    } else if (report.shots_per_point == 0) {
      value = 0.0;  // zero observable: every outcome is 0 with certainty
    } else {
      RngStream stream(master_seed, "acquire", static_cast<std::uint64_t>(flat));
      value = sample_mean(state, instance.observable, report.shots_per_point, stream);
    }
    report.evals.data[tensor_offset(grid.sizes, index)] = value;

    for (int j = m - 1; j >= 0; --j) {
      const int d = (grid.sizes[j] - 1) / 2;
      if (++index[j] <= d) break;
      index[j] = -d;
    }
  }
  return report;
}

Htp reconstruct(const AcquisitionReport& report) {
  const CoeffTensor coeffs = dft_inverse(report.evals);
  const int m = static_cast<int>(coeffs.sizes.size());

  CoeffMap raw;
  std::vector<int> index(m);
  std::vector<int> degrees(m);
  for (int j = 0; j < m; ++j) {
    degrees[j] = (coeffs.sizes[j] - 1) / 2;
    index[j] = -degrees[j];
  }
  for (std::size_t flat = 0; flat < coeffs.data.size(); ++flat) {
    raw[FrequencyVector(index.begin(), index.end())] =
        coeffs.data[tensor_offset(coeffs.sizes, index)];
    for (int j = m - 1; j >= 0; --j) {
      if (++index[j] <= degrees[j]) break;
      index[j] = -degrees[j];
    }
  }
  // Degree bounds come from the surviving support rather than the grid band,
  // so downstream relaxations start at the lowest admissible level; the grid
  // band itself stays recorded in the report.
  const Htp symmetric = symmetrize(m, raw);
  return make_htp(m, symmetric.coeffs);
}

nlohmann::json report_to_json(const AcquisitionReport& report) {
  nlohmann::json evals = nlohmann::json::array();
  for (const std::complex<double>& v : report.evals.data)
    evals.push_back({{"re", v.real()}, {"im", v.imag()}});
  return {{"grid", {{"sizes", report.grid.sizes}, {"mode", report.grid.mode}}},
          {"shots_per_point", report.shots_per_point},
          {"total_queries", report.total_queries},
          {"epsilon", report.epsilon},
          {"delta", report.delta},
          {"mode", report.mode},
          {"evals", std::move(evals)}};
}

AcquisitionReport report_from_json(const nlohmann::json& j) {
  AcquisitionReport report;
  report.grid.sizes = j.at("grid").at("sizes").get<std::vector<int>>();
  report.grid.mode = j.at("grid").at("mode").get<std::string>();
  report.shots_per_point = j.at("shots_per_point").get<long long>();
  report.total_queries = j.at("total_queries").get<long long>();
  report.epsilon = j.at("epsilon").get<double>();
  report.delta = j.at("delta").get<double>();
  report.mode = j.at("mode").get<std::string>();
  report.evals.sizes = report.grid.sizes;
  for (const auto& entry : j.at("evals"))
    report.evals.data.emplace_back(entry.at("re").get<double>(), entry.at("im").get<double>());
  const long long expected = grid_point_count(report.grid.sizes);
  if (static_cast<long long>(report.evals.data.size()) != expected)
    throw validation_error("report_from_json: evaluation count differs from grid size");
  return report;
}

}  // namespace torusfpras
