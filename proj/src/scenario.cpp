#include "mpb/scenario.hpp"

#include <fstream>
#include <vector>

#include <json.hpp>

#include "mpb/jps.hpp"
#include "mpb/rng.hpp"

namespace mpb {

std::pair<Vec3, Vec3> sample_start_goal(const VoxelGrid& inflated_grid, double min_separation,
                                        std::uint64_t seed, int max_attempts) {
  if (min_separation < 0.0) throw ConfigError("sample_start_goal: min_separation must be >= 0");
  std::vector<Vec3> free_centers;
  const Vec3i dims = inflated_grid.dims();
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        if (!inflated_grid.occupied(i, j, k)) {
          free_centers.push_back(inflated_grid.cell_center(i, j, k));
        }
      }
    }
  }
  if (free_centers.size() < 2) {
    throw ConfigError("sample_start_goal: fewer than two free cells");
  }
  Rng rng(mix_seed(seed, 3));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const Vec3& a = free_centers[rng.uniform_index(free_centers.size())];
    const Vec3& b = free_centers[rng.uniform_index(free_centers.size())];
    if ((a - b).norm() >= min_separation && (a - b).norm() > 1e-9) {
      return {a, b};
    }
  }
  throw ConfigError("sample_start_goal: attempt budget exhausted");
}

bool filter_feasible(const ScenarioCase& scenario, const QuadrotorSpec& quad,
                     double inflation_margin, const PlannerBudget& budget) {
  const VoxelGrid grid = discretize(scenario.cloud, scenario.bounds, quad.radius / 2.0);
  const VoxelGrid inflated = inflate(grid, inflation_margin);
  if (!inflated.free_at(scenario.start) || !inflated.free_at(scenario.goal)) return false;
  PlannerBudget filter_budget = budget;
  filter_budget.timeout_s = std::max(budget.timeout_s, 2.0);  // the filter is not time-critical
  filter_budget.enforce_wall_clock = false;
  try {
    return plan_jps(inflated, scenario.start, scenario.goal, filter_budget).status ==
           PlanStatus::kSuccess;
  } catch (const ContractError&) {
    return false;
  }
}

void save_scenario_sidecar(const ScenarioCase& scenario, const std::string& path,
                           const std::string& generator_json) {
  nlohmann::json j;
  j["id"] = scenario.id;
  j["family"] = scenario.family;
  j["seed"] = scenario.seed;
  j["bounds"] = {{"min", {scenario.bounds.min_corner[0], scenario.bounds.min_corner[1],
                          scenario.bounds.min_corner[2]}},
                 {"max", {scenario.bounds.max_corner[0], scenario.bounds.max_corner[1],
                          scenario.bounds.max_corner[2]}}};
  j["start"] = {scenario.start[0], scenario.start[1], scenario.start[2]};
  j["goal"] = {scenario.goal[0], scenario.goal[1], scenario.goal[2]};
  j["spec_hash"] = scenario.spec_hash;
  if (!generator_json.empty()) j["generator"] = nlohmann::json::parse(generator_json);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace mpb
