#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mpb/maze.hpp"
#include "mpb/obstacles.hpp"
#include "mpb/path.hpp"
#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

/// One planning problem: a cloud, its workspace, and a feasible start/goal
/// pair, plus enough provenance to regenerate it bit-exactly.
struct ScenarioCase {
  std::string id;
  std::string family;  // "maze" | "obstacle" | "real"
  std::uint64_t seed = 0;
  PointCloud cloud;
  Bounds bounds;
  Vec3 start{0, 0, 0};
  Vec3 goal{0, 0, 0};
  std::string spec_hash;  // fingerprint of the generating spec
};

/// Rejection-samples two free cell centers at least min_separation apart on
/// the inflated planning grid. Throws ConfigError when the attempt budget is
/// exhausted.
std::pair<Vec3, Vec3> sample_start_goal(const VoxelGrid& inflated_grid, double min_separation,
                                        std::uint64_t seed, int max_attempts = 1000);

/// True iff JPS connects start to goal on the inflated planning-resolution
/// grid (the paper's map feasibility filter).
bool filter_feasible(const ScenarioCase& scenario, const QuadrotorSpec& quad,
                     double inflation_margin, const PlannerBudget& budget);

/// JSON sidecar (family, seed, generator parameters, bounds, start, goal).
void save_scenario_sidecar(const ScenarioCase& scenario, const std::string& path,
                           const std::string& generator_json);

}  // namespace mpb
