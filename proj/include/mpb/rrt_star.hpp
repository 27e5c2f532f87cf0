#pragma once

#include <cstdint>

#include "mpb/path.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

struct RrtStarConfig {
  double goal_bias = 0.1;
  double steer_length_m = 1.5;
  double rewire_gamma = 12.0;  // shrinking-radius constant, r = gamma*(ln n / n)^(1/3)
  // Deterministic budget. The wall-clock timeout is enforced as a backstop,
  // but the iteration cap is sized to finish first so that identical seeds
  // give identical trees.
  std::int64_t max_iterations = 12000;
};

/// Anytime RRT* in the continuous workspace; edges are validated with the
/// supercover rule against the inflated grid. Deterministic given (seed, map).
/// Returns the best path whose endpoint lies within the goal threshold;
/// status is kTimeout when the budget expires without a solution.
PlanResult plan_rrt_star(const VoxelGrid& grid, const Vec3& start, const Vec3& goal,
                         const PlannerBudget& budget, std::uint64_t seed,
                         const RrtStarConfig& config = {});

}  // namespace mpb
