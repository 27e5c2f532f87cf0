#pragma once

#include "mpb/path.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

/// Jump point search over the 26-connected grid with Euclidean edge weights.
///
/// Moves may not cut corners: a move with k nonzero components requires the
/// whole 2^k-cell box it sweeps to be free. Pruning and forced-neighbor
/// rules are derived at startup from local shortest-path analysis of the
/// 3x3x3 neighborhood, with diagonal-first canonical tie-breaking, so the
/// returned cost is grid-optimal (equal to Dijkstra on the same graph).
///
/// The final waypoint is the goal cell center. Throws ContractError when
/// start or goal is outside the grid or occupied.
PlanResult plan_jps(const VoxelGrid& grid, const Vec3& start, const Vec3& goal,
                    const PlannerBudget& budget);

}  // namespace mpb
