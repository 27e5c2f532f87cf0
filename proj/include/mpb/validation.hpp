#pragma once

#include <string>
#include <vector>

#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

struct PathValidation {
  bool ok = true;
  std::string reason;
};

/// Independent path validator used by the bench harness: deliberately does
/// not share code with the planners' own collision checks. Samples every
/// segment at half the grid resolution and requires each sample's cell to be
/// free, plus the structural invariants (>= 2 waypoints, consecutive
/// waypoints distinct, finite coordinates).
PathValidation validate_path(const std::vector<Vec3>& waypoints, const VoxelGrid& inflated_grid);

}  // namespace mpb
