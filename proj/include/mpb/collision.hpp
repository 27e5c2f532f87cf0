#pragma once

#include <vector>

#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

/// Collision predicates shared by the planners and the corridor builder.
///
/// The traversability convention throughout is "no corner cutting": a motion
/// may not brush past an occupied cell through a shared face, edge, or
/// corner. Concretely, a segment is free iff every cell whose closed region
/// the segment touches is free (the supercover of the segment). This is what
/// makes axis-aligned corridor boxes around any accepted segment possible.

/// All grid cells whose closed region intersects the segment [a, b].
/// Points within `kBoundaryTol * resolution` of a cell face count as touching
/// both cells. Cells outside the grid are reported as {-1,-1,-1}.
std::vector<Vec3i> supercover_cells(const VoxelGrid& grid, const Vec3& a, const Vec3& b);

/// True iff every supercover cell of [a, b] is inside the grid and free.
bool segment_free(const VoxelGrid& grid, const Vec3& a, const Vec3& b);

inline constexpr double kBoundaryTol = 1e-9;

}  // namespace mpb
