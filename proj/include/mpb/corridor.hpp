#pragma once

#include <vector>

#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

/// Convex free-space region in halfspace form, interior = {x : n.x <= b}.
/// Built axis-aligned here (6 halfspaces from a grid-snapped box), but
/// consumers only rely on the halfspace view.
struct Polytope {
  std::vector<Vec3> normals;
  std::vector<double> offsets;
  // Grid-aligned box realization: inclusive cell range and world extents.
  Vec3i lo_cell{0, 0, 0}, hi_cell{0, 0, 0};
  Vec3 lo{0, 0, 0}, hi{0, 0, 0};
  int segment_index = 0;

  bool contains(const Vec3& p, double tol = 0.0) const {
    for (std::size_t i = 0; i < normals.size(); ++i) {
      if (normals[i].dot(p) > offsets[i] + tol) return false;
    }
    return true;
  }

  /// Smallest halfspace margin of p (positive inside).
  double margin(const Vec3& p) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < normals.size(); ++i) {
      m = std::min(m, offsets[i] - normals[i].dot(p));
    }
    return m;
  }

  static Polytope from_cell_box(const VoxelGrid& grid, const Vec3i& lo_cell, const Vec3i& hi_cell,
                                int segment_index);
};

/// Ordered sequence of overlapping free polytopes covering a path.
struct Corridor {
  std::vector<Polytope> polytopes;
  /// One point strictly inside each consecutive pair's intersection.
  std::vector<Vec3> overlap_witness;
};

struct CorridorCheck {
  bool no_occupied_inside = true;
  bool path_covered = true;
  bool overlaps_ok = true;
  std::string detail;

  bool all_ok() const { return no_occupied_inside && path_covered && overlaps_ok; }
};

/// Grows one maximal grid-aligned box around each path piece: seed with the
/// cells the piece touches, then greedily push all six faces outward in
/// whole-cell steps until blocked by an occupied cell or the grid edge.
/// Non-axis-aligned segments whose bounding box is blocked are bisected
/// until each piece seeds a free box; boxes contained in their predecessor
/// are dropped. Throws ContractError when the path touches occupied cells.
Corridor build_corridor(const std::vector<Vec3>& waypoints, const VoxelGrid& grid);

/// Independent validator: (a) no occupied cell center inside any polytope,
/// (b) path samples at resolution/2 all inside the union, (c) consecutive
/// intersections have non-empty interior.
CorridorCheck verify_corridor(const Corridor& corridor, const VoxelGrid& grid,
                              const std::vector<Vec3>& waypoints);

/// True iff no box face can be pushed one more cell without swallowing an
/// occupied cell or leaving the grid. Exposed for the acceptance suite.
bool box_face_maximal(const Polytope& poly, const VoxelGrid& grid, std::string* detail = nullptr);

/// Greedy shortcutting: replaces waypoint subsequences with direct segments
/// whenever the segment is free under the supercover rule. Never longer and
/// never more waypoints than the input.
std::vector<Vec3> simplify_path(const std::vector<Vec3>& waypoints, const VoxelGrid& grid);

}  // namespace mpb
