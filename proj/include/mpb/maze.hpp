#pragma once

#include <cstdint>
#include <vector>

#include "mpb/types.hpp"

namespace mpb {

/// Parameterized indoor-style maze: a 2-D cell lattice whose interior walls
/// are first opened into a perfect maze (randomized Kruskal) and then thinned
/// by deleting each surviving wall with probability p. Walls are extruded to
/// wall_height and emitted as surface samples.
struct MazeSpec {
  double p = 0.1;              // wall-deletion probability after Kruskal
  int cells_x = 10;
  int cells_y = 5;
  double cell_size = 2.0;      // m
  double wall_thickness = 0.2; // m
  double wall_height = 0.0;    // m; <= 0 means "use the bounds z-extent"
  double point_spacing = 0.05; // m, surface sample pitch
  std::uint64_t seed = 0;

  void validate() const;
};

/// Wall bookkeeping, separated from point emission so structural properties
/// (tree-ness, deletion statistics) can be tested without sampling surfaces.
struct MazeLayout {
  MazeSpec spec;
  // Vertical walls sit between cells (i,j) and (i+1,j): (cells_x-1) * cells_y.
  // Horizontal walls sit between (i,j) and (i,j+1): cells_x * (cells_y-1).
  std::vector<std::uint8_t> wall_v;
  std::vector<std::uint8_t> wall_h;
  int interior_total = 0;
  int removed_by_kruskal = 0;
  int deleted_by_p = 0;

  int kept_interior() const;
  /// True iff every cell is reachable from cell (0,0) through open walls.
  bool connected() const;
  /// Number of open interior walls (edges of the dual cell graph).
  int open_edges() const { return interior_total - kept_interior(); }
};

MazeLayout generate_maze_layout(const MazeSpec& spec);

/// Emits the surviving walls plus the outer boundary as a surface point cloud
/// anchored at bounds.min. Throws ConfigError when the maze footprint
/// (cells * cell_size + wall_thickness) does not fit in bounds.
PointCloud generate_maze(const MazeSpec& spec, const Bounds& bounds);

/// Centers of the entry/exit cells (opposite corners) at mid wall height,
/// used as the fixed start/goal for maze scenario cases.
void maze_corner_positions(const MazeSpec& spec, const Bounds& bounds, Vec3* start, Vec3* goal);

}  // namespace mpb
