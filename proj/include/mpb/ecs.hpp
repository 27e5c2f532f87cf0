#pragma once

#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

/// Environmental Complexity Signature: dimensionless (density, clutter,
/// structure) triple scoring how hard an environment is to plan in for a
/// quadrotor of a given radius.
struct EcsSignature {
  double density = 0.0;    // in [0, 1]
  double clutter = 0.0;    // in (0, 1] after clamping
  double structure = 0.0;  // in [0, 1]
};

struct EcsReport {
  EcsSignature signature;
  double clutter_raw = 0.0;   // radius / dispersion, unclamped
  double dispersion_m = 0.0;  // largest empty-ball radius over free cell centers
  bool quad_fits = true;      // clutter_raw <= 1
  std::int64_t occupied = 0;
  double resolution = 0.0;
};

/// Neighborhood rule for the structure index.
enum class Connectivity { kFace6, kFull26 };

/// Discretizes at the quadrotor radius (the metric resolution, not the
/// planning resolution) on the raw, un-inflated cloud.
VoxelGrid ecs_grid(const PointCloud& cloud, const Bounds& bounds, const QuadrotorSpec& quad);

/// Occupied-volume ratio r^3 * N / (s_x * s_y * s_z), using exact extents.
/// Throws ContractError when the grid resolution differs from quad.radius.
double density_index(const VoxelGrid& grid, const QuadrotorSpec& quad);

struct ClutterIndex {
  double clamped = 0.0;
  double raw = 0.0;
  double dispersion_m = 0.0;
  bool quad_fits = true;
};

/// radius / D, where D is the largest distance from a free cell center to its
/// nearest occupied cell center. Throws UndefinedMetricError when the grid has
/// no occupied or no free cell.
ClutterIndex clutter_index(const VoxelGrid& grid, const QuadrotorSpec& quad);

/// Fraction of occupied cells with at least one free neighbor inside bounds.
/// Out-of-bounds neighbors count as not free.
double structure_index(const VoxelGrid& grid, Connectivity conn = Connectivity::kFace6);

/// Full signature on ecs_grid(cloud). Propagates UndefinedMetricError for
/// obstacle-free maps (density 0 is still well defined; callers report the
/// other two as absent).
EcsReport ecs(const PointCloud& cloud, const Bounds& bounds, const QuadrotorSpec& quad,
              Connectivity conn = Connectivity::kFace6);

namespace serial {
ClutterIndex clutter_index(const VoxelGrid& grid, const QuadrotorSpec& quad);
double structure_index(const VoxelGrid& grid, Connectivity conn = Connectivity::kFace6);
}  // namespace serial

}  // namespace mpb
