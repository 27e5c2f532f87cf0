#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mpb/types.hpp"

namespace mpb {

/// Dense axis-aligned occupancy grid.
///
/// dims_k = ceil(extent_k / resolution); cell (i,j,k) covers the box
/// min + [i,i+1)*res x ... and its center is min + (index + 0.5)*res.
/// Cell membership of a point is half-open with lower-index tie-breaking:
/// a point exactly on a shared face belongs to the lower-index cell.
class VoxelGrid {
 public:
  VoxelGrid(const Bounds& bounds, double resolution);

  const Bounds& bounds() const { return bounds_; }
  double resolution() const { return resolution_; }
  const Vec3i& dims() const { return dims_; }
  std::size_t cell_count() const { return occupancy_.size(); }
  std::int64_t occupied_count() const { return occupied_count_; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
  }

  bool in_grid(int i, int j, int k) const {
    return i >= 0 && i < dims_[0] && j >= 0 && j < dims_[1] && k >= 0 && k < dims_[2];
  }
  bool in_grid(const Vec3i& c) const { return in_grid(c[0], c[1], c[2]); }

  bool occupied(int i, int j, int k) const { return occupancy_[index(i, j, k)] != 0; }
  bool occupied(const Vec3i& c) const { return occupied(c[0], c[1], c[2]); }

  /// Occupancy of the cell containing a world point. Points outside the
  /// workspace count as occupied (conservative for collision queries).
  bool occupied_at(const Vec3& p) const {
    std::optional<Vec3i> c = cell_of(p);
    return !c || occupied(*c);
  }

  bool free_at(const Vec3& p) const { return !occupied_at(p); }

  void set_occupied(int i, int j, int k, bool value = true);

  Vec3 cell_center(int i, int j, int k) const {
    return bounds_.min_corner + Vec3(i + 0.5, j + 0.5, k + 0.5) * resolution_;
  }
  Vec3 cell_center(const Vec3i& c) const { return cell_center(c[0], c[1], c[2]); }

  /// Cell containing a point, or nullopt if the point is outside bounds
  /// (half-open on the max side). Lower-index tie-breaking on faces.
  std::optional<Vec3i> cell_of(const Vec3& p) const;

  const std::vector<std::uint8_t>& raw() const { return occupancy_; }
  std::vector<std::uint8_t>& raw() { return occupancy_; }

  /// Recount occupied cells after direct writes through raw().
  void recount();

 private:
  Bounds bounds_;
  double resolution_ = 0.0;
  Vec3i dims_{0, 0, 0};
  std::vector<std::uint8_t> occupancy_;
  std::int64_t occupied_count_ = 0;
};

/// Per-cell Euclidean distance (meters) to the nearest occupied cell center.
struct DistanceField {
  Bounds bounds;
  double resolution = 0.0;
  Vec3i dims{0, 0, 0};
  std::vector<double> distance;  // same layout as VoxelGrid

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  }
  double at(int i, int j, int k) const { return distance[index(i, j, k)]; }
};

/// Bins a cloud into an occupancy grid. Points outside bounds are dropped;
/// `dropped` (when non-null) receives how many were.
/// Throws ConfigError on non-finite coordinates or invalid bounds/resolution.
VoxelGrid discretize(const PointCloud& cloud, const Bounds& bounds, double resolution,
                     std::int64_t* dropped = nullptr);

/// Grows occupancy: a cell is occupied in the output iff some input occupied
/// cell center lies within `margin` (m) of its center. margin = 0 is identity.
VoxelGrid inflate(const VoxelGrid& grid, double margin);

/// Exact Euclidean distance transform (per-axis lower-envelope method).
/// Throws UndefinedMetricError if the grid has no occupied cell.
DistanceField distance_transform(const VoxelGrid& grid);

/// Serial reference implementations of the OpenMP kernels above. Kept for
/// correctness tests and the kernel benchmark; results are bit-identical.
namespace serial {
VoxelGrid inflate(const VoxelGrid& grid, double margin);
DistanceField distance_transform(const VoxelGrid& grid);
}  // namespace serial

/// Comparison slack for inflate's "within margin" test, absorbing the
/// floating-point error of res * sqrt(integer).
inline constexpr double kInflateSlack = 1e-9;

}  // namespace mpb
