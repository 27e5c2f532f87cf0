#pragma once

#include <cstdint>

#include "mpb/types.hpp"

namespace mpb {

struct SizeRange {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const { return lo > 0.0 && hi >= lo; }
};

/// Outdoor-style obstacle field: convex shapes (cylinders, ellipsoids, yawed
/// boxes) plus non-convex gates (vertical rings), dropped uniformly into the
/// workspace. Shapes are sampled as surfaces; discretization plus inflation
/// recovers solidity at planning scale.
struct ObstacleSpec {
  int cylinders = 0;
  SizeRange cylinder_radius{0.3, 0.8};
  SizeRange cylinder_height{2.0, 5.0};

  int ellipsoids = 0;
  SizeRange ellipsoid_semi_axis{0.3, 1.0};  // sampled per axis

  int boxes = 0;
  SizeRange box_edge{0.4, 1.6};  // sampled per axis; yaw uniform in [0, 2*pi)

  int gates = 0;
  SizeRange gate_ring_radius{0.6, 1.1};  // ring (hole) radius
  SizeRange gate_tube_radius{0.1, 0.25};

  double point_spacing = 0.05;   // m
  double placement_margin = 0.0; // keep shapes this far inside bounds
  bool fill_interior = false;    // emit solid lattices instead of surfaces
  std::uint64_t seed = 0;

  void validate() const;
  int total_count() const { return cylinders + ellipsoids + boxes + gates; }
};

/// Deterministic in (spec, seed). Obstacles may overlap each other; positions
/// whose shape would poke out of bounds are rejected and resampled. Throws
/// ConfigError when a shape cannot fit at all.
PointCloud generate_obstacle_map(const ObstacleSpec& spec, const Bounds& bounds);

}  // namespace mpb
