#pragma once

#include <cstdint>
#include <vector>

#include "mpb/path.hpp"
#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

/// Double-integrator state, the lattice node of the motion-primitive search.
struct LatticeState {
  Vec3 position{0, 0, 0};
  Vec3 velocity{0, 0, 0};
};

struct MplConfig {
  int accels_per_axis = 3;      // uniform grid over [-a_max, a_max]
  double dt = 0.5;              // primitive duration, s
  double effort_weight = 1e-3;  // tie-break on ||a||^2 for visually smooth plans
  double velocity_bin = 0.0;    // duplicate-detection bin; 0 -> v_max / 8
  std::int64_t max_expansions = 12000;  // deterministic budget
  double arc_sample_spacing = 0.0;      // collision sampling; 0 -> resolution / 2
};

/// Constant-acceleration trajectory piece produced by one lattice edge.
struct Primitive {
  LatticeState from;
  Vec3 accel{0, 0, 0};
  double dt = 0.0;

  LatticeState propagate(double t) const {
    LatticeState s;
    s.position = from.position + from.velocity * t + 0.5 * accel * t * t;
    s.velocity = from.velocity + accel * t;
    return s;
  }
};

struct MplResult {
  PlanResult plan;
  std::vector<Primitive> primitives;  // dynamically feasible seed trajectory
};

/// A* over constant-acceleration motion primitives with a time-optimal
/// heuristic (distance / v_max). Successors exceeding v_max on any axis or
/// colliding along the sampled arc are pruned. Waypoints of the returned
/// path are arc samples, so downstream corridor construction follows the
/// flown curve rather than the lattice chords.
MplResult plan_mpl(const VoxelGrid& grid, const LatticeState& start, const Vec3& goal,
                   const QuadrotorSpec& quad, const PlannerBudget& budget,
                   const MplConfig& config = {});

}  // namespace mpb
