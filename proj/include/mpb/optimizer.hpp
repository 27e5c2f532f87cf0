#pragma once

#include <optional>
#include <string>

#include "mpb/corridor.hpp"
#include "mpb/min_jerk.hpp"
#include "mpb/trajectory.hpp"
#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace mpb {

enum class LimitNorm { kAxisInf, kL2 };

struct OptimizerConfig {
  double corridor_weight = 1e4;
  double velocity_weight = 1e3;
  double acceleration_weight = 1e3;
  double time_weight = 8.0;        // rho_T
  int samples_per_segment = 16;    // K
  int max_inner_iterations = 60;   // descent steps per penalty round
  int max_penalty_rounds = 4;      // weight escalations
  double convergence_tol = 1e-5;   // relative objective decrease
  double time_scale_factor = 1.2;  // feasibility pass dilation
  int max_time_scalings = 24;
  double corridor_margin = 0.01;   // soft safety pull-in, m
  LimitNorm limit_norm = LimitNorm::kAxisInf;
  double feasibility_dt = 0.01;    // dense validation step, s
};

struct OptimizeOutcome {
  bool success = false;
  Trajectory trajectory;
  int objective_evaluations = 0;
  int penalty_rounds = 0;
  int time_scalings = 0;
  double final_objective = 0.0;
  std::string failure_reason;
};

/// Bilevel penalty optimizer: interior waypoints (one per polytope overlap)
/// and log-durations form the upper-level variables; each evaluation solves
/// the closed-form min-jerk spline below and scores jerk energy plus
/// penalty-weighted hinge^2 violations of corridor, velocity, and
/// acceleration constraints plus rho_T * total time. Finite-difference
/// gradient descent with backtracking; afterwards all durations are scaled
/// uniformly until densely sampled constraints hold, which preserves the
/// spatial path, so corridor containment survives the scaling.
OptimizeOutcome optimize_trajectory(const Corridor& corridor, const MotionState& start,
                                    const MotionState& goal, const QuadrotorSpec& quad,
                                    const OptimizerConfig& config = {});

struct FeasibilityReport {
  double duration = 0.0;
  double max_speed_axis = 0.0;    // per-axis infinity norm
  double max_accel_axis = 0.0;
  double max_speed_norm = 0.0;    // Euclidean norm
  double max_accel_norm = 0.0;
  int collision_samples = 0;      // against the supplied grid, if any
  double mean_squared_jerk = 0.0; // closed form, (1/T) * integral ||jerk||^2
  double min_corridor_margin = std::numeric_limits<double>::infinity();

  bool within_limits(const QuadrotorSpec& quad, LimitNorm norm, double tol = 1e-9) const {
    const double v = norm == LimitNorm::kAxisInf ? max_speed_axis : max_speed_norm;
    const double a = norm == LimitNorm::kAxisInf ? max_accel_axis : max_accel_norm;
    return v <= quad.v_max + tol && a <= quad.a_max + tol;
  }
};

/// Samples the trajectory at dt and reports peak rates, collisions against
/// the supplied inflated grid (when non-null), corridor margins (when a
/// corridor is supplied), and the closed-form mean squared jerk.
FeasibilityReport check_dynamic_feasibility(const Trajectory& traj, const QuadrotorSpec& quad,
                                            double dt, const VoxelGrid* inflated_grid = nullptr,
                                            const Corridor* corridor = nullptr);

}  // namespace mpb
