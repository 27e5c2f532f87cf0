#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mpb/trajectory.hpp"
#include "mpb/types.hpp"

namespace mpb {

/// Per-segment durations from a rest-to-rest trapezoidal speed profile:
/// T = L/v_max + v_max/a_max when the segment is long enough to reach
/// v_max, otherwise the triangular profile T = 2*sqrt(L/a_max).
std::vector<double> allocate_times(const std::vector<Vec3>& waypoints, double v_max, double a_max);

/// Minimum-jerk interpolation: the unique piecewise quintic through the
/// waypoints with the given segment durations and full boundary states,
/// minimizing the integral of the squared jerk (free interior velocities
/// and accelerations are solved in closed form via the banded normal
/// equations).
class MinJerkSolver {
 public:
  /// Factorizes the duration-dependent system once; solve() may then be
  /// called repeatedly with different waypoints at negligible cost.
  MinJerkSolver(std::vector<double> durations, int waypoint_count);

  Trajectory solve(const std::vector<Vec3>& waypoints, const MotionState& start,
                   const MotionState& end) const;

  const std::vector<double>& durations() const { return durations_; }

 private:
  std::vector<double> durations_;
  int waypoints_ = 0;
  // Energy quadratic form of one segment in the boundary values
  // z = (p0, v0, a0, p1, v1, a1); identical for all three axes.
  std::vector<Eigen::Matrix<double, 6, 6>> seg_quadratic_;
  Eigen::LDLT<Eigen::MatrixXd> factorization_;
};

Trajectory min_jerk_fit(const std::vector<Vec3>& waypoints, const std::vector<double>& durations,
                        const MotionState& start, const MotionState& end);

/// Convenience rest-to-rest fit.
Trajectory min_jerk_fit(const std::vector<Vec3>& waypoints, const std::vector<double>& durations);

}  // namespace mpb
