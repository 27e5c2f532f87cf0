#pragma once

#include <vector>

#include <Eigen/Core>

#include "mpb/types.hpp"

namespace mpb {

/// Position/velocity/acceleration triple at one instant.
struct MotionState {
  Vec3 position{0, 0, 0};
  Vec3 velocity{0, 0, 0};
  Vec3 acceleration{0, 0, 0};

  static MotionState rest(const Vec3& p) { return {p, Vec3::Zero(), Vec3::Zero()}; }
};

/// One quintic piece in local time tau in [0, duration], row per axis:
/// x(tau) = sum_m coeffs(axis, m) * tau^m.
struct TrajSegment {
  double duration = 0.0;
  Eigen::Matrix<double, 3, 6> coeffs = Eigen::Matrix<double, 3, 6>::Zero();

  Vec3 position(double tau) const;
  Vec3 velocity(double tau) const;
  Vec3 acceleration(double tau) const;
  Vec3 jerk(double tau) const;
  /// Exact integral of the squared jerk norm over this piece.
  double jerk_energy() const;
};

/// Piecewise-quintic trajectory, C^2 at the knots, queryable up to jerk.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajSegment> segments);

  bool empty() const { return segments_.empty(); }
  double duration() const { return duration_; }
  const std::vector<TrajSegment>& segments() const { return segments_; }

  Vec3 position(double t) const { return sample(t).position; }
  MotionState sample(double t) const;
  Vec3 jerk(double t) const;

  /// Closed-form integral of ||jerk||^2 over [0, T], from the coefficients.
  double jerk_energy() const;
  double mean_squared_jerk() const { return duration_ > 0 ? jerk_energy() / duration_ : 0.0; }

  MotionState start_state() const { return sample(0.0); }
  MotionState end_state() const { return sample(duration_); }

 private:
  std::vector<TrajSegment> segments_;
  std::vector<double> knot_times_;  // cumulative, size = segments + 1
  double duration_ = 0.0;
};

}  // namespace mpb
