#include "mpb/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace mpb {

namespace {

inline void powers(double tau, double* p) {
  p[0] = 1.0;
  for (int i = 1; i < 6; ++i) p[i] = p[i - 1] * tau;
}

}  // namespace

Vec3 TrajSegment::position(double tau) const {
  double p[6];
  powers(tau, p);
  Vec3 out = Vec3::Zero();
  for (int m = 0; m < 6; ++m) out += coeffs.col(m) * p[m];
  return out;
}

Vec3 TrajSegment::velocity(double tau) const {
  double p[6];
  powers(tau, p);
  Vec3 out = Vec3::Zero();
  for (int m = 1; m < 6; ++m) out += coeffs.col(m) * (m * p[m - 1]);
  return out;
}

Vec3 TrajSegment::acceleration(double tau) const {
  double p[6];
  powers(tau, p);
  Vec3 out = Vec3::Zero();
  for (int m = 2; m < 6; ++m) out += coeffs.col(m) * (m * (m - 1) * p[m - 2]);
  return out;
}

Vec3 TrajSegment::jerk(double tau) const {
  // x''' = 6 c3 + 24 c4 tau + 60 c5 tau^2
  return 6.0 * coeffs.col(3) + 24.0 * coeffs.col(4) * tau + 60.0 * coeffs.col(5) * tau * tau;
}

double TrajSegment::jerk_energy() const {
  const double T = duration;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double j0 = 6.0 * coeffs(axis, 3);
    const double j1 = 24.0 * coeffs(axis, 4);
    const double j2 = 60.0 * coeffs(axis, 5);
    total += j0 * j0 * T + j0 * j1 * T2 + (j1 * j1 + 2.0 * j0 * j2) * T3 / 3.0 +
             j1 * j2 * T4 / 2.0 + j2 * j2 * T5 / 5.0;
  }
  return total;
}

Trajectory::Trajectory(std::vector<TrajSegment> segments) : segments_(std::move(segments)) {
  knot_times_.push_back(0.0);
  for (const TrajSegment& s : segments_) {
    if (!(s.duration > 0.0)) throw ContractError("Trajectory: segment durations must be > 0");
    duration_ += s.duration;
    knot_times_.push_back(duration_);
  }
}

MotionState Trajectory::sample(double t) const {
  if (segments_.empty()) throw ContractError("Trajectory: empty");
  t = std::clamp(t, 0.0, duration_);
  auto it = std::upper_bound(knot_times_.begin(), knot_times_.end(), t);
  int idx = std::max(0, static_cast<int>(it - knot_times_.begin()) - 1);
  idx = std::min(idx, static_cast<int>(segments_.size()) - 1);
  const double tau = t - knot_times_[idx];
  MotionState s;
  s.position = segments_[idx].position(tau);
  s.velocity = segments_[idx].velocity(tau);
  s.acceleration = segments_[idx].acceleration(tau);
  return s;
}

Vec3 Trajectory::jerk(double t) const {
  if (segments_.empty()) throw ContractError("Trajectory: empty");
  t = std::clamp(t, 0.0, duration_);
  auto it = std::upper_bound(knot_times_.begin(), knot_times_.end(), t);
  int idx = std::max(0, static_cast<int>(it - knot_times_.begin()) - 1);
  idx = std::min(idx, static_cast<int>(segments_.size()) - 1);
  return segments_[idx].jerk(t - knot_times_[idx]);
}

double Trajectory::jerk_energy() const {
  double total = 0.0;
  for (const TrajSegment& s : segments_) total += s.jerk_energy();
  return total;
}

}  // namespace mpb
