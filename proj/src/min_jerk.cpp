#include "mpb/min_jerk.hpp"

#include <cmath>

namespace mpb {

namespace {

// Quintic coefficients matching boundary values z = (p0, v0, a0, p1, v1, a1)
// over [0, T]: the first three follow directly, the last three solve a 3x3
// system in the end conditions.
Eigen::Matrix<double, 6, 1> hermite_coeffs(const Eigen::Matrix<double, 6, 1>& z, double T) {
  Eigen::Matrix<double, 6, 1> c;
  c[0] = z[0];
  c[1] = z[1];
  c[2] = z[2] / 2.0;
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  Eigen::Matrix3d m;
  m << T3, T4, T5, 3 * T2, 4 * T3, 5 * T4, 6 * T, 12 * T2, 20 * T3;
  Eigen::Vector3d rhs;
  rhs[0] = z[3] - (c[0] + c[1] * T + c[2] * T2);
  rhs[1] = z[4] - (c[1] + 2.0 * c[2] * T);
  rhs[2] = z[5] - 2.0 * c[2];
  const Eigen::Vector3d tail = m.partialPivLu().solve(rhs);
  c[3] = tail[0];
  c[4] = tail[1];
  c[5] = tail[2];
  return c;
}

double segment_energy(const Eigen::Matrix<double, 6, 1>& z, double T) {
  const Eigen::Matrix<double, 6, 1> c = hermite_coeffs(z, T);
  const double j0 = 6.0 * c[3], j1 = 24.0 * c[4], j2 = 60.0 * c[5];
  const double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  return j0 * j0 * T + j0 * j1 * T2 + (j1 * j1 + 2.0 * j0 * j2) * T3 / 3.0 + j1 * j2 * T4 / 2.0 +
         j2 * j2 * T5 / 5.0;
}

// The energy is an exact quadratic form z' K z; recover K by evaluating on
// basis vectors (no finite-difference error for quadratics).
Eigen::Matrix<double, 6, 6> energy_quadratic(double T) {
  Eigen::Matrix<double, 6, 6> K;
  double diag[6];
  for (int i = 0; i < 6; ++i) {
    Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
    e[i] = 1.0;
    diag[i] = segment_energy(e, T);
    K(i, i) = diag[i];
  }
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
      e[i] = 1.0;
      e[j] = 1.0;
      const double both = segment_energy(e, T);
      K(i, j) = K(j, i) = (both - diag[i] - diag[j]) / 2.0;
    }
  }
  return K;
}

}  // namespace

std::vector<double> allocate_times(const std::vector<Vec3>& waypoints, double v_max,
                                   double a_max) {
  if (waypoints.size() < 2) throw ContractError("allocate_times: need at least two waypoints");
  if (!(v_max > 0.0) || !(a_max > 0.0)) throw ContractError("allocate_times: limits must be > 0");
  std::vector<double> durations;
  durations.reserve(waypoints.size() - 1);
  const double cruise = v_max * v_max / a_max;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const double L = (waypoints[i + 1] - waypoints[i]).norm();
    if (L <= 0.0) throw ContractError("allocate_times: zero-length segment");
    durations.push_back(L >= cruise ? L / v_max + v_max / a_max : 2.0 * std::sqrt(L / a_max));
  }
  return durations;
}

MinJerkSolver::MinJerkSolver(std::vector<double> durations, int waypoint_count)
    : durations_(std::move(durations)), waypoints_(waypoint_count) {
  if (waypoints_ < 2 || static_cast<int>(durations_.size()) != waypoints_ - 1) {
    throw ContractError("MinJerkSolver: waypoint count must equal segment count + 1");
  }
  for (double T : durations_) {
    if (!(T > 0.0)) throw ContractError("MinJerkSolver: durations must be > 0");
    seg_quadratic_.push_back(energy_quadratic(T));
  }

  const int interior = waypoints_ - 2;
  if (interior == 0) return;
  // Unknowns per axis: (v_i, a_i) at each interior knot.
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * interior, 2 * interior);
  for (int s = 0; s < static_cast<int>(durations_.size()); ++s) {
    const Eigen::Matrix<double, 6, 6>& K = seg_quadratic_[s];
    // z layout: (p0, v0, a0, p1, v1, a1); unknown slots map to global vars.
    auto var_of = [&](int zi) -> int {
      const int knot = zi < 3 ? s : s + 1;
      if (knot == 0 || knot == waypoints_ - 1) return -1;  // boundary: fixed
      const int comp = zi % 3;                             // 0 = p (fixed), 1 = v, 2 = a
      if (comp == 0) return -1;
      return 2 * (knot - 1) + (comp - 1);
    };
    for (int zi = 0; zi < 6; ++zi) {
      const int vi = var_of(zi);
      if (vi < 0) continue;
      for (int zj = 0; zj < 6; ++zj) {
        const int vj = var_of(zj);
        if (vj < 0) continue;
        H(vi, vj) += K(zi, zj);
      }
    }
  }
  factorization_.compute(H);
  if (factorization_.info() != Eigen::Success) {
    throw ContractError("MinJerkSolver: singular normal equations");
  }
}

Trajectory MinJerkSolver::solve(const std::vector<Vec3>& waypoints, const MotionState& start,
                                const MotionState& end) const {
  if (static_cast<int>(waypoints.size()) != waypoints_) {
    throw ContractError("MinJerkSolver: waypoint count mismatch");
  }
  const int interior = waypoints_ - 2;
  const int segments = waypoints_ - 1;

  // Knot states: positions fixed; interior velocities/accelerations solved.
  Eigen::MatrixXd knot_v = Eigen::MatrixXd::Zero(waypoints_, 3);
  Eigen::MatrixXd knot_a = Eigen::MatrixXd::Zero(waypoints_, 3);
  knot_v.row(0) = start.velocity.transpose();
  knot_a.row(0) = start.acceleration.transpose();
  knot_v.row(waypoints_ - 1) = end.velocity.transpose();
  knot_a.row(waypoints_ - 1) = end.acceleration.transpose();

  if (interior > 0) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2 * interior, 3);
    for (int s = 0; s < segments; ++s) {
      const Eigen::Matrix<double, 6, 6>& K = seg_quadratic_[s];
      for (int axis = 0; axis < 3; ++axis) {
        // Known entries of z for this axis (positions always; boundary
        // velocity/acceleration on the first and last segment).
        double known[6] = {waypoints[s][axis], 0.0, 0.0, waypoints[s + 1][axis], 0.0, 0.0};
        if (s == 0) {
          known[1] = start.velocity[axis];
          known[2] = start.acceleration[axis];
        }
        if (s == segments - 1) {
          known[4] = end.velocity[axis];
          known[5] = end.acceleration[axis];
        }
        auto var_of = [&](int zi) -> int {
          const int knot = zi < 3 ? s : s + 1;
          if (knot == 0 || knot == waypoints_ - 1) return -1;
          const int comp = zi % 3;
          if (comp == 0) return -1;
          return 2 * (knot - 1) + (comp - 1);
        };
        for (int zi = 0; zi < 6; ++zi) {
          const int vi = var_of(zi);
          if (vi < 0) continue;
          for (int zj = 0; zj < 6; ++zj) {
            if (var_of(zj) >= 0) continue;  // unknown-unknown lives in H
            rhs(vi, axis) -= K(zi, zj) * known[zj];
          }
        }
      }
    }
    const Eigen::MatrixXd y = factorization_.solve(rhs);
    for (int k = 0; k < interior; ++k) {
      knot_v.row(k + 1) = y.row(2 * k);
      knot_a.row(k + 1) = y.row(2 * k + 1);
    }
  }

  std::vector<TrajSegment> out;
  out.reserve(segments);
  for (int s = 0; s < segments; ++s) {
    TrajSegment seg;
    seg.duration = durations_[s];
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::Matrix<double, 6, 1> z;
      z << waypoints[s][axis], knot_v(s, axis), knot_a(s, axis), waypoints[s + 1][axis],
          knot_v(s + 1, axis), knot_a(s + 1, axis);
      seg.coeffs.row(axis) = hermite_coeffs(z, durations_[s]).transpose();
    }
    out.push_back(seg);
  }
  return Trajectory(std::move(out));
}

Trajectory min_jerk_fit(const std::vector<Vec3>& waypoints, const std::vector<double>& durations,
                        const MotionState& start, const MotionState& end) {
  MinJerkSolver solver(durations, static_cast<int>(waypoints.size()));
  return solver.solve(waypoints, start, end);
}

Trajectory min_jerk_fit(const std::vector<Vec3>& waypoints, const std::vector<double>& durations) {
  MotionState start = MotionState::rest(waypoints.front());
  MotionState end = MotionState::rest(waypoints.back());
  return min_jerk_fit(waypoints, durations, start, end);
}

}  // namespace mpb
