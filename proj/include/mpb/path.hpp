#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpb/types.hpp"

namespace mpb {

struct PlannerBudget {
  double timeout_s = 0.2;
  double goal_threshold_m = 1.0;
  // When false, planners rely solely on their deterministic iteration or
  // expansion budgets (calibrated to fit timeout_s on desk hardware) and skip
  // the wall-clock break. Suite runs disable it so that reruns and different
  // parallelism degrees produce identical results.
  bool enforce_wall_clock = true;

  void validate() const {
    if (!(timeout_s > 0.0) || !(goal_threshold_m > 0.0)) {
      throw ConfigError("PlannerBudget: timeout and goal threshold must be > 0");
    }
  }
};

enum class PlanStatus { kSuccess, kInfeasible, kTimeout };

inline const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::kSuccess: return "success";
    case PlanStatus::kInfeasible: return "infeasible";
    case PlanStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

struct Path {
  std::vector<Vec3> waypoints;
  double cost = 0.0;  // length, m
  std::string planner;
  double compute_time_s = 0.0;

  double length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      len += (waypoints[i] - waypoints[i - 1]).norm();
    }
    return len;
  }
};

/// Exact grid-path cost as integer move counts: cost = res * (n1 + n2*sqrt(2)
/// + n3*sqrt(3)). Two grid paths have equal length iff their triples match,
/// which sidesteps floating-point summation order.
struct GridCost {
  std::int64_t straight = 0;
  std::int64_t diag2 = 0;
  std::int64_t diag3 = 0;

  double value(double resolution) const;
  bool operator==(const GridCost&) const = default;
};

struct PlanResult {
  PlanStatus status = PlanStatus::kInfeasible;
  Path path;
  GridCost grid_cost;      // JPS only
  std::int64_t expansions = 0;
  std::int64_t iterations = 0;
};

}  // namespace mpb
