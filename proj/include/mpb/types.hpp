#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpb {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;

/// Raised when a spec/config value violates its documented contract.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an operation precondition is violated by the caller.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Raised by file loaders; carries the 1-based line where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a metric is undefined for the given environment
/// (e.g. clutter of an obstacle-free map).
class UndefinedMetricError : public std::domain_error {
 public:
  explicit UndefinedMetricError(const std::string& what) : std::domain_error(what) {}
};

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  bool all_finite() const {
    for (const Vec3& p : points) {
      if (!p.allFinite()) return false;
    }
    return true;
  }
};

/// Axis-aligned workspace box. Half-open on the max side for membership tests.
struct Bounds {
  Vec3 min_corner{0.0, 0.0, 0.0};
  Vec3 max_corner{20.0, 10.0, 5.0};

  Vec3 extent() const { return max_corner - min_corner; }

  bool valid() const {
    return min_corner.allFinite() && max_corner.allFinite() &&
           (max_corner.array() > min_corner.array()).all();
  }

  bool contains(const Vec3& p) const {
    return (p.array() >= min_corner.array()).all() && (p.array() < max_corner.array()).all();
  }

  Vec3 center() const { return 0.5 * (min_corner + max_corner); }

  double volume() const { return extent().prod(); }
};

struct QuadrotorSpec {
  double radius = 0.2;      // m
  double v_max = 3.0;       // m/s
  double a_max = 2.0;       // m/s^2
  double mass = 1.5;        // kg
  double max_thrust = 31.0; // N

  void validate() const {
    if (!(radius > 0 && v_max > 0 && a_max > 0 && mass > 0 && max_thrust > 0)) {
      throw ConfigError("QuadrotorSpec fields must all be strictly positive");
    }
  }
};

}  // namespace mpb
