#include "mpb/validation.hpp"

#include <cmath>

namespace mpb {

PathValidation validate_path(const std::vector<Vec3>& waypoints, const VoxelGrid& inflated_grid) {
  PathValidation v;
  if (waypoints.size() < 2) {
    v.ok = false;
    v.reason = "fewer than 2 waypoints";
    return v;
  }
  for (const Vec3& p : waypoints) {
    if (!p.allFinite()) {
      v.ok = false;
      v.reason = "non-finite waypoint";
      return v;
    }
  }
  const double step = inflated_grid.resolution() / 2.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const Vec3 a = waypoints[i];
    const Vec3 b = waypoints[i + 1];
    const double len = (b - a).norm();
    if (len < 1e-12) {
      v.ok = false;
      v.reason = "duplicate consecutive waypoints";
      return v;
    }
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int s = 0; s <= n; ++s) {
      const Vec3 p = a + (b - a) * (static_cast<double>(s) / n);
      if (!inflated_grid.free_at(p)) {
        v.ok = false;
        v.reason = "segment " + std::to_string(i) + " enters occupied space";
        return v;
      }
    }
  }
  return v;
}

}  // namespace mpb
