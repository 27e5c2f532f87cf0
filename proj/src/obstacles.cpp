#include "mpb/obstacles.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "mpb/rng.hpp"

namespace mpb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPlacementAttempts = 256;

struct YawFrame {
  double c = 1.0, s = 0.0;
  Vec3 center{0, 0, 0};

  Vec3 to_world(const Vec3& local) const {
    return center + Vec3(c * local[0] - s * local[1], s * local[0] + c * local[1], local[2]);
  }
};

int steps_for(double length, double spacing, int minimum) {
  return std::max(minimum, static_cast<int>(std::ceil(length / spacing)));
}

// ---- surface samplers (points lie exactly on the analytic surface) ----

void sample_cylinder(double radius, double height, double spacing, const YawFrame& f,
                     PointCloud& out) {
  const int n_theta = steps_for(2.0 * kPi * radius, spacing, 8);
  const int n_z = steps_for(height, spacing, 1);
  for (int it = 0; it < n_theta; ++it) {
    const double theta = 2.0 * kPi * it / n_theta;
    const double x = radius * std::cos(theta);
    const double y = radius * std::sin(theta);
    for (int iz = 0; iz <= n_z; ++iz) {
      out.points.push_back(f.to_world(Vec3(x, y, height * iz / n_z - height / 2.0)));
    }
  }
}

void sample_ellipsoid(const Vec3& semi, double spacing, const YawFrame& f, PointCloud& out) {
  const double a = std::max({semi[0], semi[1], semi[2]});
  const int n_phi = steps_for(kPi * a, spacing, 4);
  const int n_theta = steps_for(2.0 * kPi * a, spacing, 8);
  for (int ip = 0; ip <= n_phi; ++ip) {
    const double phi = kPi * ip / n_phi;
    for (int it = 0; it < n_theta; ++it) {
      const double theta = 2.0 * kPi * it / n_theta;
      out.points.push_back(f.to_world(Vec3(semi[0] * std::cos(theta) * std::sin(phi),
                                           semi[1] * std::sin(theta) * std::sin(phi),
                                           semi[2] * std::cos(phi))));
    }
  }
}

void sample_box(const Vec3& edges, double spacing, const YawFrame& f, PointCloud& out) {
  const Vec3 h = edges / 2.0;
  int n[3];
  for (int k = 0; k < 3; ++k) n[k] = steps_for(edges[k], spacing, 1);
  auto face = [&](int axis_u, int axis_v, int fixed, double sign) {
    for (int iu = 0; iu <= n[axis_u]; ++iu) {
      for (int iv = 0; iv <= n[axis_v]; ++iv) {
        Vec3 p;
        p[axis_u] = -h[axis_u] + edges[axis_u] * iu / n[axis_u];
        p[axis_v] = -h[axis_v] + edges[axis_v] * iv / n[axis_v];
        p[fixed] = sign * h[fixed];
        out.points.push_back(f.to_world(p));
      }
    }
  };
  face(1, 2, 0, -1.0);
  face(1, 2, 0, 1.0);
  face(0, 2, 1, -1.0);
  face(0, 2, 1, 1.0);
  face(0, 1, 2, -1.0);
  face(0, 1, 2, 1.0);
}

// Ring standing vertically: torus in the local x-z plane, hole along y.
void sample_gate(double ring_radius, double tube_radius, double spacing, const YawFrame& f,
                 PointCloud& out) {
  const int n_u = steps_for(2.0 * kPi * (ring_radius + tube_radius), spacing, 12);
  const int n_v = steps_for(2.0 * kPi * tube_radius, spacing, 6);
  for (int iu = 0; iu < n_u; ++iu) {
    const double u = 2.0 * kPi * iu / n_u;
    for (int iv = 0; iv < n_v; ++iv) {
      const double v = 2.0 * kPi * iv / n_v;
      const double arm = ring_radius + tube_radius * std::cos(v);
      out.points.push_back(
          f.to_world(Vec3(arm * std::cos(u), tube_radius * std::sin(v), arm * std::sin(u))));
    }
  }
}

// ---- solid lattices (fill_interior mode) ----

template <typename Inside>
void sample_solid(const Vec3& half_extent, double spacing, const YawFrame& f, Inside inside,
                  PointCloud& out) {
  int n[3];
  for (int k = 0; k < 3; ++k) n[k] = steps_for(2.0 * half_extent[k], spacing, 1);
  for (int ix = 0; ix <= n[0]; ++ix) {
    for (int iy = 0; iy <= n[1]; ++iy) {
      for (int iz = 0; iz <= n[2]; ++iz) {
        const Vec3 p(-half_extent[0] + 2.0 * half_extent[0] * ix / n[0],
                     -half_extent[1] + 2.0 * half_extent[1] * iy / n[1],
                     -half_extent[2] + 2.0 * half_extent[2] * iz / n[2]);
        if (inside(p)) out.points.push_back(f.to_world(p));
      }
    }
  }
}

// Axis-aligned half extent of the yawed shape, used for in-bounds placement.
Vec3 yawed_half_extent(const Vec3& local_half, double yaw) {
  const double c = std::abs(std::cos(yaw)), s = std::abs(std::sin(yaw));
  return Vec3(c * local_half[0] + s * local_half[1], s * local_half[0] + c * local_half[1],
              local_half[2]);
}

}  // namespace

void ObstacleSpec::validate() const {
  if (cylinders < 0 || ellipsoids < 0 || boxes < 0 || gates < 0) {
    throw ConfigError("ObstacleSpec: counts must be >= 0");
  }
  auto check = [](const SizeRange& r, const char* name) {
    if (!r.valid()) throw ConfigError(std::string("ObstacleSpec: invalid size range for ") + name);
  };
  if (cylinders > 0) {
    check(cylinder_radius, "cylinder_radius");
    check(cylinder_height, "cylinder_height");
  }
  if (ellipsoids > 0) check(ellipsoid_semi_axis, "ellipsoid_semi_axis");
  if (boxes > 0) check(box_edge, "box_edge");
  if (gates > 0) {
    check(gate_ring_radius, "gate_ring_radius");
    check(gate_tube_radius, "gate_tube_radius");
  }
  if (!(point_spacing > 0.0)) throw ConfigError("ObstacleSpec: point_spacing must be > 0");
  if (placement_margin < 0.0) throw ConfigError("ObstacleSpec: placement_margin must be >= 0");
}

PointCloud generate_obstacle_map(const ObstacleSpec& spec, const Bounds& bounds) {
  spec.validate();
  if (!bounds.valid()) throw ConfigError("generate_obstacle_map: invalid bounds");
  Rng rng(mix_seed(spec.seed, 2));
  PointCloud cloud;

  // Uniform center position such that the yawed bounding box (plus margin)
  // stays inside bounds; nullopt when the shape cannot fit.
  auto place = [&](const Vec3& half_extent) -> std::optional<Vec3> {
    Vec3 lo = bounds.min_corner + half_extent + Vec3::Constant(spec.placement_margin);
    Vec3 hi = bounds.max_corner - half_extent - Vec3::Constant(spec.placement_margin);
    if ((lo.array() > hi.array()).any()) return std::nullopt;
    Vec3 c;
    for (int k = 0; k < 3; ++k) c[k] = rng.uniform(lo[k], hi[k]);
    return c;
  };

  auto sample_size = [&](const SizeRange& r) { return rng.uniform(r.lo, r.hi); };

  for (int i = 0; i < spec.cylinders; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const double r = sample_size(spec.cylinder_radius);
      const double h = sample_size(spec.cylinder_height);
      YawFrame f;
      if (auto c = place(Vec3(r, r, h / 2.0))) {
        f.center = *c;
        if (spec.fill_interior) {
          sample_solid(Vec3(r, r, h / 2.0), spec.point_spacing, f,
                       [&](const Vec3& p) { return p[0] * p[0] + p[1] * p[1] <= r * r; }, cloud);
        } else {
          sample_cylinder(r, h, spec.point_spacing, f, cloud);
        }
        placed = true;
      }
    }
    if (!placed) throw ConfigError("generate_obstacle_map: cylinder does not fit in bounds");
  }

  for (int i = 0; i < spec.ellipsoids; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Vec3 semi(sample_size(spec.ellipsoid_semi_axis), sample_size(spec.ellipsoid_semi_axis),
                      sample_size(spec.ellipsoid_semi_axis));
      YawFrame f;
      if (auto c = place(semi)) {
        f.center = *c;
        if (spec.fill_interior) {
          sample_solid(semi, spec.point_spacing, f,
                       [&](const Vec3& p) {
                         return (p.array() / semi.array()).matrix().squaredNorm() <= 1.0;
                       },
                       cloud);
        } else {
          sample_ellipsoid(semi, spec.point_spacing, f, cloud);
        }
        placed = true;
      }
    }
    if (!placed) throw ConfigError("generate_obstacle_map: ellipsoid does not fit in bounds");
  }

  for (int i = 0; i < spec.boxes; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const Vec3 edges(sample_size(spec.box_edge), sample_size(spec.box_edge),
                       sample_size(spec.box_edge));
      const double yaw = rng.uniform(0.0, 2.0 * kPi);
      YawFrame f;
      f.c = std::cos(yaw);
      f.s = std::sin(yaw);
      if (auto c = place(yawed_half_extent(edges / 2.0, yaw))) {
        f.center = *c;
        if (spec.fill_interior) {
          sample_solid(edges / 2.0, spec.point_spacing, f,
                       [&](const Vec3& p) {
                         return (p.array().abs() <= (edges / 2.0).array() + 1e-12).all();
                       },
                       cloud);
        } else {
          sample_box(edges, spec.point_spacing, f, cloud);
        }
        placed = true;
      }
    }
    if (!placed) throw ConfigError("generate_obstacle_map: box does not fit in bounds");
  }

  for (int i = 0; i < spec.gates; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      const double R = sample_size(spec.gate_ring_radius);
      const double rt = sample_size(spec.gate_tube_radius);
      const double yaw = rng.uniform(0.0, 2.0 * kPi);
      YawFrame f;
      f.c = std::cos(yaw);
      f.s = std::sin(yaw);
      if (auto c = place(yawed_half_extent(Vec3(R + rt, rt, R + rt), yaw))) {
        f.center = *c;
        if (spec.fill_interior) {
          sample_solid(Vec3(R + rt, rt, R + rt), spec.point_spacing, f,
                       [&](const Vec3& p) {
                         const double arm = std::sqrt(p[0] * p[0] + p[2] * p[2]) - R;
                         return arm * arm + p[1] * p[1] <= rt * rt;
                       },
                       cloud);
        } else {
          sample_gate(R, rt, spec.point_spacing, f, cloud);
        }
        placed = true;
      }
    }
    if (!placed) throw ConfigError("generate_obstacle_map: gate does not fit in bounds");
  }

  return cloud;
}

}  // namespace mpb
