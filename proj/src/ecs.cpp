#include "mpb/ecs.hpp"

#include <algorithm>
#include <cmath>

namespace mpb {

VoxelGrid ecs_grid(const PointCloud& cloud, const Bounds& bounds, const QuadrotorSpec& quad) {
  quad.validate();
  return discretize(cloud, bounds, quad.radius);
}

double density_index(const VoxelGrid& grid, const QuadrotorSpec& quad) {
  if (std::abs(grid.resolution() - quad.radius) > 1e-12) {
    throw ContractError("density_index: grid resolution must equal the quadrotor radius");
  }
  const double r = quad.radius;
  const Vec3 s = grid.bounds().extent();
  return r * r * r * static_cast<double>(grid.occupied_count()) / (s[0] * s[1] * s[2]);
}

namespace {

template <bool Parallel>
ClutterIndex clutter_impl(const VoxelGrid& grid, const QuadrotorSpec& quad) {
  quad.validate();
  if (grid.occupied_count() == 0) {
    throw UndefinedMetricError("clutter_index: no occupied cells");
  }
  if (grid.occupied_count() == static_cast<std::int64_t>(grid.cell_count())) {
    throw UndefinedMetricError("clutter_index: no free cells");
  }
  const DistanceField field =
      Parallel ? distance_transform(grid) : serial::distance_transform(grid);
  const std::int64_t n = static_cast<std::int64_t>(grid.cell_count());
  double dispersion = 0.0;
#pragma omp parallel for reduction(max : dispersion) schedule(static) if (Parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    if (!grid.raw()[idx]) dispersion = std::max(dispersion, field.distance[idx]);
  }
  ClutterIndex out;
  out.dispersion_m = dispersion;
  out.raw = quad.radius / dispersion;
  out.quad_fits = out.raw <= 1.0;
  out.clamped = std::min(out.raw, 1.0);
  return out;
}

template <bool Parallel>
double structure_impl(const VoxelGrid& grid, Connectivity conn) {
  const std::int64_t occupied = grid.occupied_count();
  if (occupied == 0) throw UndefinedMetricError("structure_index: no occupied cells");
  const Vec3i dims = grid.dims();
  std::int64_t exposed = 0;
#pragma omp parallel for collapse(2) reduction(+ : exposed) schedule(static) if (Parallel)
  for (int k = 0; k < dims[2]; ++k) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        if (!grid.occupied(i, j, k)) continue;
        bool has_free_neighbor = false;
        if (conn == Connectivity::kFace6) {
          static constexpr int off[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                            {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
          for (const auto& o : off) {
            const int ni = i + o[0], nj = j + o[1], nk = k + o[2];
            if (grid.in_grid(ni, nj, nk) && !grid.occupied(ni, nj, nk)) {
              has_free_neighbor = true;
              break;
            }
          }
        } else {
          for (int dz = -1; dz <= 1 && !has_free_neighbor; ++dz) {
            for (int dy = -1; dy <= 1 && !has_free_neighbor; ++dy) {
              for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const int ni = i + dx, nj = j + dy, nk = k + dz;
                if (grid.in_grid(ni, nj, nk) && !grid.occupied(ni, nj, nk)) {
                  has_free_neighbor = true;
                  break;
                }
              }
            }
          }
        }
        exposed += has_free_neighbor;
      }
    }
  }
  return static_cast<double>(exposed) / static_cast<double>(occupied);
}

}  // namespace

ClutterIndex clutter_index(const VoxelGrid& grid, const QuadrotorSpec& quad) {
  return clutter_impl<true>(grid, quad);
}

double structure_index(const VoxelGrid& grid, Connectivity conn) {
  return structure_impl<true>(grid, conn);
}

namespace serial {

ClutterIndex clutter_index(const VoxelGrid& grid, const QuadrotorSpec& quad) {
  return clutter_impl<false>(grid, quad);
}

double structure_index(const VoxelGrid& grid, Connectivity conn) {
  return structure_impl<false>(grid, conn);
}

}  // namespace serial

EcsReport ecs(const PointCloud& cloud, const Bounds& bounds, const QuadrotorSpec& quad,
              Connectivity conn) {
  const VoxelGrid grid = ecs_grid(cloud, bounds, quad);
  EcsReport report;
  report.occupied = grid.occupied_count();
  report.resolution = grid.resolution();
  report.signature.density = density_index(grid, quad);
  const ClutterIndex c = clutter_index(grid, quad);
  report.signature.clutter = c.clamped;
  report.clutter_raw = c.raw;
  report.dispersion_m = c.dispersion_m;
  report.quad_fits = c.quad_fits;
  report.signature.structure = structure_index(grid, conn);
  return report;
}

}  // namespace mpb
