#include "mpb/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpb {

namespace {

int axis_cells(double extent, double resolution) {
  // Tolerant ceil so that exact multiples (20 / 0.2) do not gain a cell
  // from floating-point rounding.
  return std::max(1, static_cast<int>(std::ceil(extent / resolution - 1e-9)));
}

// Index along one axis with lower-index tie-breaking: cell i owns
// (i*res, (i+1)*res], except cell 0 which also owns its lower face.
int bin_axis(double offset, double resolution, int dims) {
  const double v = offset / resolution;
  int i = static_cast<int>(std::ceil(v)) - 1;
  return std::clamp(i, 0, dims - 1);
}

}  // namespace

VoxelGrid::VoxelGrid(const Bounds& bounds, double resolution)
    : bounds_(bounds), resolution_(resolution) {
  if (!(resolution > 0.0)) throw ConfigError("VoxelGrid: resolution must be > 0");
  if (!bounds.valid()) throw ConfigError("VoxelGrid: bounds must satisfy max > min");
  const Vec3 extent = bounds.extent();
  for (int k = 0; k < 3; ++k) dims_[k] = axis_cells(extent[k], resolution);
  occupancy_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0);
}

void VoxelGrid::set_occupied(int i, int j, int k, bool value) {
  std::uint8_t& cell = occupancy_[index(i, j, k)];
  occupied_count_ += static_cast<std::int64_t>(value) - static_cast<std::int64_t>(cell != 0);
  cell = value ? 1 : 0;
}

std::optional<Vec3i> VoxelGrid::cell_of(const Vec3& p) const {
  if (!bounds_.contains(p)) return std::nullopt;
  Vec3i c;
  for (int k = 0; k < 3; ++k) {
    c[k] = bin_axis(p[k] - bounds_.min_corner[k], resolution_, dims_[k]);
  }
  return c;
}

void VoxelGrid::recount() {
  occupied_count_ = 0;
  for (std::uint8_t v : occupancy_) occupied_count_ += (v != 0);
}

VoxelGrid discretize(const PointCloud& cloud, const Bounds& bounds, double resolution,
                     std::int64_t* dropped) {
  if (!cloud.all_finite()) throw ConfigError("discretize: cloud contains non-finite coordinates");
  VoxelGrid grid(bounds, resolution);
  std::int64_t outside = 0;
  for (const Vec3& p : cloud.points) {
    std::optional<Vec3i> c = grid.cell_of(p);
    if (!c) {
      ++outside;
      continue;
    }
    if (!grid.occupied(*c)) grid.set_occupied((*c)[0], (*c)[1], (*c)[2]);
  }
  if (dropped) *dropped = outside;
  return grid;
}

namespace edt_detail {

// Large finite stand-in for "no site on this line"; keeps the parabola
// arithmetic free of inf - inf.
inline constexpr double kFar = 1e30;

// 1D squared-distance transform (lower envelope of parabolas), in cell units.
// f and out may not alias. n <= a few thousand here.
inline void envelope_1d(const double* f, double* out, int* v, double* z, int n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
          (2.0 * q - 2.0 * p);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double d = static_cast<double>(q) - v[k];
    out[q] = d * d + f[v[k]];
  }
}

struct LineScratch {
  std::vector<double> f, g;
  std::vector<int> v;
  std::vector<double> z;
  void resize(int n) {
    f.resize(n);
    g.resize(n);
    v.resize(n);
    z.resize(n + 1);
  }
};

template <bool Parallel>
DistanceField edt_impl(const VoxelGrid& grid) {
  if (grid.occupied_count() == 0) {
    throw UndefinedMetricError("distance_transform: grid has no occupied cells");
  }
  const Vec3i dims = grid.dims();
  const int nx = dims[0], ny = dims[1], nz = dims[2];
  DistanceField field;
  field.bounds = grid.bounds();
  field.resolution = grid.resolution();
  field.dims = dims;
  field.distance.assign(grid.cell_count(), 0.0);
  std::vector<double>& d = field.distance;

  // Pass 1 (x): squared distance along each x-line, 0 at occupied cells.
#pragma omp parallel for collapse(2) schedule(static) if (Parallel)
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      LineScratch s;
      s.resize(nx);
      const std::size_t base = grid.index(0, j, k);
      for (int i = 0; i < nx; ++i) s.f[i] = grid.raw()[base + i] ? 0.0 : kFar;
      envelope_1d(s.f.data(), s.g.data(), s.v.data(), s.z.data(), nx);
      for (int i = 0; i < nx; ++i) d[base + i] = s.g[i];
    }
  }

  // Pass 2 (y).
#pragma omp parallel for collapse(2) schedule(static) if (Parallel)
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nx; ++i) {
      LineScratch s;
      s.resize(ny);
      for (int j = 0; j < ny; ++j) s.f[j] = d[field.index(i, j, k)];
      envelope_1d(s.f.data(), s.g.data(), s.v.data(), s.z.data(), ny);
      for (int j = 0; j < ny; ++j) d[field.index(i, j, k)] = s.g[j];
    }
  }

  // Pass 3 (z), then convert squared cell units to meters.
  const double res = grid.resolution();
#pragma omp parallel for collapse(2) schedule(static) if (Parallel)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      LineScratch s;
      s.resize(nz);
      for (int k = 0; k < nz; ++k) s.f[k] = d[field.index(i, j, k)];
      envelope_1d(s.f.data(), s.g.data(), s.v.data(), s.z.data(), nz);
      for (int k = 0; k < nz; ++k) d[field.index(i, j, k)] = res * std::sqrt(s.g[k]);
    }
  }
  return field;
}

template <bool Parallel>
VoxelGrid inflate_impl(const VoxelGrid& grid, double margin) {
  if (margin < 0.0) throw ContractError("inflate: margin must be >= 0");
  if (margin == 0.0 || grid.occupied_count() == 0) return grid;
  const DistanceField field = edt_impl<Parallel>(grid);
  VoxelGrid out(grid.bounds(), grid.resolution());
  const double threshold = margin + kInflateSlack;
  std::vector<std::uint8_t>& occ = out.raw();
  const std::int64_t n = static_cast<std::int64_t>(field.distance.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    occ[static_cast<std::size_t>(c)] = field.distance[static_cast<std::size_t>(c)] <= threshold;
  }
  out.recount();
  return out;
}

}  // namespace edt_detail

DistanceField distance_transform(const VoxelGrid& grid) {
  return edt_detail::edt_impl<true>(grid);
}

VoxelGrid inflate(const VoxelGrid& grid, double margin) {
  return edt_detail::inflate_impl<true>(grid, margin);
}

namespace serial {

DistanceField distance_transform(const VoxelGrid& grid) {
  return edt_detail::edt_impl<false>(grid);
}

VoxelGrid inflate(const VoxelGrid& grid, double margin) {
  return edt_detail::inflate_impl<false>(grid, margin);
}

}  // namespace serial

}  // namespace mpb
