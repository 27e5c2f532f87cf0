#include "mpb/collision.hpp"

#include <algorithm>
#include <cmath>

namespace mpb {

namespace {

// Cells along one axis whose closed 1-D interval contains coordinate v
// (grid-local units of cells). One cell normally, two when v sits on a face
// within kBoundaryTol.
inline int touched_axis(double v, int out[2]) {
  const double r = std::round(v);
  if (std::abs(v - r) <= kBoundaryTol) {
    const int i = static_cast<int>(r);
    out[0] = i - 1;
    out[1] = i;
    return 2;
  }
  out[0] = static_cast<int>(std::floor(v));
  return 1;
}

// Visits every cell whose closed region the segment touches; duplicates are
// possible. The visitor gets (-1,-1,-1) for out-of-grid cells and returns
// false to stop the walk early.
template <typename Visitor>
bool walk_supercover(const VoxelGrid& grid, const Vec3& a, const Vec3& b, Visitor&& visit) {
  const double res = grid.resolution();
  const Vec3 la = (a - grid.bounds().min_corner) / res;
  const Vec3 lb = (b - grid.bounds().min_corner) / res;
  const Vec3 d = lb - la;

  double ts_local[384];
  std::vector<double> ts_heap;
  double* ts = ts_local;
  std::size_t cap = std::size(ts_local);

  // Estimate the number of plane crossings; spill to the heap for very long
  // segments.
  std::size_t bound = 2;
  for (int axis = 0; axis < 3; ++axis) {
    bound += static_cast<std::size_t>(std::abs(d[axis])) + 4;
  }
  if (bound > cap) {
    ts_heap.resize(bound);
    ts = ts_heap.data();
    cap = bound;
  }

  std::size_t n = 0;
  ts[n++] = 0.0;
  ts[n++] = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(d[axis]) < 1e-15) continue;
    const int lo = static_cast<int>(std::floor(std::min(la[axis], lb[axis])));
    const int hi = static_cast<int>(std::ceil(std::max(la[axis], lb[axis])));
    for (int plane = lo; plane <= hi; ++plane) {
      const double t = (static_cast<double>(plane) - la[axis]) / d[axis];
      if (t > 0.0 && t < 1.0 && n < cap) ts[n++] = t;
    }
  }
  std::sort(ts, ts + n);

  auto visit_point = [&](double t) {
    const Vec3 p = la + t * d;
    int cx[2], cy[2], cz[2];
    const int nx = touched_axis(p[0], cx);
    const int ny = touched_axis(p[1], cy);
    const int nz = touched_axis(p[2], cz);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        for (int k = 0; k < nz; ++k) {
          Vec3i c(cx[i], cy[j], cz[k]);
          if (!grid.in_grid(c)) c = Vec3i(-1, -1, -1);
          if (!visit(c)) return false;
        }
      }
    }
    return true;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (!visit_point(ts[i])) return false;
    if (i + 1 < n && ts[i + 1] - ts[i] > 1e-12) {
      if (!visit_point(0.5 * (ts[i] + ts[i + 1]))) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Vec3i> supercover_cells(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
  std::vector<Vec3i> cells;
  walk_supercover(grid, a, b, [&](const Vec3i& c) {
    cells.push_back(c);
    return true;
  });
  std::sort(cells.begin(), cells.end(), [](const Vec3i& u, const Vec3i& v) {
    return std::lexicographical_compare(u.data(), u.data() + 3, v.data(), v.data() + 3);
  });
  cells.erase(std::unique(cells.begin(), cells.end(),
                          [](const Vec3i& u, const Vec3i& v) {
                            return u[0] == v[0] && u[1] == v[1] && u[2] == v[2];
                          }),
              cells.end());
  return cells;
}

bool segment_free(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
  return walk_supercover(grid, a, b,
                         [&](const Vec3i& c) { return c[0] >= 0 && !grid.occupied(c); });
}

}  // namespace mpb
