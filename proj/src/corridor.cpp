#include "mpb/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mpb/collision.hpp"

namespace mpb {

namespace {

// Inclusive cell interval touched by world interval [a, b] on one axis,
// closed-touch semantics: coordinates within tolerance of a face include the
// cells on both sides. Clamped to the grid.
void touched_range(double a, double b, double origin, double res, int dims, int* lo, int* hi) {
  const double la = (std::min(a, b) - origin) / res;
  const double lb = (std::max(a, b) - origin) / res;
  int i0;
  const double ra = std::round(la);
  if (std::abs(la - ra) <= kBoundaryTol) {
    i0 = static_cast<int>(ra) - 1;
  } else {
    i0 = static_cast<int>(std::floor(la));
  }
  int i1;
  const double rb = std::round(lb);
  if (std::abs(lb - rb) <= kBoundaryTol) {
    i1 = static_cast<int>(rb);
  } else {
    i1 = static_cast<int>(std::floor(lb));
  }
  *lo = std::max(0, i0);
  *hi = std::min(dims - 1, i1);
}

struct CellBox {
  Vec3i lo, hi;  // inclusive

  bool contains(const CellBox& other) const {
    return (lo.array() <= other.lo.array()).all() && (hi.array() >= other.hi.array()).all();
  }
  bool contains_cell(const Vec3i& c) const {
    return (c.array() >= lo.array()).all() && (c.array() <= hi.array()).all();
  }
};

CellBox segment_cell_box(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
  CellBox box;
  for (int axis = 0; axis < 3; ++axis) {
    int lo, hi;
    touched_range(a[axis], b[axis], grid.bounds().min_corner[axis], grid.resolution(),
                  grid.dims()[axis], &lo, &hi);
    box.lo[axis] = lo;
    box.hi[axis] = hi;
  }
  return box;
}

bool box_free(const VoxelGrid& grid, const CellBox& box) {
  for (int k = box.lo[2]; k <= box.hi[2]; ++k) {
    for (int j = box.lo[1]; j <= box.hi[1]; ++j) {
      for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
        if (grid.occupied(i, j, k)) return false;
      }
    }
  }
  return true;
}

// One slab of cells just beyond a face; face = axis * 2 + (positive ? 1 : 0).
bool slab_free(const VoxelGrid& grid, const CellBox& box, int axis, bool positive, int* plane) {
  *plane = positive ? box.hi[axis] + 1 : box.lo[axis] - 1;
  if (*plane < 0 || *plane >= grid.dims()[axis]) return false;
  Vec3i lo = box.lo, hi = box.hi;
  lo[axis] = hi[axis] = *plane;
  return box_free(grid, CellBox{lo, hi});
}

CellBox expand_box(const VoxelGrid& grid, CellBox box) {
  bool any = true;
  while (any) {
    any = false;
    for (int face = 0; face < 6; ++face) {
      const int axis = face / 2;
      const bool positive = face % 2 == 1;
      int plane;
      if (slab_free(grid, box, axis, positive, &plane)) {
        (positive ? box.hi : box.lo)[axis] = plane;
        any = true;
      }
    }
  }
  return box;
}

}  // namespace

Polytope Polytope::from_cell_box(const VoxelGrid& grid, const Vec3i& lo_cell, const Vec3i& hi_cell,
                                 int segment_index) {
  Polytope p;
  p.lo_cell = lo_cell;
  p.hi_cell = hi_cell;
  p.segment_index = segment_index;
  const Vec3 origin = grid.bounds().min_corner;
  const double res = grid.resolution();
  p.lo = origin + lo_cell.cast<double>() * res;
  p.hi = origin + (hi_cell.cast<double>() + Vec3::Ones()) * res;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 n = Vec3::Zero();
    n[axis] = 1.0;
    p.normals.push_back(n);
    p.offsets.push_back(p.hi[axis]);
    p.normals.push_back(-n);
    p.offsets.push_back(-p.lo[axis]);
  }
  return p;
}

Corridor build_corridor(const std::vector<Vec3>& waypoints, const VoxelGrid& grid) {
  if (waypoints.size() < 2) throw ContractError("build_corridor: need at least one segment");

  Corridor corridor;

  for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
    // Greedy maximal stretch: each piece covers the longest prefix of the
    // remaining segment whose snapped bounding box is free (exponential probe
    // plus binary refinement). Single points are free for any supercover-free
    // path, so progress is guaranteed.
    const Vec3 a = waypoints[s], b = waypoints[s + 1];
    const double seg_len = (b - a).norm();
    const double min_step = std::min(1.0, 0.25 * grid.resolution() / std::max(seg_len, 1e-9));
    auto at = [&](double t) { return a + t * (b - a); };
    auto piece_free = [&](double t0, double t1) {
      return box_free(grid, segment_cell_box(grid, at(t0), at(t1)));
    };

    double t0 = 0.0;
    int guard = 0;
    while (t0 < 1.0) {
      if (++guard > 4096) throw ContractError("build_corridor: segment cover did not converge");
      if (!piece_free(t0, t0)) {
        throw ContractError("build_corridor: path segment touches occupied cells");
      }
      double good = t0, bad = -1.0;
      for (double step = min_step; good < 1.0; step *= 2.0) {
        const double probe = std::min(1.0, t0 + step);
        if (piece_free(t0, probe)) {
          good = probe;
          if (probe >= 1.0) break;
        } else {
          bad = probe;
          break;
        }
      }
      if (bad > 0.0) {
        while (bad - good > min_step) {
          const double mid = 0.5 * (good + bad);
          (piece_free(t0, mid) ? good : bad) = mid;
        }
      }
      if (good <= t0) {
        // The first probe was blocked; shrink toward the point. Any
        // supercover-free piece admits a free bounding box at small enough
        // extent, so running out of extent means the path cuts a corner.
        good = std::min(1.0, t0 + min_step);
        while (!piece_free(t0, good) && good - t0 > 1e-9) {
          good = t0 + 0.5 * (good - t0);
        }
        if (good - t0 <= 1e-9) {
          throw ContractError("build_corridor: path segment touches occupied cells");
        }
      }

      // Skip pieces already strictly covered by the previous box (the box is
      // convex, so endpoint containment suffices).
      const bool covered =
          !corridor.polytopes.empty() &&
          corridor.polytopes.back().contains(at(t0), -1e-12) &&
          corridor.polytopes.back().contains(at(good), -1e-12);
      if (!covered) {
        const CellBox seed = segment_cell_box(grid, at(t0), at(good));
        const CellBox box = expand_box(grid, seed);
        if (corridor.polytopes.empty() ||
            !CellBox{corridor.polytopes.back().lo_cell, corridor.polytopes.back().hi_cell}
                 .contains(box)) {
          corridor.polytopes.push_back(
              Polytope::from_cell_box(grid, box.lo, box.hi, static_cast<int>(s)));
        }
      }
      t0 = good;
    }
  }

  // A later box can swallow its predecessor when expansion overshoots;
  // drop such predecessors to keep the sequence minimal.
  std::vector<Polytope> pruned;
  for (Polytope& p : corridor.polytopes) {
    while (!pruned.empty() &&
           CellBox{p.lo_cell, p.hi_cell}.contains(CellBox{pruned.back().lo_cell, pruned.back().hi_cell})) {
      pruned.pop_back();
    }
    pruned.push_back(std::move(p));
  }
  corridor.polytopes = std::move(pruned);

  // Witness points: one point strictly inside each consecutive intersection.
  // Prefer a point on the path (clamped into the overlap) over the
  // intersection center; the witnesses seed the back-end's free waypoints,
  // and path-aligned seeds keep the spline from weaving box to box.
  std::vector<Vec3> samples;
  {
    const double step = grid.resolution() / 2.0;
    for (std::size_t s = 0; s + 1 < waypoints.size(); ++s) {
      const Vec3 a = waypoints[s], b = waypoints[s + 1];
      const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
      for (int i = 0; i < n; ++i) samples.push_back(a + (b - a) * (static_cast<double>(i) / n));
    }
    samples.push_back(waypoints.back());
  }
  std::size_t cursor = 0;
  for (std::size_t i = 0; i + 1 < corridor.polytopes.size(); ++i) {
    const Polytope& a = corridor.polytopes[i];
    const Polytope& b = corridor.polytopes[i + 1];
    const Vec3 lo = a.lo.cwiseMax(b.lo);
    const Vec3 hi = a.hi.cwiseMin(b.hi);
    if ((lo.array() >= hi.array()).any()) {
      throw ContractError("build_corridor: consecutive polytopes do not overlap");
    }
    const Vec3 inset = ((hi - lo) / 4.0).cwiseMin(Vec3::Constant(grid.resolution() / 4.0));
    const Vec3 safe_lo = lo + inset;
    const Vec3 safe_hi = hi - inset;
    // Walk forward along the path to keep consecutive witnesses ordered.
    Vec3 best = 0.5 * (lo + hi);
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_at = cursor;
    for (std::size_t s = cursor; s < samples.size(); ++s) {
      const Vec3 clamped = samples[s].cwiseMax(safe_lo).cwiseMin(safe_hi);
      const double cost = (clamped - samples[s]).norm();
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = clamped;
        best_at = s;
        if (cost <= 1e-12) break;
      }
    }
    cursor = best_at;
    corridor.overlap_witness.push_back(best);
  }
  return corridor;
}

CorridorCheck verify_corridor(const Corridor& corridor, const VoxelGrid& grid,
                              const std::vector<Vec3>& waypoints) {
  CorridorCheck check;
  if (corridor.polytopes.empty()) {
    check.no_occupied_inside = check.path_covered = check.overlaps_ok = false;
    check.detail = "empty corridor";
    return check;
  }

  // (a) No occupied cell center strictly inside any polytope.
  const Vec3i dims = grid.dims();
  for (int k = 0; k < dims[2] && check.no_occupied_inside; ++k) {
    for (int j = 0; j < dims[1] && check.no_occupied_inside; ++j) {
      for (int i = 0; i < dims[0]; ++i) {
        if (!grid.occupied(i, j, k)) continue;
        const Vec3 center = grid.cell_center(i, j, k);
        for (const Polytope& p : corridor.polytopes) {
          if (p.contains(center, -1e-9)) {
            check.no_occupied_inside = false;
            check.detail = "occupied cell center inside polytope";
            break;
          }
        }
        if (!check.no_occupied_inside) break;
      }
    }
  }

  // (b) Path samples at resolution/2 inside the union.
  const double step = grid.resolution() / 2.0;
  for (std::size_t s = 0; s + 1 < waypoints.size() && check.path_covered; ++s) {
    const Vec3 a = waypoints[s], b = waypoints[s + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
    for (int i = 0; i <= n; ++i) {
      const Vec3 p = a + (b - a) * (static_cast<double>(i) / n);
      bool inside = false;
      for (const Polytope& poly : corridor.polytopes) {
        if (poly.contains(p, 1e-9)) {
          inside = true;
          break;
        }
      }
      if (!inside) {
        check.path_covered = false;
        check.detail = "path sample outside corridor";
        break;
      }
    }
  }

  // (c) Consecutive overlaps have interior (analytic box intersection).
  for (std::size_t i = 0; i + 1 < corridor.polytopes.size(); ++i) {
    const Polytope& a = corridor.polytopes[i];
    const Polytope& b = corridor.polytopes[i + 1];
    const Vec3 lo = a.lo.cwiseMax(b.lo);
    const Vec3 hi = a.hi.cwiseMin(b.hi);
    if ((hi - lo).minCoeff() <= 0.0) {
      check.overlaps_ok = false;
      check.detail = "consecutive polytopes without interior overlap";
      break;
    }
    const Vec3 witness = 0.5 * (lo + hi);
    if (!a.contains(witness, -1e-12) || !b.contains(witness, -1e-12)) {
      check.overlaps_ok = false;
      check.detail = "overlap witness not strictly inside";
      break;
    }
  }
  return check;
}

bool box_face_maximal(const Polytope& poly, const VoxelGrid& grid, std::string* detail) {
  const CellBox box{poly.lo_cell, poly.hi_cell};
  for (int face = 0; face < 6; ++face) {
    const int axis = face / 2;
    const bool positive = face % 2 == 1;
    int plane;
    if (slab_free(grid, box, axis, positive, &plane)) {
      if (detail) {
        *detail = "face " + std::to_string(face) + " can still expand to plane " +
                  std::to_string(plane);
      }
      return false;
    }
  }
  return true;
}

std::vector<Vec3> simplify_path(const std::vector<Vec3>& waypoints, const VoxelGrid& grid) {
  if (waypoints.size() <= 2) return waypoints;
  std::vector<Vec3> out;
  out.push_back(waypoints.front());
  std::size_t i = 0;
  while (i + 1 < waypoints.size()) {
    std::size_t j = waypoints.size() - 1;
    for (; j > i + 1; --j) {
      if (segment_free(grid, waypoints[i], waypoints[j])) break;
    }
    out.push_back(waypoints[j]);
    i = j;
  }
  return out;
}

}  // namespace mpb
