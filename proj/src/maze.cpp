#include "mpb/maze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpb/rng.hpp"

namespace mpb {

namespace {

struct DisjointSet {
  std::vector<int> parent, rank_;
  explicit DisjointSet(int n) : parent(n), rank_(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }
};

// Interior wall handle: orientation 0 = vertical (between x-adjacent cells),
// 1 = horizontal (between y-adjacent cells).
struct WallRef {
  int orientation;
  int index;
};

void append_box_surface(const Vec3& lo, const Vec3& hi, double spacing, PointCloud& out) {
  const Vec3 ext = hi - lo;
  int n[3];
  for (int k = 0; k < 3; ++k) {
    n[k] = std::max(1, static_cast<int>(std::ceil(ext[k] / spacing)));
  }
  auto lattice = [&](int axis_u, int axis_v, int fixed_axis, double fixed_value) {
    for (int iu = 0; iu <= n[axis_u]; ++iu) {
      for (int iv = 0; iv <= n[axis_v]; ++iv) {
        Vec3 p;
        p[axis_u] = lo[axis_u] + ext[axis_u] * iu / n[axis_u];
        p[axis_v] = lo[axis_v] + ext[axis_v] * iv / n[axis_v];
        p[fixed_axis] = fixed_value;
        out.points.push_back(p);
      }
    }
  };
  lattice(1, 2, 0, lo[0]);
  lattice(1, 2, 0, hi[0]);
  lattice(0, 2, 1, lo[1]);
  lattice(0, 2, 1, hi[1]);
  lattice(0, 1, 2, lo[2]);
  lattice(0, 1, 2, hi[2]);
}

}  // namespace

void MazeSpec::validate() const {
  if (p < 0.0 || p > 1.0) throw ConfigError("MazeSpec: p must be in [0, 1]");
  if (cells_x < 2 || cells_y < 2) throw ConfigError("MazeSpec: need at least 2 cells per axis");
  if (!(cell_size > 0.0)) throw ConfigError("MazeSpec: cell_size must be > 0");
  if (!(wall_thickness > 0.0) || wall_thickness >= cell_size) {
    throw ConfigError("MazeSpec: wall_thickness must be in (0, cell_size)");
  }
  if (!(point_spacing > 0.0)) throw ConfigError("MazeSpec: point_spacing must be > 0");
}

int MazeLayout::kept_interior() const {
  auto count = [](const std::vector<std::uint8_t>& v) {
    return static_cast<int>(std::count(v.begin(), v.end(), std::uint8_t{1}));
  };
  return count(wall_v) + count(wall_h);
}

bool MazeLayout::connected() const {
  const int cx = spec.cells_x, cy = spec.cells_y;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(cx) * cy, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  auto cell = [&](int i, int j) { return i + cx * j; };
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    const int i = c % cx, j = c / cx;
    auto visit = [&](int ni, int nj, bool open) {
      if (!open || seen[cell(ni, nj)]) return;
      seen[cell(ni, nj)] = 1;
      ++visited;
      stack.push_back(cell(ni, nj));
    };
    if (i + 1 < cx) visit(i + 1, j, !wall_v[i + (cx - 1) * j]);
    if (i - 1 >= 0) visit(i - 1, j, !wall_v[(i - 1) + (cx - 1) * j]);
    if (j + 1 < cy) visit(i, j + 1, !wall_h[i + cx * j]);
    if (j - 1 >= 0) visit(i, j - 1, !wall_h[i + cx * (j - 1)]);
  }
  return visited == cx * cy;
}

MazeLayout generate_maze_layout(const MazeSpec& spec) {
  spec.validate();
  const int cx = spec.cells_x, cy = spec.cells_y;
  MazeLayout layout;
  layout.spec = spec;
  layout.wall_v.assign(static_cast<std::size_t>(cx - 1) * cy, 1);
  layout.wall_h.assign(static_cast<std::size_t>(cx) * (cy - 1), 1);
  layout.interior_total = static_cast<int>(layout.wall_v.size() + layout.wall_h.size());

  std::vector<WallRef> walls;
  walls.reserve(layout.interior_total);
  for (int j = 0; j < cy; ++j) {
    for (int i = 0; i + 1 < cx; ++i) walls.push_back({0, i + (cx - 1) * j});
  }
  for (int j = 0; j + 1 < cy; ++j) {
    for (int i = 0; i < cx; ++i) walls.push_back({1, i + cx * j});
  }

  Rng kruskal_rng(mix_seed(spec.seed, 0));
  kruskal_rng.shuffle(walls);

  DisjointSet sets(cx * cy);
  for (const WallRef& w : walls) {
    int a, b;
    if (w.orientation == 0) {
      const int i = w.index % (cx - 1), j = w.index / (cx - 1);
      a = i + cx * j;
      b = (i + 1) + cx * j;
    } else {
      const int i = w.index % cx, j = w.index / cx;
      a = i + cx * j;
      b = i + cx * (j + 1);
    }
    if (sets.unite(a, b)) {
      (w.orientation == 0 ? layout.wall_v : layout.wall_h)[w.index] = 0;
      ++layout.removed_by_kruskal;
    }
  }

  // Independent thinning of the surviving interior walls.
  Rng delete_rng(mix_seed(spec.seed, 1));
  auto thin = [&](std::vector<std::uint8_t>& wall_set) {
    for (std::uint8_t& w : wall_set) {
      if (w && delete_rng.bernoulli(spec.p)) {
        w = 0;
        ++layout.deleted_by_p;
      }
    }
  };
  thin(layout.wall_v);
  thin(layout.wall_h);
  return layout;
}

namespace {

struct MazeFrame {
  Vec3 origin;  // outer corner of the footprint (bounds.min)
  double height;
};

// Wall centerlines sit on the cell lattice anchored at bounds.min, so a
// cells*cell_size footprint fills the workspace exactly. The outer boundary
// slab overhangs by half a thickness; the discretizer drops those points the
// same way it drops out-of-crop scan returns.
MazeFrame maze_frame(const MazeSpec& spec, const Bounds& bounds) {
  const Vec3 ext = bounds.extent();
  const double foot_x = spec.cells_x * spec.cell_size;
  const double foot_y = spec.cells_y * spec.cell_size;
  if (foot_x > ext[0] + 1e-9 || foot_y > ext[1] + 1e-9) {
    throw ConfigError("maze footprint exceeds bounds");
  }
  MazeFrame f;
  f.origin = bounds.min_corner;
  f.height = spec.wall_height > 0.0 ? std::min(spec.wall_height, ext[2]) : ext[2];
  return f;
}

}  // namespace

PointCloud generate_maze(const MazeSpec& spec, const Bounds& bounds) {
  const MazeLayout layout = generate_maze_layout(spec);
  const MazeFrame frame = maze_frame(spec, bounds);
  const double t = spec.wall_thickness;
  const double cs = spec.cell_size;
  const double z0 = frame.origin[2];
  const double z1 = z0 + frame.height;
  const double ox = frame.origin[0];
  const double oy = frame.origin[1];

  PointCloud cloud;
  auto emit_wall = [&](double x_lo, double x_hi, double y_lo, double y_hi) {
    append_box_surface(Vec3(x_lo, y_lo, z0), Vec3(x_hi, y_hi, z1), spec.point_spacing, cloud);
  };

  const int cx = spec.cells_x, cy = spec.cells_y;
  // Outer boundary: four slabs, never deleted.
  emit_wall(ox - t / 2, ox + t / 2, oy - t / 2, oy + cy * cs + t / 2);
  emit_wall(ox + cx * cs - t / 2, ox + cx * cs + t / 2, oy - t / 2, oy + cy * cs + t / 2);
  emit_wall(ox - t / 2, ox + cx * cs + t / 2, oy - t / 2, oy + t / 2);
  emit_wall(ox - t / 2, ox + cx * cs + t / 2, oy + cy * cs - t / 2, oy + cy * cs + t / 2);

  for (int j = 0; j < cy; ++j) {
    for (int i = 0; i + 1 < cx; ++i) {
      if (!layout.wall_v[i + (cx - 1) * j]) continue;
      const double x = ox + (i + 1) * cs;
      emit_wall(x - t / 2, x + t / 2, oy + j * cs - t / 2, oy + (j + 1) * cs + t / 2);
    }
  }
  for (int j = 0; j + 1 < cy; ++j) {
    for (int i = 0; i < cx; ++i) {
      if (!layout.wall_h[i + cx * j]) continue;
      const double y = oy + (j + 1) * cs;
      emit_wall(ox + i * cs - t / 2, ox + (i + 1) * cs + t / 2, y - t / 2, y + t / 2);
    }
  }
  return cloud;
}

void maze_corner_positions(const MazeSpec& spec, const Bounds& bounds, Vec3* start, Vec3* goal) {
  const MazeFrame frame = maze_frame(spec, bounds);
  const double cs = spec.cell_size;
  const double ox = frame.origin[0];
  const double oy = frame.origin[1];
  const double z = frame.origin[2] + frame.height / 2.0;
  *start = Vec3(ox + 0.5 * cs, oy + 0.5 * cs, z);
  *goal = Vec3(ox + (spec.cells_x - 0.5) * cs, oy + (spec.cells_y - 0.5) * cs, z);
}

}  // namespace mpb
