#pragma once

// Test-side reference implementations, written independently of the library
// code paths they check. Brute force beats clever here.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "mpb/rng.hpp"
#include "mpb/types.hpp"
#include "mpb/voxel_grid.hpp"

namespace oracle {

using mpb::Vec3;
using mpb::Vec3i;
using mpb::VoxelGrid;

// O(n^2) Euclidean distance transform: min over occupied cell centers.
inline std::vector<double> brute_distance(const VoxelGrid& grid) {
  std::vector<Vec3> occupied;
  const Vec3i d = grid.dims();
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        if (grid.occupied(i, j, k)) occupied.push_back(grid.cell_center(i, j, k));
      }
    }
  }
  std::vector<double> out(grid.cell_count(), std::numeric_limits<double>::infinity());
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        const Vec3 c = grid.cell_center(i, j, k);
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& o : occupied) best = std::min(best, (c - o).norm());
        out[grid.index(i, j, k)] = best;
      }
    }
  }
  return out;
}

// Random grid with the given occupancy probability.
inline VoxelGrid random_grid(const mpb::Bounds& bounds, double resolution, double fill,
                             std::uint64_t seed, bool ensure_mixed = true) {
  VoxelGrid grid(bounds, resolution);
  mpb::Rng rng(seed);
  const Vec3i d = grid.dims();
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        if (rng.bernoulli(fill)) grid.set_occupied(i, j, k);
      }
    }
  }
  if (ensure_mixed) {
    if (grid.occupied_count() == 0) grid.set_occupied(0, 0, 0);
    if (grid.occupied_count() == static_cast<std::int64_t>(grid.cell_count())) {
      grid.set_occupied(d[0] - 1, d[1] - 1, d[2] - 1, false);
    }
  }
  return grid;
}

// 26-connected moves under the no-corner-cutting rule: a move must sweep
// only free cells. Written from the rule's definition, not shared with the
// planners.
inline bool move_allowed(const VoxelGrid& grid, const Vec3i& from, int dx, int dy, int dz) {
  for (int sx = 0; sx <= std::abs(dx); ++sx) {
    for (int sy = 0; sy <= std::abs(dy); ++sy) {
      for (int sz = 0; sz <= std::abs(dz); ++sz) {
        if (sx + sy + sz == 0) continue;
        const Vec3i c(from[0] + sx * dx, from[1] + sy * dy, from[2] + sz * dz);
        if (!grid.in_grid(c) || grid.occupied(c)) return false;
      }
    }
  }
  return true;
}

struct DijkstraResult {
  bool reached = false;
  double cost = 0.0;
  // Exact move counts along one optimal path.
  std::int64_t straight = 0, diag2 = 0, diag3 = 0;
  std::int64_t expansions = 0;
};

// Plain binary-heap Dijkstra (or A* when heuristic=true) over the same graph.
inline DijkstraResult grid_shortest_path(const VoxelGrid& grid, const Vec3i& start,
                                         const Vec3i& goal, bool use_heuristic = false) {
  DijkstraResult result;
  const Vec3i dims = grid.dims();
  auto flat = [&](const Vec3i& c) {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(dims[1]) * c[2]);
  };
  const double res = grid.resolution();
  std::vector<double> dist(grid.cell_count(), std::numeric_limits<double>::infinity());
  std::vector<int> parent_move(grid.cell_count(), -1);
  std::vector<std::size_t> parent(grid.cell_count(), SIZE_MAX);
  std::vector<std::uint8_t> done(grid.cell_count(), 0);

  // Same tie-breaking as the library search (prefer deeper nodes on equal f)
  // so expansion-count comparisons are like for like.
  struct Entry {
    double f, g;
    std::size_t u;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (g != o.g) return g < o.g;
      return u > o.u;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  auto h = [&](const Vec3i& c) {
    return use_heuristic ? res * (goal - c).cast<double>().norm() : 0.0;
  };
  dist[flat(start)] = 0.0;
  open.push({h(start), 0.0, flat(start)});

  while (!open.empty()) {
    const auto [f, g, u] = open.top();
    open.pop();
    if (done[u]) continue;
    done[u] = 1;
    ++result.expansions;
    const Vec3i uc(static_cast<int>(u % dims[0]), static_cast<int>((u / dims[0]) % dims[1]),
                   static_cast<int>(u / (static_cast<std::size_t>(dims[0]) * dims[1])));
    if (u == flat(goal)) break;
    int move = 0;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx, ++move) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Vec3i vc(uc[0] + dx, uc[1] + dy, uc[2] + dz);
          if (!grid.in_grid(vc) || grid.occupied(vc)) continue;
          if (!move_allowed(grid, uc, dx, dy, dz)) continue;
          const int order = std::abs(dx) + std::abs(dy) + std::abs(dz);
          const double w = res * std::sqrt(static_cast<double>(order));
          const std::size_t v = flat(vc);
          if (dist[u] + w < dist[v]) {
            dist[v] = dist[u] + w;
            parent[v] = u;
            parent_move[v] = order;
            open.push({dist[v] + h(vc), dist[v], v});
          }
        }
      }
    }
  }

  const std::size_t goal_flat = flat(goal);
  if (!done[goal_flat]) return result;
  result.reached = true;
  result.cost = dist[goal_flat];
  for (std::size_t v = goal_flat; parent[v] != SIZE_MAX; v = parent[v]) {
    if (parent_move[v] == 1) ++result.straight;
    if (parent_move[v] == 2) ++result.diag2;
    if (parent_move[v] == 3) ++result.diag3;
  }
  return result;
}

// 6-connected flood fill reachability.
inline bool bfs_connected(const VoxelGrid& grid, const Vec3i& start, const Vec3i& goal) {
  if (grid.occupied(start) || grid.occupied(goal)) return false;
  std::vector<std::uint8_t> seen(grid.cell_count(), 0);
  std::vector<Vec3i> stack{start};
  seen[grid.index(start[0], start[1], start[2])] = 1;
  static constexpr int off[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  while (!stack.empty()) {
    const Vec3i c = stack.back();
    stack.pop_back();
    if (c[0] == goal[0] && c[1] == goal[1] && c[2] == goal[2]) return true;
    for (const auto& o : off) {
      const Vec3i n(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
      if (!grid.in_grid(n) || grid.occupied(n)) continue;
      std::uint8_t& s = seen[grid.index(n[0], n[1], n[2])];
      if (!s) {
        s = 1;
        stack.push_back(n);
      }
    }
  }
  return false;
}

// Uniformly random free cell.
inline Vec3i random_free_cell(const VoxelGrid& grid, mpb::Rng& rng) {
  const Vec3i d = grid.dims();
  while (true) {
    const Vec3i c(static_cast<int>(rng.uniform_index(d[0])),
                  static_cast<int>(rng.uniform_index(d[1])),
                  static_cast<int>(rng.uniform_index(d[2])));
    if (!grid.occupied(c)) return c;
  }
}

}  // namespace oracle
