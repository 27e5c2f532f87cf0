#include "mpb/jps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

namespace mpb {

namespace {

using Clock = std::chrono::steady_clock;

// Directions are encoded as id = (dx+1) + 3*(dy+1) + 9*(dz+1); id 13 is the
// null move and doubles as the "start node, no arrival direction" marker.
constexpr int kNullDir = 13;

struct Offset {
  int dx, dy, dz;
};

Offset dir_offset(int id) { return {id % 3 - 1, (id / 3) % 3 - 1, id / 9 - 1}; }

int dir_id(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }

int dir_order(int id) {
  const Offset o = dir_offset(id);
  return std::abs(o.dx) + std::abs(o.dy) + std::abs(o.dz);
}

double dir_cost(int id) { return std::sqrt(static_cast<double>(dir_order(id))); }

// Ring cells (the 26 neighbors) get bits 0..25, skipping the center.
int ring_bit(int id) { return id < kNullDir ? id : id - 1; }

// Bitmask of the cells a move sweeps: every nonzero sub-offset of d,
// including d itself. These must all be free for the move to be legal
// (no corner cutting).
std::uint32_t sweep_mask(int d_id) {
  const Offset d = dir_offset(d_id);
  std::uint32_t mask = 0;
  for (int sx = 0; sx <= std::abs(d.dx); ++sx) {
    for (int sy = 0; sy <= std::abs(d.dy); ++sy) {
      for (int sz = 0; sz <= std::abs(d.dz); ++sz) {
        if (sx == 0 && sy == 0 && sz == 0) continue;
        mask |= 1u << ring_bit(dir_id(sx * d.dx, sy * d.dy, sz * d.dz));
      }
    }
  }
  return mask;
}

struct Candidate {
  int n_id = 0;
  std::uint32_t legal_mask = 0;  // cells that must be free to move to n
  bool natural = false;          // kept in obstacle-free surroundings
  bool tie_applies = false;      // canonical tie rule kicks in (k(d) < k(n))
  // Requirement masks of the local alternative paths: the candidate is
  // pruned while any relevant alternative is fully free.
  std::vector<std::uint32_t> strict_alts;
  std::vector<std::uint32_t> tie_alts;
};

struct DirTable {
  std::vector<Candidate> candidates;
  std::vector<int> natural_ids;  // fast path when the whole ring is free
};

// Enumerates local paths p -> n inside the 3x3x3 box that avoid the center,
// recording the union of cells each path needs free (traversed cells plus
// corner-rule sweeps), classified into strictly-shorter and equal-cost
// alternatives relative to going through the center.
class AltEnumerator {
 public:
  AltEnumerator(int p_id, int n_id, double through_cost)
      : p_id_(p_id), n_id_(n_id), through_(through_cost) {}

  void run(std::vector<std::uint32_t>* strict, std::vector<std::uint32_t>* tie) {
    strict_ = strict;
    tie_ = tie;
    visited_ids_.assign(27, false);
    visited_ids_[p_id_] = true;
    dfs(p_id_, 0.0, 0u);
  }

 private:
  static std::optional<int> shifted(int id, const Offset& m) {
    const Offset o = dir_offset(id);
    const int x = o.dx + m.dx, y = o.dy + m.dy, z = o.dz + m.dz;
    if (x < -1 || x > 1 || y < -1 || y > 1 || z < -1 || z > 1) return std::nullopt;
    return dir_id(x, y, z);
  }

  void dfs(int u_id, double cost, std::uint32_t required) {
    if (u_id == n_id_) {
      if (cost < through_ - 1e-9) {
        push_minimal(*strict_, required);
      } else if (cost <= through_ + 1e-9) {
        push_minimal(*tie_, required);
      }
      return;
    }
    const Offset u = dir_offset(u_id);
    const Offset n = dir_offset(n_id_);
    const double remaining = std::sqrt(
        static_cast<double>((n.dx - u.dx) * (n.dx - u.dx) + (n.dy - u.dy) * (n.dy - u.dy) +
                            (n.dz - u.dz) * (n.dz - u.dz)));
    if (cost + remaining > through_ + 1e-9) return;

    for (int m_id = 0; m_id < 27; ++m_id) {
      if (m_id == kNullDir) continue;
      const Offset m = dir_offset(m_id);
      std::optional<int> v_id = shifted(u_id, m);
      if (!v_id || *v_id == kNullDir || visited_ids_[*v_id]) continue;

      // Requirement cells for this move: every swept cell, skipping the
      // center (always free), the parent cell, and the target candidate.
      std::uint32_t move_req = 0;
      bool ok = true;
      for (int sx = 0; sx <= std::abs(m.dx) && ok; ++sx) {
        for (int sy = 0; sy <= std::abs(m.dy) && ok; ++sy) {
          for (int sz = 0; sz <= std::abs(m.dz); ++sz) {
            if (sx == 0 && sy == 0 && sz == 0) continue;
            std::optional<int> c = shifted(u_id, Offset{sx * m.dx, sy * m.dy, sz * m.dz});
            if (!c) {
              ok = false;
              break;
            }
            if (*c == kNullDir || *c == p_id_ || *c == n_id_) continue;
            move_req |= 1u << ring_bit(*c);
          }
        }
      }
      if (!ok) continue;

      visited_ids_[*v_id] = true;
      dfs(*v_id, cost + dir_cost(m_id), required | move_req);
      visited_ids_[*v_id] = false;
    }
  }

  // Keeps only subset-minimal requirement masks.
  static void push_minimal(std::vector<std::uint32_t>& list, std::uint32_t r) {
    for (std::uint32_t existing : list) {
      if ((existing & r) == existing) return;  // existing subset of r: r redundant
    }
    list.erase(
        std::remove_if(list.begin(), list.end(), [r](std::uint32_t e) { return (r & e) == r; }),
        list.end());
    list.push_back(r);
  }

  int p_id_, n_id_;
  double through_;
  std::vector<bool> visited_ids_;
  std::vector<std::uint32_t>* strict_ = nullptr;
  std::vector<std::uint32_t>* tie_ = nullptr;
};

struct JpsTables {
  DirTable dirs[27];

  JpsTables() {
    for (int d_id = 0; d_id < 27; ++d_id) {
      DirTable& table = dirs[d_id];
      const bool is_start = d_id == kNullDir;
      const int p_id = is_start ? -1 : 26 - d_id;  // -d has the mirrored id
      const double d_cost = is_start ? 0.0 : dir_cost(d_id);

      for (int n_id = 0; n_id < 27; ++n_id) {
        if (n_id == kNullDir) continue;
        Candidate c;
        c.n_id = n_id;
        c.legal_mask = sweep_mask(n_id);
        if (is_start) {
          c.natural = true;  // no parent: everything legal is natural
        } else {
          const double through = d_cost + dir_cost(n_id);
          c.tie_applies = dir_order(d_id) < dir_order(n_id);
          AltEnumerator enumerator(p_id, n_id, through);
          enumerator.run(&c.strict_alts, &c.tie_alts);
          if (!c.tie_applies) c.tie_alts.clear();
          c.natural = c.strict_alts.empty() && c.tie_alts.empty();
        }
        if (c.natural) table.natural_ids.push_back(n_id);
        table.candidates.push_back(std::move(c));
      }
    }
  }
};

const JpsTables& tables() {
  static const JpsTables t;
  return t;
}

inline bool candidate_pruned(const Candidate& c, std::uint32_t occ) {
  for (std::uint32_t r : c.strict_alts) {
    if ((r & occ) == 0) return true;
  }
  if (c.tie_applies) {
    for (std::uint32_t r : c.tie_alts) {
      if ((r & occ) == 0) return true;
    }
  }
  return false;
}

struct HeapNode {
  double f;
  double g;
  std::int64_t cell;
  int dir;
};

struct HeapCompare {
  bool operator()(const HeapNode& a, const HeapNode& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;  // prefer deeper nodes on f ties
    if (a.cell != b.cell) return a.cell > b.cell;
    return a.dir > b.dir;
  }
};

// Canonical-ordering search: A* whose successor sets follow the jump-point
// pruning rules (natural neighbors plus forced neighbors detected from the
// 26-cell ring), expanded in unit steps. Equivalent cost to Dijkstra on the
// same no-corner-cutting 26-connected graph.
class JpsSearch {
 public:
  JpsSearch(const VoxelGrid& grid, const Vec3i& start, const Vec3i& goal,
            const PlannerBudget& budget)
      : grid_(grid),
        dims_(grid.dims()),
        start_(start),
        goal_(goal),
        deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(budget.timeout_s))),
        enforce_wall_clock_(budget.enforce_wall_clock) {
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int id = dir_id(dx, dy, dz);
          flat_step_[id] = dx + static_cast<std::int64_t>(dims_[0]) *
                                    (dy + static_cast<std::int64_t>(dims_[1]) * dz);
        }
      }
    }
  }

  PlanResult run();

 private:
  std::int64_t flat(const Vec3i& c) const {
    return c[0] + static_cast<std::int64_t>(dims_[0]) *
                      (c[1] + static_cast<std::int64_t>(dims_[1]) * c[2]);
  }
  Vec3i unflat(std::int64_t f) const {
    const int x = static_cast<int>(f % dims_[0]);
    const int y = static_cast<int>((f / dims_[0]) % dims_[1]);
    return Vec3i(x, y, static_cast<int>(f / (static_cast<std::int64_t>(dims_[0]) * dims_[1])));
  }

  bool cell_free(int x, int y, int z) const {
    return x >= 0 && x < dims_[0] && y >= 0 && y < dims_[1] && z >= 0 && z < dims_[2] &&
           !grid_.occupied(x, y, z);
  }

  std::uint32_t gather_ring(const Vec3i& c, std::int64_t c_flat) const {
    const std::uint8_t* occ_raw = grid_.raw().data();
    std::uint32_t occ = 0;
    if (c[0] >= 1 && c[0] < dims_[0] - 1 && c[1] >= 1 && c[1] < dims_[1] - 1 && c[2] >= 1 &&
        c[2] < dims_[2] - 1) {
      int bit = 0;
      for (int id = 0; id < 27; ++id) {
        if (id == kNullDir) continue;
        occ |= static_cast<std::uint32_t>(occ_raw[c_flat + flat_step_[id]] != 0) << bit;
        ++bit;
      }
      return occ;
    }
    int bit = 0;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          if (!cell_free(c[0] + dx, c[1] + dy, c[2] + dz)) occ |= 1u << bit;
          ++bit;
        }
      }
    }
    return occ;
  }

  // Straight directions have singleton natural sets under the canonical
  // tables, so a run of straight moves can be scanned in one leg: the scan
  // stops at the goal, at a cell with a forced neighbor, or at a wall (a
  // dead cell for this arrival, which cannot lead anywhere).
  std::optional<std::pair<std::int64_t, int>> jump_straight(Vec3i cur, std::int64_t cur_flat,
                                                            int n_id) {
    const Offset d = dir_offset(n_id);
    const DirTable& table = tables().dirs[n_id];
    int steps = 0;
    while (true) {
      if (!cell_free(cur[0] + d.dx, cur[1] + d.dy, cur[2] + d.dz)) {
        return std::nullopt;  // dead end: no natural continuation, no forced
      }
      cur += Vec3i(d.dx, d.dy, d.dz);
      cur_flat += flat_step_[n_id];
      ++steps;
      if (cur[0] == goal_[0] && cur[1] == goal_[1] && cur[2] == goal_[2]) {
        return std::make_pair(cur_flat, steps);
      }
      const std::uint32_t occ = gather_ring(cur, cur_flat);
      if (occ == 0) continue;
      for (const Candidate& c : table.candidates) {
        if (c.natural) continue;
        if ((c.legal_mask & occ) != 0) continue;
        if (!candidate_pruned(c, occ)) return std::make_pair(cur_flat, steps);
      }
    }
  }

  const VoxelGrid& grid_;
  Vec3i dims_;
  Vec3i start_, goal_;
  Clock::time_point deadline_;
  bool enforce_wall_clock_ = true;
  std::int64_t flat_step_[27] = {};
  bool timed_out_ = false;
};

PlanResult JpsSearch::run() {
  const std::size_t n_cells = grid_.cell_count();
  std::vector<double> g(n_cells, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(n_cells, -1);
  std::vector<std::int8_t> arrival(n_cells, kNullDir);
  std::vector<std::uint8_t> closed(n_cells, 0);
  std::priority_queue<HeapNode, std::vector<HeapNode>, HeapCompare> open;

  const double res = grid_.resolution();
  auto heuristic = [&](const Vec3i& c) { return res * (goal_ - c).cast<double>().norm(); };

  const std::int64_t start_flat = flat(start_);
  const std::int64_t goal_flat = flat(goal_);
  g[start_flat] = 0.0;
  open.push({heuristic(start_), 0.0, start_flat, kNullDir});

  PlanResult result;
  double unit_cost[27];
  for (int id = 0; id < 27; ++id) unit_cost[id] = res * dir_cost(id);

  while (!open.empty()) {
    const HeapNode top = open.top();
    open.pop();
    if (closed[top.cell] || top.g > g[top.cell]) continue;
    closed[top.cell] = 1;
    ++result.expansions;

    if (top.cell == goal_flat) break;
    if (enforce_wall_clock_ && (result.expansions & 0x3ff) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      break;
    }

    const Vec3i cell = unflat(top.cell);
    const std::uint32_t occ = gather_ring(cell, top.cell);
    const DirTable& table = tables().dirs[top.dir];

    auto relax = [&](int n_id) {
      if (dir_order(n_id) == 1) {
        const auto leg = jump_straight(cell, top.cell, n_id);
        if (!leg) return;
        const auto [next, steps] = *leg;
        if (closed[next]) return;
        const double new_g = top.g + unit_cost[n_id] * steps;
        if (new_g < g[next]) {
          g[next] = new_g;
          parent[next] = top.cell;
          arrival[next] = static_cast<std::int8_t>(n_id);
          open.push({new_g + heuristic(unflat(next)), new_g, next, n_id});
        }
        return;
      }
      const std::int64_t next = top.cell + flat_step_[n_id];
      if (closed[next]) return;
      const double new_g = top.g + unit_cost[n_id];
      if (new_g < g[next]) {
        g[next] = new_g;
        parent[next] = top.cell;
        arrival[next] = static_cast<std::int8_t>(n_id);
        const Offset o = dir_offset(n_id);
        const Vec3i nc(cell[0] + o.dx, cell[1] + o.dy, cell[2] + o.dz);
        open.push({new_g + heuristic(nc), new_g, next, n_id});
      }
    };

    if (occ == 0) {
      // Whole ring free: successors are exactly the natural set, and every
      // move is legal. Cells on the grid boundary never take this path
      // (outside counts as occupied).
      for (int n_id : table.natural_ids) relax(n_id);
      continue;
    }
    for (const Candidate& c : table.candidates) {
      if ((c.legal_mask & occ) != 0) continue;
      if (!c.natural && candidate_pruned(c, occ)) continue;
      relax(c.n_id);
    }
  }

  if (timed_out_) {
    result.status = PlanStatus::kTimeout;
    return result;
  }
  if (!closed[goal_flat]) {
    result.status = PlanStatus::kInfeasible;
    return result;
  }

  // Walk the parent legs back to the start, merging collinear legs and
  // accumulating exact move counts per order.
  std::vector<Vec3i> chain{goal_};
  std::int64_t cur = goal_flat;
  while (cur != start_flat) {
    const std::int64_t par = parent[cur];
    const int dir = arrival[cur];
    const Vec3i delta = unflat(cur) - unflat(par);
    const int steps = std::max({std::abs(delta[0]), std::abs(delta[1]), std::abs(delta[2])});
    const int order = dir_order(dir);
    if (order == 1) result.grid_cost.straight += steps;
    if (order == 2) result.grid_cost.diag2 += steps;
    if (order == 3) result.grid_cost.diag3 += steps;
    if (par == start_flat || arrival[par] != dir) chain.push_back(unflat(par));
    cur = par;
  }
  std::reverse(chain.begin(), chain.end());

  result.status = PlanStatus::kSuccess;
  result.path.planner = "jps";
  result.path.waypoints.reserve(chain.size());
  for (const Vec3i& c : chain) result.path.waypoints.push_back(grid_.cell_center(c));
  result.path.cost = result.grid_cost.value(res);
  return result;
}

}  // namespace

double GridCost::value(double resolution) const {
  return resolution * (static_cast<double>(straight) + std::sqrt(2.0) * static_cast<double>(diag2) +
                       std::sqrt(3.0) * static_cast<double>(diag3));
}

PlanResult plan_jps(const VoxelGrid& grid, const Vec3& start, const Vec3& goal,
                    const PlannerBudget& budget) {
  budget.validate();
  const std::optional<Vec3i> sc = grid.cell_of(start);
  const std::optional<Vec3i> gc = grid.cell_of(goal);
  if (!sc || grid.occupied(*sc)) throw ContractError("plan_jps: start not in free space");
  if (!gc || grid.occupied(*gc)) throw ContractError("plan_jps: goal not in free space");

  const auto t0 = Clock::now();
  PlanResult result;
  if ((*sc)[0] == (*gc)[0] && (*sc)[1] == (*gc)[1] && (*sc)[2] == (*gc)[2]) {
    if ((goal - start).norm() < 1e-12) throw ContractError("plan_jps: start equals goal");
    result.status = PlanStatus::kSuccess;
    result.path.planner = "jps";
    result.path.waypoints = {start, goal};
    result.path.cost = (goal - start).norm();
  } else {
    JpsSearch search(grid, *sc, *gc, budget);
    result = search.run();
  }
  result.path.compute_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace mpb
