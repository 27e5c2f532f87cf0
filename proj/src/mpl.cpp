#include "mpb/mpl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

namespace mpb {

namespace {

using Clock = std::chrono::steady_clock;

struct StateKey {
  std::int64_t px, py, pz, vx, vy, vz;
  bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::int64_t v) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(k.px);
    mix(k.py);
    mix(k.pz);
    mix(k.vx);
    mix(k.vy);
    mix(k.vz);
    return static_cast<std::size_t>(h);
  }
};

struct SearchNode {
  LatticeState state;
  int parent = -1;
  int accel_index = -1;  // edge from parent
  double g = 0.0;        // time + effort tie-break
};

struct OpenEntry {
  double f;
  double g;
  int node;
};

struct OpenCompare {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.node > b.node;
  }
};

}  // namespace

MplResult plan_mpl(const VoxelGrid& grid, const LatticeState& start, const Vec3& goal,
                   const QuadrotorSpec& quad, const PlannerBudget& budget,
                   const MplConfig& config) {
  budget.validate();
  quad.validate();
  if (start.velocity.cwiseAbs().maxCoeff() > quad.v_max + 1e-9) {
    throw ContractError("plan_mpl: start velocity exceeds v_max");
  }
  if (!grid.free_at(start.position)) throw ContractError("plan_mpl: start not in free space");

  const auto t0 = Clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(budget.timeout_s));

  const int na = std::max(2, config.accels_per_axis);
  std::vector<Vec3> accel_set;
  accel_set.reserve(static_cast<std::size_t>(na) * na * na);
  for (int ix = 0; ix < na; ++ix) {
    for (int iy = 0; iy < na; ++iy) {
      for (int iz = 0; iz < na; ++iz) {
        auto level = [&](int i) { return -quad.a_max + 2.0 * quad.a_max * i / (na - 1); };
        accel_set.emplace_back(level(ix), level(iy), level(iz));
      }
    }
  }

  const double dt = config.dt;
  const double vel_bin = config.velocity_bin > 0.0 ? config.velocity_bin : quad.v_max / 8.0;
  const double pos_bin = grid.resolution();
  const double sample_step =
      config.arc_sample_spacing > 0.0 ? config.arc_sample_spacing : grid.resolution() / 2.0;

  auto key_of = [&](const LatticeState& s) {
    auto q = [](double v, double bin) { return static_cast<std::int64_t>(std::floor(v / bin)); };
    return StateKey{q(s.position[0], pos_bin), q(s.position[1], pos_bin),
                    q(s.position[2], pos_bin), q(s.velocity[0], vel_bin),
                    q(s.velocity[1], vel_bin), q(s.velocity[2], vel_bin)};
  };
  auto heuristic = [&](const LatticeState& s) { return (goal - s.position).norm() / quad.v_max; };

  std::vector<SearchNode> nodes;
  nodes.push_back({start, -1, -1, 0.0});
  std::unordered_map<StateKey, double, StateKeyHash> best_g;
  best_g.emplace(key_of(start), 0.0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenCompare> open;
  open.push({heuristic(start), 0.0, 0});

  MplResult result;
  PlanResult& plan = result.plan;
  int goal_node = -1;
  bool timed_out = false;

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const SearchNode node = nodes[top.node];
    if (top.g > node.g + 1e-12) continue;  // stale
    ++plan.expansions;
    if (plan.expansions > config.max_expansions) {
      timed_out = true;
      break;
    }
    if (budget.enforce_wall_clock && (plan.expansions & 0xff) == 0 && Clock::now() > deadline) {
      timed_out = true;
      break;
    }

    if ((node.state.position - goal).norm() <= budget.goal_threshold_m) {
      goal_node = top.node;
      break;
    }

    for (int ai = 0; ai < static_cast<int>(accel_set.size()); ++ai) {
      const Primitive prim{node.state, accel_set[ai], dt};
      const LatticeState next = prim.propagate(dt);
      // Velocity is linear in t, so the per-axis extrema sit at the
      // endpoints.
      if (next.velocity.cwiseAbs().maxCoeff() > quad.v_max + 1e-9) continue;

      bool collides = false;
      // Speed is linear in t per axis, so the arc length is bounded by the
      // faster endpoint.
      const double arc_bound = std::max(node.state.velocity.norm(), next.velocity.norm()) * dt;
      const int n_samples = std::max(2, static_cast<int>(std::ceil(arc_bound / sample_step)));
      for (int s = 1; s <= n_samples; ++s) {
        const LatticeState at = prim.propagate(dt * s / n_samples);
        if (!grid.free_at(at.position)) {
          collides = true;
          break;
        }
      }
      if (collides) continue;

      const double g_new =
          node.g + dt + config.effort_weight * accel_set[ai].squaredNorm() * dt;
      const StateKey key = key_of(next);
      auto it = best_g.find(key);
      if (it != best_g.end() && it->second <= g_new + 1e-12) continue;
      best_g[key] = g_new;
      nodes.push_back({next, top.node, ai, g_new});
      open.push({g_new + heuristic(next), g_new, static_cast<int>(nodes.size()) - 1});
    }
  }

  plan.iterations = plan.expansions;
  if (goal_node == -1) {
    plan.status = timed_out ? PlanStatus::kTimeout : PlanStatus::kInfeasible;
    plan.path.compute_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
  }

  // Reconstruct the primitive chain, then emit arc samples as waypoints.
  std::vector<int> chain;
  for (int idx = goal_node; idx != -1; idx = nodes[idx].parent) chain.push_back(idx);
  std::reverse(chain.begin(), chain.end());

  for (std::size_t i = 1; i < chain.size(); ++i) {
    const SearchNode& child = nodes[chain[i]];
    result.primitives.push_back({nodes[chain[i - 1]].state, accel_set[child.accel_index], dt});
  }

  std::vector<Vec3>& wp = plan.path.waypoints;
  wp.push_back(start.position);
  for (const Primitive& prim : result.primitives) {
    const double arc_step = grid.resolution();
    const double arc_bound =
        std::max(prim.from.velocity.norm(), prim.propagate(dt).velocity.norm()) * dt;
    const int n = std::max(1, static_cast<int>(std::ceil(arc_bound / arc_step)));
    for (int s = 1; s <= n; ++s) {
      const Vec3 p = prim.propagate(dt * s / n).position;
      if ((p - wp.back()).norm() > 1e-9) wp.push_back(p);
    }
  }
  if (wp.size() < 2) wp.push_back(nodes[goal_node].state.position + Vec3(1e-6, 0, 0));

  plan.status = PlanStatus::kSuccess;
  plan.path.planner = "mpl";
  plan.path.cost = plan.path.length();
  plan.path.compute_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace mpb
