#include <doctest.h>

#include <cmath>

#include "mpb/collision.hpp"
#include "mpb/corridor.hpp"
#include "mpb/jps.hpp"
#include "mpb/rng.hpp"
#include "oracles.hpp"

using namespace mpb;

namespace {

Bounds box(double x, double y, double z) {
  Bounds b;
  b.max_corner = Vec3(x, y, z);
  return b;
}

// A random feasible planning instance on a small grid; returns the grid and
// a collision-free waypoint path from JPS plus shortcutting.
struct Instance {
  VoxelGrid grid;
  std::vector<Vec3> path;
};

std::optional<Instance> random_instance(std::uint64_t seed, double fill = 0.2) {
  VoxelGrid grid = oracle::random_grid(box(8, 8, 4), 0.5, fill, seed);
  Rng rng(mix_seed(seed, 1));
  const Vec3i sc = oracle::random_free_cell(grid, rng);
  const Vec3i gc = oracle::random_free_cell(grid, rng);
  if (sc == gc) return std::nullopt;
  PlannerBudget budget;
  budget.timeout_s = 5.0;
  budget.enforce_wall_clock = false;
  const PlanResult r = plan_jps(grid, grid.cell_center(sc), grid.cell_center(gc), budget);
  if (r.status != PlanStatus::kSuccess) return std::nullopt;
  std::vector<Vec3> path = simplify_path(r.path.waypoints, grid);
  return Instance{std::move(grid), std::move(path)};
}

}  // namespace

TEST_CASE("empty grid: one segment expands to the full workspace box") {
  VoxelGrid grid(box(20, 10, 5), 0.1);
  const std::vector<Vec3> path{Vec3(2, 2, 2), Vec3(18, 8, 3)};
  const Corridor c = build_corridor(path, grid);
  REQUIRE(c.polytopes.size() == 1);
  const Polytope& p = c.polytopes.front();
  CHECK(p.lo == Vec3(0, 0, 0));
  CHECK((p.hi - Vec3(20, 10, 5)).norm() <= 1e-9);
  CHECK(verify_corridor(c, grid, path).all_ok());
}

TEST_CASE("one-cell tunnel: the box is the tunnel itself") {
  // Free line of cells along x at (j=1, k=1); everything else occupied.
  VoxelGrid grid(box(8, 1.5, 1.5), 0.5);
  const Vec3i d = grid.dims();
  for (int k = 0; k < d[2]; ++k) {
    for (int j = 0; j < d[1]; ++j) {
      for (int i = 0; i < d[0]; ++i) {
        if (!(j == 1 && k == 1)) grid.set_occupied(i, j, k);
      }
    }
  }
  const std::vector<Vec3> path{grid.cell_center(1, 1, 1), grid.cell_center(14, 1, 1)};
  const Corridor c = build_corridor(path, grid);
  REQUIRE(c.polytopes.size() == 1);
  const Polytope& p = c.polytopes.front();
  CHECK(p.lo_cell == Vec3i(0, 1, 1));
  CHECK(p.hi_cell == Vec3i(15, 1, 1));
  CHECK(box_face_maximal(p, grid));
  CHECK(verify_corridor(c, grid, path).all_ok());
}

TEST_CASE("corridor checks pass on random feasible instances") {
  int built = 0;
  for (std::uint64_t seed = 0; seed < 60 && built < 30; ++seed) {
    auto inst = random_instance(mix_seed(7000, seed));
    if (!inst) continue;
    const Corridor c = build_corridor(inst->path, inst->grid);
    const CorridorCheck check = verify_corridor(c, inst->grid, inst->path);
    CHECK(check.no_occupied_inside);
    CHECK(check.path_covered);
    CHECK(check.overlaps_ok);
    // Every waypoint inside the union; consecutive polytopes share interior.
    for (const Vec3& w : inst->path) {
      bool inside = false;
      for (const Polytope& p : c.polytopes) inside |= p.contains(w, 1e-9);
      CHECK(inside);
    }
    for (const Polytope& p : c.polytopes) CHECK(box_face_maximal(p, inst->grid));
    ++built;
  }
  CHECK(built == 30);
}

TEST_CASE("witness points sit strictly inside both neighbors") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto inst = random_instance(mix_seed(7100, seed));
    if (!inst) continue;
    const Corridor c = build_corridor(inst->path, inst->grid);
    REQUIRE(c.overlap_witness.size() + 1 == c.polytopes.size());
    for (std::size_t i = 0; i + 1 < c.polytopes.size(); ++i) {
      CHECK(c.polytopes[i].contains(c.overlap_witness[i], -1e-12));
      CHECK(c.polytopes[i + 1].contains(c.overlap_witness[i], -1e-12));
    }
  }
}

TEST_CASE("a polytope shifted into an obstacle fails check (a)") {
  VoxelGrid grid(box(8, 4, 2), 0.5);
  grid.set_occupied(8, 4, 2);
  const std::vector<Vec3> path{grid.cell_center(1, 1, 1), grid.cell_center(5, 1, 1)};
  Corridor c = build_corridor(path, grid);
  REQUIRE(!c.polytopes.empty());
  // Build a poisoned polytope covering the occupied cell.
  Polytope bad = Polytope::from_cell_box(grid, Vec3i(7, 3, 1), Vec3i(9, 5, 3), 0);
  c.polytopes.push_back(bad);
  const CorridorCheck check = verify_corridor(c, grid, path);
  CHECK_FALSE(check.no_occupied_inside);
}

TEST_CASE("single-polytope corridor passes the overlap check vacuously") {
  VoxelGrid grid(box(4, 4, 4), 0.5);
  grid.set_occupied(0, 0, 0);
  const std::vector<Vec3> path{grid.cell_center(3, 3, 3), grid.cell_center(6, 6, 6)};
  const Corridor c = build_corridor(path, grid);
  REQUIRE(c.polytopes.size() == 1);
  CHECK(verify_corridor(c, grid, path).overlaps_ok);
}

TEST_CASE("colliding path segments are rejected") {
  VoxelGrid grid(box(4, 1, 1), 0.5);
  grid.set_occupied(4, 0, 0);
  const std::vector<Vec3> path{grid.cell_center(0, 0, 0), grid.cell_center(7, 0, 0)};
  CHECK_THROWS_AS(build_corridor(path, grid), ContractError);
}

TEST_CASE("simplify_path") {
  SUBCASE("collinear free waypoints collapse to the endpoints") {
    VoxelGrid grid(box(10, 2, 2), 0.5);
    grid.set_occupied(0, 3, 3);
    std::vector<Vec3> path;
    for (int i = 1; i < 19; i += 2) path.push_back(grid.cell_center(i, 2, 2));
    const std::vector<Vec3> out = simplify_path(path, grid);
    CHECK(out.size() == 2);
    CHECK(out.front() == path.front());
    CHECK(out.back() == path.back());
  }

  SUBCASE("an L-shaped wall keeps its corner waypoint") {
    VoxelGrid grid(box(3, 3, 1), 1.0);
    grid.set_occupied(1, 1, 0);  // blocks the diagonal shortcut
    const std::vector<Vec3> path{grid.cell_center(0, 0, 0), grid.cell_center(2, 0, 0),
                                 grid.cell_center(2, 2, 0)};
    const std::vector<Vec3> out = simplify_path(path, grid);
    CHECK(out.size() == 3);
  }

  SUBCASE("output never longer, never more waypoints") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto inst = random_instance(mix_seed(7200, seed), 0.25);
      if (!inst) continue;
      // Use the raw JPS path (pre-shortcut) for the comparison.
      PlannerBudget budget;
      budget.enforce_wall_clock = false;
      budget.timeout_s = 5.0;
      const std::vector<Vec3>& raw = inst->path;
      const std::vector<Vec3> out = simplify_path(raw, inst->grid);
      auto length = [](const std::vector<Vec3>& wp) {
        double L = 0.0;
        for (std::size_t i = 1; i < wp.size(); ++i) L += (wp[i] - wp[i - 1]).norm();
        return L;
      };
      CHECK(out.size() <= raw.size());
      CHECK(length(out) <= length(raw) + 1e-9);
    }
  }
}
