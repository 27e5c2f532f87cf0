#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mpb/cloud_io.hpp"
#include "mpb/maze.hpp"
#include "mpb/obstacles.hpp"
#include "mpb/rng.hpp"
#include "mpb/scenario.hpp"
#include "oracles.hpp"

using namespace mpb;

namespace {

Bounds default_bounds() { return Bounds{}; }

}  // namespace

TEST_CASE("maze: p = 0 yields a perfect maze (spanning tree)") {
  for (int s = 0; s < 25; ++s) {
    MazeSpec spec;
    spec.p = 0.0;
    spec.seed = mix_seed(1000, s);
    const MazeLayout layout = generate_maze_layout(spec);
    const int cells = spec.cells_x * spec.cells_y;
    CHECK(layout.removed_by_kruskal == cells - 1);
    CHECK(layout.deleted_by_p == 0);
    // Tree property: open walls = edges = nodes - 1, and connected.
    CHECK(layout.open_edges() == cells - 1);
    CHECK(layout.connected());
  }
}

TEST_CASE("maze: p = 1 removes every interior wall") {
  MazeSpec spec;
  spec.p = 1.0;
  spec.seed = 5;
  const MazeLayout layout = generate_maze_layout(spec);
  CHECK(layout.kept_interior() == 0);
  CHECK(layout.connected());
}

TEST_CASE("maze: deletion fraction concentrates around p") {
  // Monte-Carlo over seeds; each maze contributes interior - (cells-1)
  // post-Kruskal walls, each deleted independently with probability p.
  MazeSpec spec;
  spec.p = 0.3;
  spec.cells_x = 5;
  spec.cells_y = 5;
  std::int64_t deleted = 0, candidates = 0;
  for (int s = 0; s < 1000; ++s) {
    spec.seed = mix_seed(2000, s);
    const MazeLayout layout = generate_maze_layout(spec);
    deleted += layout.deleted_by_p;
    candidates += layout.interior_total - layout.removed_by_kruskal;
  }
  const double fraction = static_cast<double>(deleted) / static_cast<double>(candidates);
  CHECK(fraction > 0.27);
  CHECK(fraction < 0.33);
}

TEST_CASE("maze: expected kept walls decrease with p") {
  double prev = 1e9;
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    double mean_kept = 0.0;
    for (int s = 0; s < 60; ++s) {
      MazeSpec spec;
      spec.p = p;
      spec.seed = mix_seed(2100, s);
      mean_kept += generate_maze_layout(spec).kept_interior();
    }
    mean_kept /= 60.0;
    CHECK(mean_kept < prev + 1e-9);
    prev = mean_kept;
  }
}

TEST_CASE("maze cloud: deterministic, bounded footprint, sampled walls") {
  MazeSpec spec;
  spec.seed = 77;
  const Bounds b = default_bounds();
  const PointCloud a = generate_maze(spec, b);
  const PointCloud c = generate_maze(spec, b);
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == c.points[i]);
  CHECK(a.size() > 10000);

  MazeSpec too_big;
  too_big.cells_x = 30;
  CHECK_THROWS_AS(generate_maze(too_big, b), ConfigError);

  Vec3 start, goal;
  maze_corner_positions(spec, b, &start, &goal);
  CHECK(b.contains(start));
  CHECK(b.contains(goal));
}

TEST_CASE("obstacle map: zero counts give an empty cloud") {
  ObstacleSpec spec;
  CHECK(generate_obstacle_map(spec, default_bounds()).empty());
}

TEST_CASE("obstacle map: cylinder points lie on the lateral surface") {
  ObstacleSpec spec;
  spec.cylinders = 1;
  spec.cylinder_radius = {0.5, 0.5};
  spec.cylinder_height = {5.0, 5.0};
  spec.seed = 9;
  const PointCloud cloud = generate_obstacle_map(spec, default_bounds());
  REQUIRE(cloud.size() > 100);
  // Recover the axis from the point centroid (x, y only).
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud.points) centroid += p;
  centroid /= static_cast<double>(cloud.size());
  for (const Vec3& p : cloud.points) {
    const double r = std::hypot(p[0] - centroid[0], p[1] - centroid[1]);
    CHECK(r == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("obstacle map: deterministic in the seed") {
  ObstacleSpec spec;
  spec.cylinders = 3;
  spec.ellipsoids = 2;
  spec.boxes = 2;
  spec.gates = 1;
  spec.seed = 1234;
  const PointCloud a = generate_obstacle_map(spec, default_bounds());
  const PointCloud b = generate_obstacle_map(spec, default_bounds());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);
  CHECK_FALSE(a.empty());
}

TEST_CASE("obstacle map: all points stay inside bounds") {
  ObstacleSpec spec;
  spec.cylinders = 4;
  spec.ellipsoids = 4;
  spec.boxes = 4;
  spec.gates = 3;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    spec.seed = seed;
    const PointCloud cloud = generate_obstacle_map(spec, default_bounds());
    for (const Vec3& p : cloud.points) {
      CHECK((p.array() >= default_bounds().min_corner.array() - 1e-9).all());
      CHECK((p.array() <= default_bounds().max_corner.array() + 1e-9).all());
    }
  }
}

TEST_CASE("obstacle map: oversize shape is a configuration error") {
  ObstacleSpec spec;
  spec.cylinders = 1;
  spec.cylinder_radius = {30.0, 30.0};  // exceeds the box on every axis
  spec.cylinder_height = {30.0, 30.0};
  CHECK_THROWS_AS(generate_obstacle_map(spec, default_bounds()), ConfigError);
}

TEST_CASE("gate points lie on the torus surface") {
  ObstacleSpec spec;
  spec.gates = 1;
  spec.gate_ring_radius = {0.9, 0.9};
  spec.gate_tube_radius = {0.15, 0.15};
  spec.seed = 4;
  const PointCloud cloud = generate_obstacle_map(spec, default_bounds());
  REQUIRE(!cloud.empty());
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud.points) centroid += p;
  centroid /= static_cast<double>(cloud.size());
  // Implicit torus: (sqrt(u^2 + w^2) - R)^2 + v^2 = rt^2 in the ring frame.
  // The yaw is unknown, so check the rotation-invariant quantity instead:
  // every point sits at distance rt from the ring circle of radius R.
  for (const Vec3& p : cloud.points) {
    const Vec3 q = p - centroid;
    const double horizontal = std::hypot(q[0], q[1]);
    // Ring plane is vertical: radial arm in the plane spanned by the yawed
    // x-axis and z. |q| along the ring normal is bounded by rt.
    const double arm = std::hypot(horizontal, q[2]);
    CHECK(arm <= 0.9 + 0.15 + 1e-6);
    CHECK(arm >= 0.9 - 0.15 - 1e-6);
  }
}

TEST_CASE("crop keeps exactly the half-open box and rebases to the origin") {
  Rng rng(42);
  PointCloud cloud;
  for (int i = 0; i < 500; ++i) {
    cloud.points.emplace_back(rng.uniform(-5, 25), rng.uniform(-5, 15), rng.uniform(-5, 10));
  }
  Bounds b;
  b.min_corner = Vec3(2, 1, 0);
  b.max_corner = Vec3(12, 9, 5);
  const PointCloud cropped = crop(cloud, b);
  std::size_t brute = 0;
  for (const Vec3& p : cloud.points) {
    if ((p.array() >= b.min_corner.array()).all() && (p.array() < b.max_corner.array()).all()) {
      ++brute;
    }
  }
  CHECK(cropped.size() == brute);
  for (const Vec3& p : cropped.points) {
    CHECK((p.array() >= 0).all());
    CHECK((p.array() < (b.max_corner - b.min_corner).array()).all());
  }

  Bounds disjoint;
  disjoint.min_corner = Vec3(100, 100, 100);
  disjoint.max_corner = Vec3(101, 101, 101);
  CHECK(crop(cloud, disjoint).empty());
}

TEST_CASE("sample_start_goal postconditions") {
  SUBCASE("forced choice with two far cells") {
    Bounds b;
    b.max_corner = Vec3(16, 1, 1);
    VoxelGrid g(b, 1.0);
    for (int i = 0; i < 16; ++i) g.set_occupied(i, 0, 0);
    g.set_occupied(0, 0, 0, false);
    g.set_occupied(15, 0, 0, false);
    const auto [s, gl] = sample_start_goal(g, 10.0, 1);
    CHECK((s - gl).norm() == doctest::Approx(15.0));
  }
  SUBCASE("all samples satisfy both postconditions") {
    VoxelGrid g = oracle::random_grid(Bounds{}, 0.5, 0.2, 31);
    for (int s = 0; s < 200; ++s) {
      const auto [a, b2] = sample_start_goal(g, 10.0, mix_seed(3000, s));
      CHECK((a - b2).norm() >= 10.0);
      CHECK_FALSE(g.occupied_at(a));
      CHECK_FALSE(g.occupied_at(b2));
    }
  }
  SUBCASE("impossible separation exhausts the attempt budget") {
    Bounds b;
    b.max_corner = Vec3(2, 1, 1);
    VoxelGrid g(b, 1.0);
    CHECK_THROWS_AS(sample_start_goal(g, 100.0, 3), ConfigError);
  }
}

TEST_CASE("filter_feasible agrees with 6-connected flood fill") {
  // Clouds made of random occupied cell centers reproduce the same grid, so
  // the BFS oracle runs on identical occupancy.
  QuadrotorSpec quad;
  const double planning_res = quad.radius / 2.0;
  Bounds b;
  b.max_corner = Vec3(2.0, 1.6, 1.2);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    VoxelGrid g = oracle::random_grid(b, planning_res, 0.3, mix_seed(3100, trial));
    Rng rng(mix_seed(3200, trial));
    const Vec3i sc = oracle::random_free_cell(g, rng);
    const Vec3i gc = oracle::random_free_cell(g, rng);
    if (sc == gc) continue;
    PointCloud cloud;
    const Vec3i d = g.dims();
    for (int k = 0; k < d[2]; ++k) {
      for (int j = 0; j < d[1]; ++j) {
        for (int i = 0; i < d[0]; ++i) {
          if (g.occupied(i, j, k)) cloud.points.push_back(g.cell_center(i, j, k));
        }
      }
    }
    ScenarioCase scenario;
    scenario.cloud = cloud;
    scenario.bounds = b;
    scenario.start = g.cell_center(sc);
    scenario.goal = g.cell_center(gc);
    PlannerBudget budget;
    const bool feasible = filter_feasible(scenario, quad, 0.0, budget);
    const bool connected = oracle::bfs_connected(g, sc, gc);
    CHECK(feasible == connected);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("empty map is trivially feasible; a full wall is not") {
  QuadrotorSpec quad;
  ScenarioCase scenario;
  scenario.bounds = Bounds{};
  scenario.start = Vec3(1, 5, 2.5);
  scenario.goal = Vec3(19, 5, 2.5);
  PlannerBudget budget;
  CHECK(filter_feasible(scenario, quad, 0.3, budget));

  // Wall spanning the whole y/z cross-section at x = 10.
  for (double y = 0.025; y < 10; y += 0.05) {
    for (double z = 0.025; z < 5; z += 0.05) {
      scenario.cloud.points.emplace_back(10.0, y, z);
    }
  }
  CHECK_FALSE(filter_feasible(scenario, quad, 0.3, budget));
}
