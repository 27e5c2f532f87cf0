#include "mpb/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mpb/cloud_io.hpp"
#include "mpb/collision.hpp"
#include "mpb/corridor.hpp"
#include "mpb/jps.hpp"
#include "mpb/min_jerk.hpp"
#include "mpb/rng.hpp"
#include "mpb/validation.hpp"

namespace mpb {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---- config JSON ----

json size_range_to_json(const SizeRange& r) { return json{{"lo", r.lo}, {"hi", r.hi}}; }

SizeRange size_range_from_json(const json& j, const SizeRange& fallback) {
  if (j.is_null()) return fallback;
  return SizeRange{j.value("lo", fallback.lo), j.value("hi", fallback.hi)};
}

json maze_to_json(const MazeSpec& m) {
  return json{{"p", m.p},
              {"cells_x", m.cells_x},
              {"cells_y", m.cells_y},
              {"cell_size", m.cell_size},
              {"wall_thickness", m.wall_thickness},
              {"wall_height", m.wall_height},
              {"point_spacing", m.point_spacing},
              {"seed", m.seed}};
}

MazeSpec maze_from_json(const json& j) {
  MazeSpec m;
  m.p = j.value("p", m.p);
  m.cells_x = j.value("cells_x", m.cells_x);
  m.cells_y = j.value("cells_y", m.cells_y);
  m.cell_size = j.value("cell_size", m.cell_size);
  m.wall_thickness = j.value("wall_thickness", m.wall_thickness);
  m.wall_height = j.value("wall_height", m.wall_height);
  m.point_spacing = j.value("point_spacing", m.point_spacing);
  m.seed = j.value("seed", m.seed);
  return m;
}

json obstacle_to_json(const ObstacleSpec& o) {
  return json{{"cylinders", o.cylinders},
              {"cylinder_radius", size_range_to_json(o.cylinder_radius)},
              {"cylinder_height", size_range_to_json(o.cylinder_height)},
              {"ellipsoids", o.ellipsoids},
              {"ellipsoid_semi_axis", size_range_to_json(o.ellipsoid_semi_axis)},
              {"boxes", o.boxes},
              {"box_edge", size_range_to_json(o.box_edge)},
              {"gates", o.gates},
              {"gate_ring_radius", size_range_to_json(o.gate_ring_radius)},
              {"gate_tube_radius", size_range_to_json(o.gate_tube_radius)},
              {"point_spacing", o.point_spacing},
              {"placement_margin", o.placement_margin},
              {"fill_interior", o.fill_interior},
              {"seed", o.seed}};
}

ObstacleSpec obstacle_from_json(const json& j) {
  ObstacleSpec o;
  o.cylinders = j.value("cylinders", o.cylinders);
  o.cylinder_radius = size_range_from_json(j.value("cylinder_radius", json()), o.cylinder_radius);
  o.cylinder_height = size_range_from_json(j.value("cylinder_height", json()), o.cylinder_height);
  o.ellipsoids = j.value("ellipsoids", o.ellipsoids);
  o.ellipsoid_semi_axis =
      size_range_from_json(j.value("ellipsoid_semi_axis", json()), o.ellipsoid_semi_axis);
  o.boxes = j.value("boxes", o.boxes);
  o.box_edge = size_range_from_json(j.value("box_edge", json()), o.box_edge);
  o.gates = j.value("gates", o.gates);
  o.gate_ring_radius =
      size_range_from_json(j.value("gate_ring_radius", json()), o.gate_ring_radius);
  o.gate_tube_radius =
      size_range_from_json(j.value("gate_tube_radius", json()), o.gate_tube_radius);
  o.point_spacing = j.value("point_spacing", o.point_spacing);
  o.placement_margin = j.value("placement_margin", o.placement_margin);
  o.fill_interior = j.value("fill_interior", o.fill_interior);
  o.seed = j.value("seed", o.seed);
  return o;
}

json bounds_to_json(const Bounds& b) {
  return json{{"min", {b.min_corner[0], b.min_corner[1], b.min_corner[2]}},
              {"max", {b.max_corner[0], b.max_corner[1], b.max_corner[2]}}};
}

Bounds bounds_from_json(const json& j, const Bounds& fallback) {
  if (j.is_null()) return fallback;
  Bounds b = fallback;
  if (j.contains("min")) {
    for (int k = 0; k < 3; ++k) b.min_corner[k] = j["min"][k].get<double>();
  }
  if (j.contains("max")) {
    for (int k = 0; k < 3; ++k) b.max_corner[k] = j["max"][k].get<double>();
  }
  return b;
}

}  // namespace

void SuiteConfig::validate() const {
  if (families.empty()) throw ConfigError("SuiteConfig: need at least one family");
  for (const FamilyConfig& f : families) {
    if (f.family != "maze" && f.family != "obstacle" && f.family != "real") {
      throw ConfigError("SuiteConfig: unknown family '" + f.family + "'");
    }
    if (f.count <= 0) throw ConfigError("SuiteConfig: family count must be > 0");
    if (f.family == "real" && f.cloud_files.empty()) {
      throw ConfigError("SuiteConfig: real family needs cloud_files");
    }
  }
  if (frontends.empty() || backends.empty()) {
    throw ConfigError("SuiteConfig: planner matrix must be non-empty");
  }
  for (const std::string& fe : frontends) {
    if (fe != "jps" && fe != "rrt_star" && fe != "mpl") {
      throw ConfigError("SuiteConfig: unknown frontend '" + fe + "'");
    }
  }
  for (const std::string& be : backends) {
    if (be != "flatness") throw ConfigError("SuiteConfig: unknown backend '" + be + "'");
  }
  quadrotor.validate();
  budget.validate();
  if (inflation_margin < 0.0) throw ConfigError("SuiteConfig: inflation_margin must be >= 0");
  if (parallelism < 1) throw ConfigError("SuiteConfig: parallelism must be >= 1");
  if (!bounds.valid()) throw ConfigError("SuiteConfig: invalid bounds");
}

std::string suite_config_to_json(const SuiteConfig& c) {
  json j;
  j["families"] = json::array();
  for (const FamilyConfig& f : c.families) {
    json jf{{"family", f.family}, {"count", f.count}};
    if (f.family == "maze") jf["maze"] = maze_to_json(f.maze);
    if (f.family == "obstacle") jf["obstacle"] = obstacle_to_json(f.obstacle);
    if (f.family == "real") jf["cloud_files"] = f.cloud_files;
    j["families"].push_back(jf);
  }
  j["seed_base"] = c.seed_base;
  j["frontends"] = c.frontends;
  j["backends"] = c.backends;
  j["quadrotor"] = json{{"radius", c.quadrotor.radius},
                        {"v_max", c.quadrotor.v_max},
                        {"a_max", c.quadrotor.a_max},
                        {"mass", c.quadrotor.mass},
                        {"max_thrust", c.quadrotor.max_thrust}};
  j["budget"] = json{{"timeout_s", c.budget.timeout_s},
                     {"goal_threshold_m", c.budget.goal_threshold_m},
                     {"enforce_wall_clock", c.budget.enforce_wall_clock}};
  j["inflation_margin"] = c.inflation_margin;
  j["parallelism"] = c.parallelism;
  j["bounds"] = bounds_to_json(c.bounds);
  j["min_separation"] = c.min_separation;
  j["simplify_paths"] = c.simplify_paths;
  j["rrt"] = json{{"goal_bias", c.rrt.goal_bias},
                  {"steer_length_m", c.rrt.steer_length_m},
                  {"rewire_gamma", c.rrt.rewire_gamma},
                  {"max_iterations", c.rrt.max_iterations}};
  j["mpl"] = json{{"accels_per_axis", c.mpl.accels_per_axis},
                  {"dt", c.mpl.dt},
                  {"effort_weight", c.mpl.effort_weight},
                  {"max_expansions", c.mpl.max_expansions}};
  j["optimizer"] = json{{"corridor_weight", c.optimizer.corridor_weight},
                        {"velocity_weight", c.optimizer.velocity_weight},
                        {"acceleration_weight", c.optimizer.acceleration_weight},
                        {"time_weight", c.optimizer.time_weight},
                        {"samples_per_segment", c.optimizer.samples_per_segment},
                        {"max_inner_iterations", c.optimizer.max_inner_iterations},
                        {"max_penalty_rounds", c.optimizer.max_penalty_rounds},
                        {"time_scale_factor", c.optimizer.time_scale_factor},
                        {"corridor_margin", c.optimizer.corridor_margin}};
  return j.dump(2);
}

SuiteConfig suite_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("suite config: ") + e.what());
  }
  SuiteConfig c;
  if (j.contains("families")) {
    c.families.clear();
    for (const json& jf : j["families"]) {
      FamilyConfig f;
      f.family = jf.value("family", "");
      f.count = jf.value("count", 0);
      if (jf.contains("maze")) f.maze = maze_from_json(jf["maze"]);
      if (jf.contains("obstacle")) f.obstacle = obstacle_from_json(jf["obstacle"]);
      if (jf.contains("cloud_files")) {
        f.cloud_files = jf["cloud_files"].get<std::vector<std::string>>();
      }
      c.families.push_back(f);
    }
  }
  c.seed_base = j.value("seed_base", c.seed_base);
  if (j.contains("frontends")) c.frontends = j["frontends"].get<std::vector<std::string>>();
  if (j.contains("backends")) c.backends = j["backends"].get<std::vector<std::string>>();
  if (j.contains("quadrotor")) {
    const json& q = j["quadrotor"];
    c.quadrotor.radius = q.value("radius", c.quadrotor.radius);
    c.quadrotor.v_max = q.value("v_max", c.quadrotor.v_max);
    c.quadrotor.a_max = q.value("a_max", c.quadrotor.a_max);
    c.quadrotor.mass = q.value("mass", c.quadrotor.mass);
    c.quadrotor.max_thrust = q.value("max_thrust", c.quadrotor.max_thrust);
  }
  if (j.contains("budget")) {
    c.budget.timeout_s = j["budget"].value("timeout_s", c.budget.timeout_s);
    c.budget.goal_threshold_m = j["budget"].value("goal_threshold_m", c.budget.goal_threshold_m);
    c.budget.enforce_wall_clock =
        j["budget"].value("enforce_wall_clock", c.budget.enforce_wall_clock);
  }
  c.inflation_margin = j.value("inflation_margin", c.inflation_margin);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.bounds = bounds_from_json(j.value("bounds", json()), c.bounds);
  c.min_separation = j.value("min_separation", c.min_separation);
  c.simplify_paths = j.value("simplify_paths", c.simplify_paths);
  if (j.contains("rrt")) {
    const json& r = j["rrt"];
    c.rrt.goal_bias = r.value("goal_bias", c.rrt.goal_bias);
    c.rrt.steer_length_m = r.value("steer_length_m", c.rrt.steer_length_m);
    c.rrt.rewire_gamma = r.value("rewire_gamma", c.rrt.rewire_gamma);
    c.rrt.max_iterations = r.value("max_iterations", c.rrt.max_iterations);
  }
  if (j.contains("mpl")) {
    const json& m = j["mpl"];
    c.mpl.accels_per_axis = m.value("accels_per_axis", c.mpl.accels_per_axis);
    c.mpl.dt = m.value("dt", c.mpl.dt);
    c.mpl.effort_weight = m.value("effort_weight", c.mpl.effort_weight);
    c.mpl.max_expansions = m.value("max_expansions", c.mpl.max_expansions);
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    c.optimizer.corridor_weight = o.value("corridor_weight", c.optimizer.corridor_weight);
    c.optimizer.velocity_weight = o.value("velocity_weight", c.optimizer.velocity_weight);
    c.optimizer.acceleration_weight =
        o.value("acceleration_weight", c.optimizer.acceleration_weight);
    c.optimizer.time_weight = o.value("time_weight", c.optimizer.time_weight);
    c.optimizer.samples_per_segment =
        o.value("samples_per_segment", c.optimizer.samples_per_segment);
    c.optimizer.max_inner_iterations =
        o.value("max_inner_iterations", c.optimizer.max_inner_iterations);
    c.optimizer.max_penalty_rounds = o.value("max_penalty_rounds", c.optimizer.max_penalty_rounds);
    c.optimizer.time_scale_factor = o.value("time_scale_factor", c.optimizer.time_scale_factor);
    c.optimizer.corridor_margin = o.value("corridor_margin", c.optimizer.corridor_margin);
  }
  return c;
}

// ---- pipeline ----

MapContext::MapContext(const ScenarioCase& scenario, const SuiteConfig& config)
    : grid(discretize(scenario.cloud, scenario.bounds, config.quadrotor.radius / 2.0)),
      inflated(inflate(grid, config.inflation_margin)) {}

CaseResult run_case(const ScenarioCase& scenario, const MapContext& context,
                    const MapRecord* map_record, const std::string& frontend,
                    const std::string& backend, const SuiteConfig& config) {
  CaseResult r;
  r.map_id = scenario.id;
  r.family = scenario.family;
  r.seed = scenario.seed;
  r.frontend = frontend;
  r.backend = backend;
  if (map_record) {
    r.has_ecs = map_record->has_ecs;
    r.ecs = map_record->ecs;
  }

  // Front-end stage. Suite runs use the deterministic iteration budgets so
  // that reruns and different parallelism degrees agree bit-exactly.
  PlanResult plan;
  PlannerBudget budget = config.budget;
  budget.enforce_wall_clock = false;
  const auto fe_t0 = Clock::now();
  try {
    if (frontend == "jps") {
      plan = plan_jps(context.inflated, scenario.start, scenario.goal, budget);
    } else if (frontend == "rrt_star") {
      plan = plan_rrt_star(context.inflated, scenario.start, scenario.goal, budget,
                           mix_seed(scenario.seed, 11), config.rrt);
    } else if (frontend == "mpl") {
      LatticeState s0;
      s0.position = scenario.start;
      plan = plan_mpl(context.inflated, s0, scenario.goal, config.quadrotor, budget, config.mpl)
                 .plan;
    } else {
      throw ConfigError("run_case: unknown frontend '" + frontend + "'");
    }
  } catch (const ContractError&) {
    plan.status = PlanStatus::kInfeasible;
  }
  r.fe_time_ms = plan.path.compute_time_s > 0.0 ? plan.path.compute_time_s * 1000.0
                                                : ms_since(fe_t0);
  r.fe_status = to_string(plan.status);
  if (plan.status != PlanStatus::kSuccess) {
    r.total_time_ms = r.fe_time_ms;
    return r;
  }
  r.fe_cost_m = plan.path.cost;
  r.fe_waypoints = static_cast<int>(plan.path.waypoints.size());

  // Independent validation of the front-end path; a failure counts toward
  // the front-end collision rate and short-circuits the pipeline.
  std::vector<Vec3> waypoints = plan.path.waypoints;
  if ((waypoints.front() - scenario.start).norm() > 1e-9) {
    waypoints.insert(waypoints.begin(), scenario.start);
  }
  if (!validate_path(waypoints, context.inflated).ok) {
    r.fe_status = "collision";
    r.collision = true;
    r.total_time_ms = r.fe_time_ms;
    return r;
  }

  // Back-end stage (corridor construction counts into back-end time).
  const auto be_t0 = Clock::now();
  try {
    if (config.simplify_paths) waypoints = simplify_path(waypoints, context.inflated);
    Corridor corridor = build_corridor(waypoints, context.inflated);
    r.corridor_polytopes = static_cast<int>(corridor.polytopes.size());
    const CorridorCheck check = verify_corridor(corridor, context.inflated, waypoints);
    if (!check.all_ok()) {
      r.be_status = "opt-failure";
      r.be_time_ms = ms_since(be_t0);
      r.total_time_ms = r.fe_time_ms + r.be_time_ms;
      return r;
    }
    if (backend != "flatness") throw ConfigError("run_case: unknown backend '" + backend + "'");
    const MotionState start_state = MotionState::rest(waypoints.front());
    const MotionState goal_state = MotionState::rest(waypoints.back());
    OptimizeOutcome outcome =
        optimize_trajectory(corridor, start_state, goal_state, config.quadrotor, config.optimizer);
    if (!outcome.success) {
      r.be_status = "opt-failure";
      r.be_time_ms = ms_since(be_t0);
      r.total_time_ms = r.fe_time_ms + r.be_time_ms;
      return r;
    }
    r.be_status = "success";
    const FeasibilityReport report =
        check_dynamic_feasibility(outcome.trajectory, config.quadrotor,
                                  config.optimizer.feasibility_dt, &context.inflated, &corridor);
    r.traj_duration_s = report.duration;
    r.traj_mean_sq_jerk = report.mean_squared_jerk;
    r.collision = report.collision_samples > 0;
    r.limits_ok = report.within_limits(config.quadrotor, config.optimizer.limit_norm) &&
                  report.min_corridor_margin >= -1e-6;
    r.trajectory = std::move(outcome.trajectory);
  } catch (const ContractError&) {
    r.be_status = "opt-failure";
  } catch (const ConfigError&) {
    r.be_status = "opt-failure";
  }
  r.be_time_ms = ms_since(be_t0);
  r.total_time_ms = r.fe_time_ms + r.be_time_ms;
  return r;
}

// ---- suite ----

namespace {

struct GeneratedMap {
  ScenarioCase scenario;
  std::string generator_json;
};

bool feasible_with(const VoxelGrid& inflated, const Vec3& start, const Vec3& goal,
                   const PlannerBudget& budget) {
  if (!inflated.free_at(start) || !inflated.free_at(goal)) return false;
  PlannerBudget filter = budget;
  filter.timeout_s = std::max(budget.timeout_s, 2.0);
  filter.enforce_wall_clock = false;
  try {
    return plan_jps(inflated, start, goal, filter).status == PlanStatus::kSuccess;
  } catch (const ContractError&) {
    return false;
  }
}

}  // namespace

SuiteResult run_suite(const SuiteConfig& config) {
  config.validate();
  SuiteResult suite;
  suite.config = config;

  // Deterministic, feasibility-filtered map generation.
  for (std::size_t fi = 0; fi < config.families.size(); ++fi) {
    const FamilyConfig& fam = config.families[fi];
    int generated = 0;
    const int max_attempts = fam.count * 50 + 50;
    for (int attempt = 0; attempt < max_attempts && generated < fam.count; ++attempt) {
      const std::uint64_t seed = mix_seed(config.seed_base, fi * 1000003ULL + attempt);
      ScenarioCase scenario;
      scenario.family = fam.family;
      scenario.seed = seed;
      scenario.bounds = config.bounds;
      try {
        if (fam.family == "maze") {
          MazeSpec spec = fam.maze;
          spec.seed = seed;
          scenario.cloud = generate_maze(spec, config.bounds);
          maze_corner_positions(spec, config.bounds, &scenario.start, &scenario.goal);
          scenario.spec_hash = std::to_string(std::hash<std::string>{}(maze_to_json(spec).dump()));
        } else if (fam.family == "obstacle") {
          ObstacleSpec spec = fam.obstacle;
          spec.seed = seed;
          scenario.cloud = generate_obstacle_map(spec, config.bounds);
          scenario.spec_hash =
              std::to_string(std::hash<std::string>{}(obstacle_to_json(spec).dump()));
        } else {
          const std::string& file = fam.cloud_files[attempt % fam.cloud_files.size()];
          Bounds crop_box = config.bounds;
          scenario.cloud = crop(load_point_cloud(file), crop_box);
          Bounds local = config.bounds;
          local.max_corner = local.max_corner - local.min_corner;
          local.min_corner = Vec3::Zero();
          scenario.bounds = local;
          scenario.spec_hash = file;
        }

        const VoxelGrid grid =
            discretize(scenario.cloud, scenario.bounds, config.quadrotor.radius / 2.0);
        const VoxelGrid inflated = inflate(grid, config.inflation_margin);
        if (fam.family != "maze") {
          auto [s, g] = sample_start_goal(inflated, config.min_separation, seed);
          scenario.start = s;
          scenario.goal = g;
        }
        if (!feasible_with(inflated, scenario.start, scenario.goal, config.budget)) continue;

        MapRecord record;
        char idbuf[64];
        std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", fam.family.c_str(), generated);
        scenario.id = idbuf;
        record.scenario = std::move(scenario);
        try {
          record.ecs = ecs(record.scenario.cloud, record.scenario.bounds, config.quadrotor);
          record.has_ecs = true;
        } catch (const UndefinedMetricError&) {
          record.has_ecs = false;
        }
        suite.maps.push_back(std::move(record));
        ++generated;
      } catch (const ConfigError&) {
        continue;  // infeasible sampling or generation; try the next seed
      }
    }
    if (generated < fam.count) {
      throw ConfigError("run_suite: could not generate enough feasible '" + fam.family + "' maps");
    }
  }

  const int pairs = static_cast<int>(config.frontends.size() * config.backends.size());
  suite.results.resize(suite.maps.size() * pairs);

  std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic) num_threads(config.parallelism)
  for (std::int64_t mi = 0; mi < static_cast<std::int64_t>(suite.maps.size()); ++mi) {
    try {
      const MapRecord& record = suite.maps[static_cast<std::size_t>(mi)];
      const MapContext context(record.scenario, config);
      int pair = 0;
      for (const std::string& fe : config.frontends) {
        for (const std::string& be : config.backends) {
          suite.results[static_cast<std::size_t>(mi) * pairs + pair] =
              run_case(record.scenario, context, &record, fe, be, config);
          ++pair;
        }
      }
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return suite;
}

// ---- statistics ----

namespace {

std::vector<double> ranks_with_ties(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  SpearmanResult out;
  if (x.size() != y.size() || x.size() < 3) return out;
  const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (x_const || y_const) return out;  // undefined
  const std::vector<double> rx = ranks_with_ties(x);
  const std::vector<double> ry = ranks_with_ties(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  if (dx <= 0.0 || dy <= 0.0) return out;
  out.rho = num / std::sqrt(dx * dy);
  out.defined = true;
  return out;
}

EcsCorrelation correlate_ecs(const SuiteResult& suite) {
  EcsCorrelation corr;
  std::vector<double> d, c, s, failures;
  const int pairs =
      static_cast<int>(suite.config.frontends.size() * suite.config.backends.size());
  for (std::size_t mi = 0; mi < suite.maps.size(); ++mi) {
    const MapRecord& record = suite.maps[mi];
    if (!record.has_ecs) continue;
    int failed = 0;
    for (int p = 0; p < pairs; ++p) {
      if (!suite.results[mi * pairs + p].pipeline_success()) ++failed;
    }
    d.push_back(record.ecs.signature.density);
    c.push_back(record.ecs.signature.clutter);
    s.push_back(record.ecs.signature.structure);
    failures.push_back(static_cast<double>(failed));
  }
  corr.maps_with_ecs = static_cast<int>(d.size());
  corr.density = spearman(d, failures);
  corr.clutter = spearman(c, failures);
  corr.structure = spearman(s, failures);
  return corr;
}

// ---- report emission ----

namespace {

const char* kCsvHeader =
    "map_id,family,seed,frontend,backend,ecs_d,ecs_c,ecs_s,ecs_c_raw,ecs_n,ecs_resolution,"
    "fe_status,fe_cost_m,fe_waypoints,fe_time_ms,corridor_polytopes,be_status,traj_duration_s,"
    "traj_mean_sq_jerk,collision,limits_ok,be_time_ms,total_time_ms";

std::string case_csv_row(const CaseResult& r) {
  std::ostringstream os;
  os << r.map_id << ',' << r.family << ',' << r.seed << ',' << r.frontend << ',' << r.backend
     << ',';
  if (r.has_ecs) {
    os << fmt_double(r.ecs.signature.density) << ',' << fmt_double(r.ecs.signature.clutter) << ','
       << fmt_double(r.ecs.signature.structure) << ',' << fmt_double(r.ecs.clutter_raw) << ','
       << r.ecs.occupied << ',' << fmt_double(r.ecs.resolution);
  } else {
    os << "0,,,," << 0 << ',';
  }
  os << ',' << r.fe_status << ',';
  if (r.fe_status == "success" || r.fe_status == "collision") {
    os << fmt_double(r.fe_cost_m) << ',' << r.fe_waypoints;
  } else {
    os << ',';
  }
  os << ',' << fmt_double(r.fe_time_ms) << ',' << r.corridor_polytopes << ',' << r.be_status
     << ',';
  if (r.be_status == "success") {
    os << fmt_double(r.traj_duration_s) << ',' << fmt_double(r.traj_mean_sq_jerk);
  } else {
    os << ',';
  }
  os << ',' << (r.collision ? 1 : 0) << ',' << (r.limits_ok ? 1 : 0) << ','
     << fmt_double(r.be_time_ms) << ',' << fmt_double(r.total_time_ms);
  return os.str();
}

struct GroupStats {
  int cases = 0;
  int fe_success = 0;
  int pipeline_success = 0;
  int collisions = 0;
  double fe_time_ms = 0.0;
  double be_time_ms = 0.0;
  double traj_duration = 0.0;
  double traj_msj = 0.0;
  int traj_count = 0;
};

json stats_to_json(const std::string& family, const std::string& fe, const std::string& be,
                   const GroupStats& g) {
  json j;
  j["family"] = family;
  j["frontend"] = fe;
  j["backend"] = be;
  j["cases"] = g.cases;
  j["fe_success_rate"] = g.cases ? static_cast<double>(g.fe_success) / g.cases : 0.0;
  j["success_rate"] = g.cases ? static_cast<double>(g.pipeline_success) / g.cases : 0.0;
  j["collision_rate_all"] = g.cases ? static_cast<double>(g.collisions) / g.cases : 0.0;
  j["collision_rate_fe_success"] =
      g.fe_success ? static_cast<double>(g.collisions) / g.fe_success : 0.0;
  j["mean_fe_time_ms"] = g.cases ? g.fe_time_ms / g.cases : 0.0;
  j["mean_be_time_ms"] = g.cases ? g.be_time_ms / g.cases : 0.0;
  j["mean_traj_duration_s"] = g.traj_count ? g.traj_duration / g.traj_count : 0.0;
  j["mean_traj_mean_sq_jerk"] = g.traj_count ? g.traj_msj / g.traj_count : 0.0;
  return j;
}

struct RowView {
  std::string family, frontend, backend, fe_status, be_status;
  double fe_time_ms = 0.0, be_time_ms = 0.0, traj_duration = 0.0, traj_msj = 0.0;
  bool collision = false, limits_ok = true, has_traj = false;
};

json summarize_rows(const std::vector<RowView>& rows) {
  std::map<std::string, GroupStats> groups;
  std::map<std::string, std::array<std::string, 3>> keys;
  for (const RowView& r : rows) {
    const std::string key = r.family + "|" + r.frontend + "|" + r.backend;
    GroupStats& g = groups[key];
    keys[key] = {r.family, r.frontend, r.backend};
    ++g.cases;
    const bool fe_ok = r.fe_status == "success";
    const bool ok = fe_ok && r.be_status == "success" && !r.collision && r.limits_ok;
    g.fe_success += fe_ok;
    g.pipeline_success += ok;
    g.collisions += r.collision;
    g.fe_time_ms += r.fe_time_ms;
    g.be_time_ms += r.be_time_ms;
    if (r.has_traj) {
      g.traj_duration += r.traj_duration;
      g.traj_msj += r.traj_msj;
      ++g.traj_count;
    }
  }
  json out;
  out["total_cases"] = rows.size();
  out["groups"] = json::array();
  for (const auto& [key, g] : groups) {
    const auto& k = keys[key];
    out["groups"].push_back(stats_to_json(k[0], k[1], k[2], g));
  }
  return out;
}

}  // namespace

std::string results_csv(const SuiteResult& suite) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const CaseResult& r : suite.results) os << case_csv_row(r) << '\n';
  return os.str();
}

std::string trajectory_to_json(const Trajectory& traj) {
  json j;
  j["T"] = traj.duration();
  j["segments"] = json::array();
  for (const TrajSegment& s : traj.segments()) {
    json js;
    js["duration"] = s.duration;
    for (int axis = 0; axis < 3; ++axis) {
      json coeffs = json::array();
      for (int m = 0; m < 6; ++m) coeffs.push_back(s.coeffs(axis, m));
      js[axis == 0 ? "coeffs_x" : axis == 1 ? "coeffs_y" : "coeffs_z"] = coeffs;
    }
    j["segments"].push_back(js);
  }
  return j.dump(2);
}

void write_trajectory_samples_csv(const Trajectory& traj, double dt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "t,px,py,pz,vx,vy,vz,ax,ay,az,jx,jy,jz\n";
  const int n = std::max(1, static_cast<int>(std::ceil(traj.duration() / dt)));
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(traj.duration(), i * dt);
    const MotionState s = traj.sample(t);
    const Vec3 jk = traj.jerk(t);
    out << fmt_double(t);
    for (int k = 0; k < 3; ++k) out << ',' << fmt_double(s.position[k]);
    for (int k = 0; k < 3; ++k) out << ',' << fmt_double(s.velocity[k]);
    for (int k = 0; k < 3; ++k) out << ',' << fmt_double(s.acceleration[k]);
    for (int k = 0; k < 3; ++k) out << ',' << fmt_double(jk[k]);
    out << '\n';
  }
}

void write_report(const SuiteResult& suite, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

  {
    std::ofstream out(out_dir + "/results.csv");
    if (!out) throw IoError("cannot write results.csv");
    out << results_csv(suite);
  }

  {
    std::vector<RowView> rows;
    for (const CaseResult& r : suite.results) {
      RowView v;
      v.family = r.family;
      v.frontend = r.frontend;
      v.backend = r.backend;
      v.fe_status = r.fe_status;
      v.be_status = r.be_status;
      v.fe_time_ms = r.fe_time_ms;
      v.be_time_ms = r.be_time_ms;
      v.traj_duration = r.traj_duration_s;
      v.traj_msj = r.traj_mean_sq_jerk;
      v.collision = r.collision;
      v.limits_ok = r.limits_ok;
      v.has_traj = r.be_status == "success";
      rows.push_back(v);
    }
    std::ofstream out(out_dir + "/summary.json");
    if (!out) throw IoError("cannot write summary.json");
    out << summarize_rows(rows).dump(2) << '\n';
  }

  {
    const int pairs =
        static_cast<int>(suite.config.frontends.size() * suite.config.backends.size());
    std::ofstream out(out_dir + "/ecs_scatter.csv");
    if (!out) throw IoError("cannot write ecs_scatter.csv");
    out << "map_id,density,clutter,structure,successes\n";
    for (std::size_t mi = 0; mi < suite.maps.size(); ++mi) {
      const MapRecord& record = suite.maps[mi];
      if (!record.has_ecs) continue;
      int successes = 0;
      for (int p = 0; p < pairs; ++p) {
        successes += suite.results[mi * pairs + p].pipeline_success();
      }
      out << record.scenario.id << ',' << fmt_double(record.ecs.signature.density) << ','
          << fmt_double(record.ecs.signature.clutter) << ','
          << fmt_double(record.ecs.signature.structure) << ',' << successes << '\n';
    }
  }

  {
    const EcsCorrelation corr = correlate_ecs(suite);
    json j;
    j["maps_with_ecs"] = corr.maps_with_ecs;
    auto put = [&](const char* name, const SpearmanResult& s) {
      if (s.defined) {
        j["spearman"][name] = s.rho;
      } else {
        j["spearman"][name] = nullptr;
      }
    };
    put("density", corr.density);
    put("clutter", corr.clutter);
    put("structure", corr.structure);
    std::ofstream out(out_dir + "/correlation.json");
    if (!out) throw IoError("cannot write correlation.json");
    out << j.dump(2) << '\n';
  }

  fs::create_directories(out_dir + "/trajectories", ec);
  for (const CaseResult& r : suite.results) {
    if (!r.trajectory) continue;
    const std::string name = r.map_id + "_" + r.frontend + "_" + r.backend + ".json";
    std::ofstream out(out_dir + "/trajectories/" + name);
    if (!out) throw IoError("cannot write trajectory file");
    out << trajectory_to_json(*r.trajectory) << '\n';
  }
}

std::string summarize_results_csv(const std::string& results_csv_path) {
  std::ifstream in(results_csv_path);
  if (!in) throw IoError("cannot open '" + results_csv_path + "'");
  std::string header;
  if (!std::getline(in, header) || header != kCsvHeader) {
    throw IoError("unexpected results.csv header");
  }
  std::vector<RowView> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    cols.resize(23);
    RowView v;
    v.family = cols[1];
    v.frontend = cols[3];
    v.backend = cols[4];
    v.fe_status = cols[11];
    v.fe_time_ms = cols[14].empty() ? 0.0 : std::stod(cols[14]);
    v.be_status = cols[16];
    v.traj_duration = cols[17].empty() ? 0.0 : std::stod(cols[17]);
    v.traj_msj = cols[18].empty() ? 0.0 : std::stod(cols[18]);
    v.collision = cols[19] == "1";
    v.limits_ok = cols[20] == "1";
    v.be_time_ms = cols[21].empty() ? 0.0 : std::stod(cols[21]);
    v.has_traj = v.be_status == "success";
    rows.push_back(v);
  }
  return summarize_rows(rows).dump(2) + "\n";
}

}  // namespace mpb
