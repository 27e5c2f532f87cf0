#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpb/ecs.hpp"
#include "mpb/mpl.hpp"
#include "mpb/obstacles.hpp"
#include "mpb/optimizer.hpp"
#include "mpb/rrt_star.hpp"
#include "mpb/scenario.hpp"
#include "mpb/trajectory.hpp"

namespace mpb {

struct FamilyConfig {
  std::string family;  // "maze" | "obstacle" | "real"
  int count = 0;
  MazeSpec maze;
  ObstacleSpec obstacle;
  std::vector<std::string> cloud_files;  // real maps
};

/// The benchmark protocol constants double as the shipped defaults.
struct SuiteConfig {
  std::vector<FamilyConfig> families;
  std::uint64_t seed_base = 1;
  std::vector<std::string> frontends{"jps", "rrt_star", "mpl"};
  std::vector<std::string> backends{"flatness"};
  QuadrotorSpec quadrotor;
  PlannerBudget budget;
  double inflation_margin = 0.3;  // m
  int parallelism = 4;
  Bounds bounds;
  double min_separation = 10.0;  // start/goal spacing for randomized families
  bool simplify_paths = true;
  RrtStarConfig rrt;
  MplConfig mpl;
  OptimizerConfig optimizer;

  void validate() const;
};

std::string suite_config_to_json(const SuiteConfig& config);
SuiteConfig suite_config_from_json(const std::string& json_text);

struct CaseResult {
  std::string map_id;
  std::string family;
  std::uint64_t seed = 0;
  std::string frontend;
  std::string backend;

  bool has_ecs = false;
  EcsReport ecs;

  std::string fe_status;  // success | infeasible | timeout | collision
  double fe_cost_m = 0.0;
  int fe_waypoints = 0;
  double fe_time_ms = 0.0;

  int corridor_polytopes = 0;

  std::string be_status;  // success | opt-failure | "" when the front-end failed
  double traj_duration_s = 0.0;
  double traj_mean_sq_jerk = 0.0;
  bool collision = false;  // independent validation verdict
  bool limits_ok = true;   // rate limits + corridor margin at dt = 0.01
  double be_time_ms = 0.0;
  double total_time_ms = 0.0;

  std::optional<Trajectory> trajectory;  // retained for successes

  bool pipeline_success() const {
    return fe_status == "success" && be_status == "success" && !collision && limits_ok;
  }
};

struct MapRecord {
  ScenarioCase scenario;
  bool has_ecs = false;
  EcsReport ecs;
};

struct SuiteResult {
  SuiteConfig config;
  std::vector<MapRecord> maps;
  std::vector<CaseResult> results;  // maps x frontends x backends, in order
};

/// Shared per-map planning context (planning grid at r/2 plus its inflation).
struct MapContext {
  VoxelGrid grid;
  VoxelGrid inflated;

  MapContext(const ScenarioCase& scenario, const SuiteConfig& config);
};

/// Runs one (map, front-end, back-end) pipeline cell: plan, validate,
/// simplify, corridor, optimize, dense feasibility. Failures are recorded as
/// data, never thrown.
CaseResult run_case(const ScenarioCase& scenario, const MapContext& context,
                    const MapRecord* map_record, const std::string& frontend,
                    const std::string& backend, const SuiteConfig& config);

/// Generates the configured families (feasibility-filtered), runs the whole
/// planner matrix (parallel over maps), and returns canonical-ordered
/// results.
SuiteResult run_suite(const SuiteConfig& config);

struct SpearmanResult {
  double rho = 0.0;
  bool defined = false;
};

struct EcsCorrelation {
  SpearmanResult density, clutter, structure;
  int maps_with_ecs = 0;
};

/// Spearman rank correlation of each ECS component against per-map failure
/// counts across the planner matrix.
EcsCorrelation correlate_ecs(const SuiteResult& suite);

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Emits results.csv, summary.json, ecs_scatter.csv, correlation.json, and
/// per-success trajectory JSON files under out_dir.
void write_report(const SuiteResult& suite, const std::string& out_dir);

/// Serializes results rows (the exact content of results.csv).
std::string results_csv(const SuiteResult& suite);

/// Recomputes summary.json content from a results.csv file (the `report`
/// subcommand); returns the JSON text.
std::string summarize_results_csv(const std::string& results_csv_path);

std::string trajectory_to_json(const Trajectory& traj);
void write_trajectory_samples_csv(const Trajectory& traj, double dt, const std::string& path);

}  // namespace mpb
