#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mpb/bench.hpp"
#include "mpb/cloud_io.hpp"
#include "mpb/corridor.hpp"
#include "mpb/ecs.hpp"
#include "mpb/jps.hpp"
#include "mpb/maze.hpp"
#include "mpb/mpl.hpp"
#include "mpb/obstacles.hpp"
#include "mpb/rng.hpp"
#include "mpb/rrt_star.hpp"
#include "mpb/scenario.hpp"
#include "mpb/validation.hpp"

namespace {

using mpb::Vec3;

Vec3 parse_xyz(const std::string& text) {
  Vec3 v;
  std::stringstream ss(text);
  std::string tok;
  for (int k = 0; k < 3; ++k) {
    if (!std::getline(ss, tok, ',')) throw mpb::ConfigError("expected x,y,z triple: " + text);
    v[k] = std::stod(tok);
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mpb::IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_gen(const std::string& family, const std::string& spec_path, int count,
            std::uint64_t seed, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw mpb::IoError("cannot create '" + out_dir + "'");

  mpb::SuiteConfig defaults;
  const mpb::Bounds bounds = defaults.bounds;
  nlohmann::json spec_json;
  if (!spec_path.empty()) spec_json = nlohmann::json::parse(read_file(spec_path));

  int generated = 0;
  for (int attempt = 0; attempt < count * 50 + 50 && generated < count; ++attempt) {
    const std::uint64_t map_seed = mpb::mix_seed(seed, attempt);
    mpb::ScenarioCase scenario;
    scenario.family = family;
    scenario.seed = map_seed;
    scenario.bounds = bounds;
    std::string generator_json;
    try {
      if (family == "maze") {
        mpb::MazeSpec spec;
        if (!spec_path.empty()) {
          // Reuse the suite's JSON field names.
          mpb::SuiteConfig tmp = mpb::suite_config_from_json(
              nlohmann::json{{"families", {{{"family", "maze"}, {"count", 1}, {"maze", spec_json}}}}}
                  .dump());
          spec = tmp.families[0].maze;
        }
        spec.seed = map_seed;
        scenario.cloud = mpb::generate_maze(spec, bounds);
        mpb::maze_corner_positions(spec, bounds, &scenario.start, &scenario.goal);
        generator_json = nlohmann::json{{"p", spec.p},
                                        {"cells_x", spec.cells_x},
                                        {"cells_y", spec.cells_y},
                                        {"cell_size", spec.cell_size},
                                        {"wall_thickness", spec.wall_thickness},
                                        {"point_spacing", spec.point_spacing}}
                             .dump();
      } else if (family == "obstacle") {
        mpb::ObstacleSpec spec;
        spec.cylinders = 12;  // a usable default field when no spec file is given
        if (!spec_path.empty()) {
          mpb::SuiteConfig tmp = mpb::suite_config_from_json(
              nlohmann::json{
                  {"families", {{{"family", "obstacle"}, {"count", 1}, {"obstacle", spec_json}}}}}
                  .dump());
          spec = tmp.families[0].obstacle;
        }
        spec.seed = map_seed;
        scenario.cloud = mpb::generate_obstacle_map(spec, bounds);
        generator_json = spec_json.empty() ? std::string("{}") : spec_json.dump();
      } else {
        throw mpb::ConfigError("gen: family must be maze or obstacle");
      }

      const mpb::VoxelGrid grid =
          mpb::discretize(scenario.cloud, bounds, defaults.quadrotor.radius / 2.0);
      const mpb::VoxelGrid inflated = mpb::inflate(grid, defaults.inflation_margin);
      if (family != "maze") {
        auto [s, g] = mpb::sample_start_goal(inflated, defaults.min_separation, map_seed);
        scenario.start = s;
        scenario.goal = g;
      }
      if (!mpb::filter_feasible(scenario, defaults.quadrotor, defaults.inflation_margin,
                                defaults.budget)) {
        continue;
      }
    } catch (const mpb::ConfigError&) {
      continue;
    }

    char name[64];
    std::snprintf(name, sizeof(name), "%s_%04d", family.c_str(), generated);
    scenario.id = name;
    mpb::save_point_cloud_ply(scenario.cloud, out_dir + "/" + name + ".ply");
    mpb::save_scenario_sidecar(scenario, out_dir + "/" + name + ".json", generator_json);
    ++generated;
  }
  if (generated < count) throw mpb::ConfigError("gen: could not generate enough feasible maps");
  std::cout << "wrote " << generated << " " << family << " maps to " << out_dir << "\n";
  return 0;
}

int run_ecs(const std::vector<std::string>& inputs, const std::string& out_csv) {
  std::ostringstream os;
  os << "map_id,d,c,s,N,resolution\n";
  mpb::SuiteConfig defaults;
  for (const std::string& path : inputs) {
    const mpb::PointCloud cloud = mpb::load_point_cloud(path);
    char buf[128];
    try {
      const mpb::EcsReport report = mpb::ecs(cloud, defaults.bounds, defaults.quadrotor);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", report.signature.density,
                    report.signature.clutter, report.signature.structure);
      os << std::filesystem::path(path).filename().string() << ',' << buf << ','
         << report.occupied << ',' << report.resolution << '\n';
    } catch (const mpb::UndefinedMetricError&) {
      os << std::filesystem::path(path).filename().string() << ",0,,,0,"
         << defaults.quadrotor.radius << '\n';
    }
  }
  if (out_csv.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(out_csv);
    if (!out) throw mpb::IoError("cannot write '" + out_csv + "'");
    out << os.str();
  }
  return 0;
}

int run_plan(const std::string& map_path, const std::string& start_text,
             const std::string& goal_text, const std::string& frontend,
             const std::string& backend, const std::string& out_json,
             const std::string& samples_csv) {
  mpb::SuiteConfig config;
  mpb::ScenarioCase scenario;
  scenario.id = std::filesystem::path(map_path).stem().string();
  scenario.family = "real";
  scenario.bounds = config.bounds;
  scenario.cloud = mpb::load_point_cloud(map_path);
  scenario.start = parse_xyz(start_text);
  scenario.goal = parse_xyz(goal_text);

  const mpb::MapContext context(scenario, config);
  mpb::CaseResult result =
      mpb::run_case(scenario, context, nullptr, frontend, backend.empty() ? "flatness" : backend,
                    config);

  nlohmann::json j;
  j["status"] = backend.empty()
                    ? result.fe_status
                    : (result.pipeline_success() ? "success"
                                                 : (result.fe_status != "success" ? result.fe_status
                                                                                  : result.be_status));
  j["frontend"] = frontend;
  j["cost"] = result.fe_cost_m;
  j["time_ms"] = backend.empty() ? result.fe_time_ms : result.total_time_ms;
  j["waypoints"] = nlohmann::json::array();
  if (result.fe_status == "success") {
    // Re-run the front-end to recover the waypoints (run_case reports
    // metrics only); identical seeds make this bit-exact.
    mpb::PlanResult plan;
    if (frontend == "jps") {
      plan = mpb::plan_jps(context.inflated, scenario.start, scenario.goal, config.budget);
    } else if (frontend == "rrt_star") {
      plan = mpb::plan_rrt_star(context.inflated, scenario.start, scenario.goal, config.budget,
                                mpb::mix_seed(scenario.seed, 11), config.rrt);
    } else {
      mpb::LatticeState s0;
      s0.position = scenario.start;
      plan = mpb::plan_mpl(context.inflated, s0, scenario.goal, config.quadrotor, config.budget,
                           config.mpl)
                 .plan;
    }
    for (const Vec3& w : plan.path.waypoints) j["waypoints"].push_back({w[0], w[1], w[2]});
  }
  if (!backend.empty() && result.trajectory) {
    j["trajectory"] = nlohmann::json::parse(mpb::trajectory_to_json(*result.trajectory));
    if (!samples_csv.empty()) {
      mpb::write_trajectory_samples_csv(*result.trajectory, 0.01, samples_csv);
    }
  }
  if (out_json.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_json);
    if (!out) throw mpb::IoError("cannot write '" + out_json + "'");
    out << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion-planning workbench: environment generation, ECS scoring, two-stage "
               "planning, and benchmark reporting"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate parameterized environments");
  std::string gen_family, gen_spec, gen_out;
  int gen_count = 1;
  std::uint64_t gen_seed = 1;
  gen->add_option("--family", gen_family, "maze | obstacle")->required();
  gen->add_option("--spec", gen_spec, "generator spec JSON file");
  gen->add_option("--count", gen_count, "number of maps");
  gen->add_option("--seed", gen_seed, "base seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  auto* ecs_cmd = app.add_subcommand("ecs", "Score environments (density, clutter, structure)");
  std::vector<std::string> ecs_inputs;
  std::string ecs_out;
  ecs_cmd->add_option("--in", ecs_inputs, "input cloud files (.ply / .xyz)")->required();
  ecs_cmd->add_option("--out", ecs_out, "output CSV (stdout when omitted)");

  auto* plan = app.add_subcommand("plan", "Plan one start/goal query on a map");
  std::string plan_map, plan_start, plan_goal, plan_fe = "jps", plan_be, plan_out, plan_samples;
  plan->add_option("--map", plan_map, "cloud file")->required();
  plan->add_option("--start", plan_start, "x,y,z")->required();
  plan->add_option("--goal", plan_goal, "x,y,z")->required();
  plan->add_option("--frontend", plan_fe, "jps | rrt_star | mpl");
  plan->add_option("--backend", plan_be, "flatness (omit for front-end only)");
  plan->add_option("--out", plan_out, "path JSON output file (stdout when omitted)");
  plan->add_option("--samples-out", plan_samples, "sampled trajectory CSV");

  auto* bench = app.add_subcommand("bench", "Run a planner-matrix benchmark suite");
  std::string bench_config, bench_out;
  bench->add_option("--config", bench_config, "SuiteConfig JSON")->required();
  bench->add_option("--out", bench_out, "output directory")->required();

  auto* report = app.add_subcommand("report", "Recompute summary.json from results.csv");
  std::string report_in;
  report->add_option("--in", report_in, "directory containing results.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_family, gen_spec, gen_count, gen_seed, gen_out);
    if (ecs_cmd->parsed()) return run_ecs(ecs_inputs, ecs_out);
    if (plan->parsed()) {
      return run_plan(plan_map, plan_start, plan_goal, plan_fe, plan_be, plan_out, plan_samples);
    }
    if (bench->parsed()) {
      const mpb::SuiteConfig config = mpb::suite_config_from_json(read_file(bench_config));
      const mpb::SuiteResult suite = mpb::run_suite(config);
      mpb::write_report(suite, bench_out);
      std::cout << "wrote report to " << bench_out << "\n";
      return 0;
    }
    if (report->parsed()) {
      const std::string summary = mpb::summarize_results_csv(report_in + "/results.csv");
      std::ofstream out(report_in + "/summary.json");
      if (!out) throw mpb::IoError("cannot write summary.json");
      out << summary;
      std::cout << summary;
      return 0;
    }
  } catch (const mpb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mpb::ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const mpb::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const mpb::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
