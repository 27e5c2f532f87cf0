#include "mpb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mpb {

namespace {

// Upper-level decision variables: one free waypoint per polytope overlap
// plus one log-duration per segment.
struct Variables {
  std::vector<Vec3> interior;    // size M-1
  std::vector<double> log_T;     // size M

  std::vector<double> flat() const {
    std::vector<double> x;
    x.reserve(interior.size() * 3 + log_T.size());
    for (const Vec3& w : interior) {
      x.push_back(w[0]);
      x.push_back(w[1]);
      x.push_back(w[2]);
    }
    for (double u : log_T) x.push_back(u);
    return x;
  }

  void assign(const std::vector<double>& x) {
    std::size_t i = 0;
    for (Vec3& w : interior) {
      w = Vec3(x[i], x[i + 1], x[i + 2]);
      i += 3;
    }
    for (double& u : log_T) u = std::clamp(x[i++], std::log(0.02), std::log(120.0));
  }
};

struct Weights {
  double corridor, velocity, acceleration;
};

class Objective {
 public:
  Objective(const Corridor& corridor, const MotionState& start, const MotionState& goal,
            const QuadrotorSpec& quad, const OptimizerConfig& config)
      : corridor_(corridor), start_(start), goal_(goal), quad_(quad), config_(config) {}

  int evaluations() const { return evals_; }

  void set_durations(const std::vector<double>& log_T) {
    durations_.resize(log_T.size());
    for (std::size_t i = 0; i < log_T.size(); ++i) durations_[i] = std::exp(log_T[i]);
    solver_.emplace(durations_, static_cast<int>(log_T.size()) + 1);
  }

  Trajectory fit(const std::vector<Vec3>& interior) const {
    std::vector<Vec3> wp;
    wp.reserve(interior.size() + 2);
    wp.push_back(start_.position);
    for (const Vec3& w : interior) wp.push_back(w);
    wp.push_back(goal_.position);
    return solver_->solve(wp, start_, goal_);
  }

  double operator()(const std::vector<Vec3>& interior, const Weights& w) {
    ++evals_;
    const Trajectory traj = fit(interior);
    double objective = traj.jerk_energy() + config_.time_weight * traj.duration();
    const auto& segments = traj.segments();
    const int K = config_.samples_per_segment;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const Polytope& poly = corridor_.polytopes[s];
      for (int j = 0; j <= K; ++j) {
        const double tau = segments[s].duration * j / K;
        const Vec3 p = segments[s].position(tau);
        const Vec3 v = segments[s].velocity(tau);
        const Vec3 a = segments[s].acceleration(tau);
        for (std::size_t h = 0; h < poly.normals.size(); ++h) {
          const double viol = poly.normals[h].dot(p) - (poly.offsets[h] - config_.corridor_margin);
          if (viol > 0.0) objective += w.corridor * viol * viol;
        }
        if (config_.limit_norm == LimitNorm::kAxisInf) {
          for (int axis = 0; axis < 3; ++axis) {
            const double vv = std::abs(v[axis]) - quad_.v_max;
            if (vv > 0.0) objective += w.velocity * vv * vv;
            const double av = std::abs(a[axis]) - quad_.a_max;
            if (av > 0.0) objective += w.acceleration * av * av;
          }
        } else {
          const double vv = v.norm() - quad_.v_max;
          if (vv > 0.0) objective += w.velocity * vv * vv;
          const double av = a.norm() - quad_.a_max;
          if (av > 0.0) objective += w.acceleration * av * av;
        }
      }
    }
    return objective;
  }

 private:
  const Corridor& corridor_;
  MotionState start_, goal_;
  QuadrotorSpec quad_;
  OptimizerConfig config_;
  std::vector<double> durations_;
  std::optional<MinJerkSolver> solver_;
  int evals_ = 0;
};

}  // namespace

OptimizeOutcome optimize_trajectory(const Corridor& corridor, const MotionState& start,
                                    const MotionState& goal, const QuadrotorSpec& quad,
                                    const OptimizerConfig& config) {
  quad.validate();
  const int M = static_cast<int>(corridor.polytopes.size());
  if (M == 0) throw ContractError("optimize_trajectory: empty corridor");
  if (!corridor.polytopes.front().contains(start.position, 1e-9)) {
    throw ContractError("optimize_trajectory: start not in first polytope");
  }
  if (!corridor.polytopes.back().contains(goal.position, 1e-9)) {
    throw ContractError("optimize_trajectory: goal not in last polytope");
  }

  OptimizeOutcome outcome;

  Variables vars;
  vars.interior.assign(corridor.overlap_witness.begin(), corridor.overlap_witness.end());
  {
    std::vector<Vec3> wp;
    wp.push_back(start.position);
    for (const Vec3& w : vars.interior) wp.push_back(w);
    wp.push_back(goal.position);
    // Merge coincident knots defensively: nudge zero-length segments apart.
    for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
      if ((wp[i + 1] - wp[i]).norm() < 1e-9 && i + 1 < wp.size() - 1) {
        wp[i + 1] += Vec3(1e-6, 1e-6, 1e-6);
        vars.interior[i] = wp[i + 1];
      }
    }
    std::vector<double> T;
    try {
      T = allocate_times(wp, quad.v_max, quad.a_max);
    } catch (const ContractError&) {
      outcome.failure_reason = "degenerate waypoint layout";
      return outcome;
    }
    for (double t : T) vars.log_T.push_back(std::log(std::max(t, 0.05)));
  }

  Objective objective(corridor, start, goal, quad, config);
  Weights weights{config.corridor_weight, config.velocity_weight, config.acceleration_weight};

  const int n_pos = 3 * static_cast<int>(vars.interior.size());
  const int n = n_pos + M;

  for (int round = 0; round < config.max_penalty_rounds; ++round) {
    ++outcome.penalty_rounds;
    objective.set_durations(vars.log_T);
    double f = objective(vars.interior, weights);
    double step = 0.1;

    for (int iter = 0; iter < config.max_inner_iterations; ++iter) {
      // Forward-difference gradient. Position probes reuse the factorized
      // spline system; duration probes rebuild it.
      std::vector<double> x = vars.flat();
      std::vector<double> grad(n, 0.0);
      for (int i = 0; i < n_pos; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        Variables probe = vars;
        std::vector<double> xp = x;
        xp[i] += h;
        probe.assign(xp);
        grad[i] = (objective(probe.interior, weights) - f) / h;
      }
      for (int i = n_pos; i < n; ++i) {
        const double h = 1e-6;
        Variables probe = vars;
        std::vector<double> xp = x;
        xp[i] += h;
        probe.assign(xp);
        objective.set_durations(probe.log_T);
        grad[i] = (objective(probe.interior, weights) - f) / h;
      }
      objective.set_durations(vars.log_T);

      double gnorm2 = 0.0;
      for (double g : grad) gnorm2 += g * g;
      if (gnorm2 < 1e-18) break;
      const double gnorm = std::sqrt(gnorm2);

      // Backtracking line search along the normalized descent direction.
      bool accepted = false;
      double alpha = std::min(step * 4.0, 1.0);
      for (int trial = 0; trial < 24; ++trial) {
        Variables cand = vars;
        std::vector<double> xc = x;
        for (int i = 0; i < n; ++i) xc[i] -= alpha * grad[i] / gnorm;
        cand.assign(xc);
        objective.set_durations(cand.log_T);
        const double fc = objective(cand.interior, weights);
        if (fc < f - 1e-4 * alpha * gnorm) {
          const double decrease = (f - fc) / std::max(std::abs(f), 1e-12);
          vars = cand;
          f = fc;
          step = alpha;
          accepted = true;
          if (decrease < config.convergence_tol) iter = config.max_inner_iterations;
          break;
        }
        alpha /= 2.0;
      }
      if (!accepted) break;
      objective.set_durations(vars.log_T);
    }

    outcome.final_objective = f;

    // Dense feasibility: corridor violations cannot be fixed by time
    // scaling, so escalate the penalty weights and descend again.
    objective.set_durations(vars.log_T);
    Trajectory traj = objective.fit(vars.interior);
    const FeasibilityReport report =
        check_dynamic_feasibility(traj, quad, config.feasibility_dt, nullptr, &corridor);
    if (report.min_corridor_margin >= -1e-6) break;
    if (round + 1 == config.max_penalty_rounds) {
      outcome.failure_reason = "corridor violations persist after penalty escalation";
      outcome.objective_evaluations = objective.evaluations();
      return outcome;
    }
    weights.corridor *= 10.0;
    weights.velocity *= 10.0;
    weights.acceleration *= 10.0;
  }

  // Rate limits are handled exactly by uniform time dilation, which leaves
  // the spatial path (and therefore corridor containment) unchanged. First
  // contract toward the dilation boundary (the descent inherits slack from
  // the per-segment initial allocation), then expand until dense sampling is
  // clean.
  objective.set_durations(vars.log_T);
  Trajectory traj = objective.fit(vars.interior);
  MotionState scaled_start = start, scaled_goal = goal;

  // Per-segment time reallocation: contract under-used segments and stretch
  // saturated ones so the later uniform dilation binds everywhere at once.
  // Waypoints stay fixed; a sweep is kept only when the refit trajectory
  // still clears the corridor.
  for (int sweep = 0; sweep < 6; ++sweep) {
    const auto& segs = traj.segments();
    std::vector<double> log_T_next = vars.log_T;
    bool moved = false;
    for (std::size_t s = 0; s < segs.size(); ++s) {
      double peak_v = 0.0, peak_a = 0.0;
      const int K = 2 * config.samples_per_segment;
      for (int j = 0; j <= K; ++j) {
        const double tau = segs[s].duration * j / K;
        if (config.limit_norm == LimitNorm::kAxisInf) {
          peak_v = std::max(peak_v, segs[s].velocity(tau).cwiseAbs().maxCoeff());
          peak_a = std::max(peak_a, segs[s].acceleration(tau).cwiseAbs().maxCoeff());
        } else {
          peak_v = std::max(peak_v, segs[s].velocity(tau).norm());
          peak_a = std::max(peak_a, segs[s].acceleration(tau).norm());
        }
      }
      const double use =
          std::max(peak_v / quad.v_max, std::sqrt(std::max(peak_a / quad.a_max, 0.0)));
      const double factor = std::clamp(std::max(use, 0.05), 0.75, 1.3);
      if (std::abs(factor - 1.0) > 0.02) moved = true;
      log_T_next[s] = std::clamp(vars.log_T[s] + std::log(factor), std::log(0.02),
                                 std::log(120.0));
    }
    if (!moved) break;
    std::vector<double> durations(log_T_next.size());
    for (std::size_t i = 0; i < durations.size(); ++i) durations[i] = std::exp(log_T_next[i]);
    std::vector<Vec3> wp;
    wp.push_back(start.position);
    for (const Vec3& w : vars.interior) wp.push_back(w);
    wp.push_back(goal.position);
    Trajectory candidate = min_jerk_fit(wp, durations, scaled_start, scaled_goal);
    const FeasibilityReport report =
        check_dynamic_feasibility(candidate, quad, config.feasibility_dt, nullptr, &corridor);
    if (report.min_corridor_margin < -1e-6) break;
    vars.log_T = std::move(log_T_next);
    traj = std::move(candidate);
  }

  auto refit_scaled = [&](double factor) {
    for (double& u : vars.log_T) u += std::log(factor);
    scaled_start.velocity /= factor;
    scaled_start.acceleration /= factor * factor;
    scaled_goal.velocity /= factor;
    scaled_goal.acceleration /= factor * factor;
    std::vector<double> durations(vars.log_T.size());
    for (std::size_t i = 0; i < durations.size(); ++i) durations[i] = std::exp(vars.log_T[i]);
    std::vector<Vec3> wp;
    wp.push_back(start.position);
    for (const Vec3& w : vars.interior) wp.push_back(w);
    wp.push_back(goal.position);
    return min_jerk_fit(wp, durations, scaled_start, scaled_goal);
  };
  for (int shrink = 0; shrink < config.max_time_scalings; ++shrink) {
    Trajectory candidate = refit_scaled(1.0 / config.time_scale_factor);
    const FeasibilityReport report =
        check_dynamic_feasibility(candidate, quad, config.feasibility_dt, nullptr, &corridor);
    if (report.within_limits(quad, config.limit_norm) && report.min_corridor_margin >= -1e-6) {
      traj = std::move(candidate);
      continue;
    }
    traj = refit_scaled(config.time_scale_factor);  // undo the last shrink
    break;
  }
  for (int scaling = 0; scaling <= config.max_time_scalings; ++scaling) {
    const FeasibilityReport report =
        check_dynamic_feasibility(traj, quad, config.feasibility_dt, nullptr, &corridor);
    if (report.min_corridor_margin < -1e-6) {
      outcome.failure_reason = "corridor violation after time scaling";
      outcome.objective_evaluations = objective.evaluations();
      return outcome;
    }
    if (report.within_limits(quad, config.limit_norm)) {
      outcome.success = true;
      outcome.trajectory = std::move(traj);
      outcome.time_scalings = scaling;
      outcome.objective_evaluations = objective.evaluations();
      return outcome;
    }
    if (scaling == config.max_time_scalings) break;
    traj = refit_scaled(config.time_scale_factor);
  }

  outcome.failure_reason = "rate limits persist after max time scalings";
  outcome.objective_evaluations = objective.evaluations();
  return outcome;
}

FeasibilityReport check_dynamic_feasibility(const Trajectory& traj, const QuadrotorSpec& quad,
                                            double dt, const VoxelGrid* inflated_grid,
                                            const Corridor* corridor) {
  if (!(dt > 0.0)) throw ContractError("check_dynamic_feasibility: dt must be > 0");
  quad.validate();
  FeasibilityReport report;
  report.duration = traj.duration();
  report.mean_squared_jerk = traj.mean_squared_jerk();
  if (traj.empty()) return report;

  const int n = std::max(1, static_cast<int>(std::ceil(traj.duration() / dt)));
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(traj.duration(), i * dt);
    const MotionState s = traj.sample(t);
    report.max_speed_axis = std::max(report.max_speed_axis, s.velocity.cwiseAbs().maxCoeff());
    report.max_accel_axis = std::max(report.max_accel_axis, s.acceleration.cwiseAbs().maxCoeff());
    report.max_speed_norm = std::max(report.max_speed_norm, s.velocity.norm());
    report.max_accel_norm = std::max(report.max_accel_norm, s.acceleration.norm());
    if (inflated_grid && !inflated_grid->free_at(s.position)) ++report.collision_samples;
    if (corridor) {
      double best = -std::numeric_limits<double>::infinity();
      for (const Polytope& p : corridor->polytopes) {
        best = std::max(best, p.margin(s.position));
        if (best >= 0.0) break;
      }
      report.min_corridor_margin = std::min(report.min_corridor_margin, best);
    }
  }
  if (!corridor) report.min_corridor_margin = std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace mpb
