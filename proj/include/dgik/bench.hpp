#pragma once

// Randomized benchmark campaigns: model generation, goal sampling from
// feasible configurations, parallel trial execution, and summary statistics
// with Jeffreys confidence intervals and success-vs-tolerance waterfalls.

#include <cstdint>
#include <string>
#include <vector>

#include "dgik/pipeline.hpp"
#include "dgik/stats.hpp"

namespace dgik {

enum class Suite { PlanarChain, PlanarTree, RevoluteChain, RevoluteObstacles };
const char* to_string(Suite s);

enum class ObstacleLayout { None, Octahedron, Cube, Icosahedron };
const char* to_string(ObstacleLayout l);

struct ExperimentSpec {
  Suite suite = Suite::PlanarChain;
  int dof = 6;
  bool limits = false;
  ObstacleLayout obstacles = ObstacleLayout::None;
  double obstacle_scale = 1.5;   // circumradius of the layout polyhedron
  double obstacle_radius = 0.25; // per-sphere radius
  int trials = 100;
  std::uint64_t seed = 0;
  InitMode init = InitMode::Flat;
  GoalKind goal_kind = GoalKind::Direction;
  std::optional<RtrParams> rtr;
  int threads = 1;

  void validate() const;
};

struct TrialRecord {
  int trial_id = 0;
  bool success = false;
  double pos_err_m = 0.0;
  double rot_err_rad = 0.0;
  double limit_violation_frac = 0.0;
  double obstacle_violation_m = 0.0;
  int iterations = 0;
  double runtime_ms = 0.0;
  std::string termination;
};

struct WaterfallRow {
  double tolerance = 0.0;  // position tolerance, meters
  int successes = 0;
  double rate = 0.0;
  double low = 0.0;
  double high = 0.0;
};

struct CampaignSummary {
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  BinomialInterval interval;
  double iter_mean = 0.0, iter_std = 0.0;
  double runtime_mean_ms = 0.0, runtime_std_ms = 0.0;
  std::vector<WaterfallRow> waterfall;
};

struct CampaignResult {
  CampaignSummary summary;
  std::vector<TrialRecord> trials;
};

// Model generators (deterministic given the arguments).
RobotModel make_planar_chain(int dof);
RobotModel make_planar_tree(int dof);  // dof must be 2*(2^depth - 1)
RobotModel make_revolute_chain(int dof);
RobotModel make_spherical_chain(int dof);  // dof = 2 * joint count

// Obstacle centers on the layout's vertices, projected for 2D suites.
std::vector<Obstacle> layout_obstacles(ObstacleLayout layout, int dim, double scale,
                                       double radius);

// The suite's model with limits sampled from the campaign seed.
RobotModel build_model(const ExperimentSpec& spec);

// Deterministic problem instance: samples a feasible goal configuration
// within limits (resampling configurations that collide with obstacles) and
// fixes the goal via forward kinematics. theta_goal, when given, receives the
// sampled configuration.
SolveRequest generate_problem(const ExperimentSpec& spec, int trial_index,
                              Vector* theta_goal = nullptr);

CampaignResult run_campaign(const ExperimentSpec& spec);

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials);
void write_waterfall_csv(const std::string& path, const std::vector<WaterfallRow>& rows);
std::string format_summary(const ExperimentSpec& spec, const CampaignSummary& summary);

}  // namespace dgik
