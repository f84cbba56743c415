#pragma once

// End-to-end inverse kinematics: graph build, initialization, trust-region
// completion, alignment to the canonical frame, angle recovery, and honest
// error reporting from the forward kinematics of the recovered angles.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgik/bounds.hpp"
#include "dgik/robot.hpp"
#include "dgik/rtr.hpp"

namespace dgik {

enum class InitMode { Flat, BoundSmoothing, Provided };

struct SolveRequest {
  RobotModel model;
  std::vector<Goal> goals;
  std::vector<Obstacle> obstacles;
  InitMode init = InitMode::Flat;
  Matrix provided_p0;  // used when init == Provided
  std::uint64_t seed = 0;
  std::optional<RtrParams> rtr;  // defaults derived from the problem size
  kernels::Kind kernel_kind = kernels::Kind::Auto;
};

struct EvalReport {
  double position_error = 0.0;      // summed over end-effectors, meters
  double rotation_error = 0.0;      // summed over direction goals, radians
  double limit_violation = 0.0;     // max fractional excess over the bound
  double obstacle_violation = 0.0;  // max penetration depth, meters
  bool position_ok = false;
  bool rotation_ok = false;
  bool limits_ok = false;
  bool obstacles_ok = false;
  bool success = false;
};

// Success thresholds: limit excess <= 1% of the bound, penetration <= 0.01 m,
// summed position error < 0.01 m, summed rotation error < 0.01 rad.
EvalReport evaluate_solution(const RobotModel& model, const Vector& theta,
                             const std::vector<Goal>& goals,
                             const std::vector<Obstacle>& obstacles);

struct SolveReport {
  Vector theta;
  double position_error = 0.0;
  double rotation_error = 0.0;
  double limit_violation = 0.0;
  double obstacle_violation = 0.0;
  int iterations = 0;
  double runtime_ms = 0.0;
  bool success = false;
  std::string termination;
  double final_cost = 0.0;
  double grad_norm = 0.0;
  bool coplanarity_warning = false;
};

SolveReport solve_ik(const SolveRequest& req);

}  // namespace dgik
