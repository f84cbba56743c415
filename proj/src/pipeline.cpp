#include "dgik/pipeline.hpp"

#include <chrono>
#include <cmath>

namespace dgik {

namespace {

Vector3 embed(const Eigen::RowVectorXd& v) {
  Vector3 out = Vector3::Zero();
  out.head(v.size()) = v.transpose();
  return out;
}

double angle_between(const Vector3& a, const Vector3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

EvalReport evaluate_solution(const RobotModel& model, const Vector& theta,
                             const std::vector<Goal>& goals,
                             const std::vector<Obstacle>& obstacles) {
  const std::vector<Frame> frames = forward_kinematics(model, theta);
  const int k = model.dim();
  EvalReport rep;

  for (const Goal& goal : goals) {
    const int tool = model.tool_index(goal.end_effector);
    if (tool < 0) throw MalformedGraph("evaluate_solution: unknown end-effector");
    const Frame& tf = frames[static_cast<size_t>(tool)];
    rep.position_error += (tf.p.head(k) - embed(goal.targets.row(0)).head(k)).norm();
    if (goal.kind == GoalKind::Direction) {
      Vector3 achieved;
      if (model.kind == ModelKind::Planar) {
        const int parent = model.joints[static_cast<size_t>(tool)].parent;
        achieved = tf.p - frames[static_cast<size_t>(parent)].p;
        rep.rotation_error +=
            angle_between(achieved, embed(goal.targets.row(0)) - embed(goal.targets.row(1)));
      } else {
        achieved = tf.r * Vector3(0.0, 0.0, 1.0);
        rep.rotation_error +=
            angle_between(achieved, embed(goal.targets.row(1)) - embed(goal.targets.row(0)));
      }
    }
  }

  for (size_t j = 0; j < model.joints.size(); ++j) {
    const Joint& joint = model.joints[j];
    if (!joint.limit) continue;
    const int off = model.angle_offset(static_cast<int>(j));
    double angle;
    if (model.kind == ModelKind::Spherical) {
      angle = std::abs(theta(off + 1));  // cone limit acts on the elevation
    } else {
      angle = std::abs(theta(off));
    }
    rep.limit_violation = std::max(rep.limit_violation, (angle - *joint.limit) / *joint.limit);
  }
  rep.limit_violation = std::max(rep.limit_violation, 0.0);

  if (!obstacles.empty()) {
    for (size_t j = 0; j < model.joints.size(); ++j) {
      const Frame& f = frames[j];
      std::vector<Vector3> pts{f.p};
      if (model.kind == ModelKind::Revolute3d && !model.is_tool(static_cast<int>(j)))
        pts.push_back(f.p + f.r * Vector3(0.0, 0.0, 1.0));
      for (const Obstacle& obs : obstacles) {
        for (const Vector3& p : pts) {
          const double dist = (p.head(k) - obs.center).norm();
          rep.obstacle_violation = std::max(rep.obstacle_violation, obs.radius - dist);
        }
      }
    }
    rep.obstacle_violation = std::max(rep.obstacle_violation, 0.0);
  }

  rep.position_ok = rep.position_error < 0.01;
  rep.rotation_ok = rep.rotation_error < 0.01;
  rep.limits_ok = rep.limit_violation <= 0.01;
  rep.obstacles_ok = rep.obstacle_violation <= 0.01;
  rep.success = rep.position_ok && rep.rotation_ok && rep.limits_ok && rep.obstacles_ok;
  return rep;
}

SolveReport solve_ik(const SolveRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  req.model.validate();
  if (req.goals.empty()) throw Error("solve_ik: at least one goal required");
  for (size_t i = 0; i < req.goals.size(); ++i)
    for (size_t j = i + 1; j < req.goals.size(); ++j)
      if (req.goals[i].end_effector == req.goals[j].end_effector)
        throw Error("solve_ik: multiple goals for one end-effector");

  SolveReport report;
  report.coplanarity_warning =
      req.model.kind == ModelKind::Revolute3d && !check_coplanarity(req.model).coplanar;

  DistanceGraph graph = structure_graph(req.model);
  add_base(graph, req.model);
  for (const Goal& goal : req.goals) add_goal(graph, req.model, goal);
  add_joint_limits(graph, req.model);
  add_obstacles(graph, req.model, req.obstacles);

  BuiltProblem built = problem_from_graph(graph);
  const CostModel cost_model(std::move(built.problem), req.kernel_kind);
  const int n = cost_model.n();
  const int k = cost_model.dim();

  const auto finish_failure = [&](const char* termination) {
    report.theta = Vector::Zero(req.model.dof());
    report.termination = termination;
    const EvalReport eval =
        evaluate_solution(req.model, report.theta, req.goals, req.obstacles);
    report.position_error = eval.position_error;
    report.rotation_error = eval.rotation_error;
    report.limit_violation = eval.limit_violation;
    report.obstacle_violation = eval.obstacle_violation;
    report.success = false;
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
  };

  Matrix p0;
  switch (req.init) {
    case InitMode::Provided:
      if (req.provided_p0.rows() != n || req.provided_p0.cols() != k)
        throw ShapeMismatch("solve_ik: provided initial point shape");
      p0 = req.provided_p0;
      break;
    case InitMode::BoundSmoothing: {
      BoundsMatrix bounds;
      try {
        bounds = smooth_bounds(graph, req.kernel_kind);
      } catch (const NegativeCycle&) {
        return finish_failure("InfeasibleBounds");
      }
      p0 = initial_points(sample_pre_edm(bounds, req.seed), k);
      break;
    }
    case InitMode::Flat:
    default: {
      p0 = realize(req.model, Vector::Zero(req.model.dof()), graph);
      // Goal-pinned vertices start at their known positions.
      for (const auto& [row, target] : graph.goal_pins) p0.row(row) = target.transpose();
      break;
    }
  }

  const RtrParams params = req.rtr ? *req.rtr : RtrParams::defaults(n, k);
  const RtrResult result = rtr_solve(cost_model, std::move(p0), params);

  const Matrix aligned = procrustes_align(result.point, built.anchors);
  report.theta = recover_angles(req.model, aligned, built.ordering);

  const EvalReport eval = evaluate_solution(req.model, report.theta, req.goals, req.obstacles);
  report.position_error = eval.position_error;
  report.rotation_error = eval.rotation_error;
  report.limit_violation = eval.limit_violation;
  report.obstacle_violation = eval.obstacle_violation;
  report.success = eval.success;
  report.iterations = result.iterations;
  report.termination = to_string(result.termination);
  report.final_cost = result.cost;
  report.grad_norm = result.grad_norm;
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace dgik
