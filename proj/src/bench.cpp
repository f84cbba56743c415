#include "dgik/bench.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace dgik {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Joint make_joint(std::string id, int parent, const Vector3& t, const Matrix3& r,
                 bool actuated = true) {
  Joint j;
  j.id = std::move(id);
  j.parent = parent;
  j.translation = t;
  j.rotation = r;
  j.actuated = actuated;
  return j;
}

const Vector3 kX{1.0, 0.0, 0.0};
const Vector3 kZ{0.0, 0.0, 1.0};

}  // namespace

const char* to_string(Suite s) {
  switch (s) {
    case Suite::PlanarChain: return "planar-chain";
    case Suite::PlanarTree: return "planar-tree";
    case Suite::RevoluteChain: return "revolute-chain";
    case Suite::RevoluteObstacles: return "revolute-obstacles";
  }
  return "unknown";
}

const char* to_string(ObstacleLayout l) {
  switch (l) {
    case ObstacleLayout::None: return "none";
    case ObstacleLayout::Octahedron: return "octahedron";
    case ObstacleLayout::Cube: return "cube";
    case ObstacleLayout::Icosahedron: return "icosahedron";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw Error("ExperimentSpec: trials must be >= 1");
  if (dof < 1) throw Error("ExperimentSpec: dof must be >= 1");
  if (obstacle_scale <= 0.0 || obstacle_radius <= 0.0)
    throw Error("ExperimentSpec: obstacle geometry must be positive");
}

RobotModel make_planar_chain(int dof) {
  if (dof < 1) throw InvalidModel("make_planar_chain: dof >= 1");
  RobotModel model;
  model.kind = ModelKind::Planar;
  model.joints.push_back(make_joint("j0", -1, Vector3::Zero(), Matrix3::Identity()));
  for (int i = 1; i < dof; ++i)
    model.joints.push_back(make_joint("j" + std::to_string(i), i - 1, kX, Matrix3::Identity()));
  model.joints.push_back(make_joint("ee", dof - 1, kX, Matrix3::Identity(), false));
  model.tools.push_back(dof);
  model.validate();
  return model;
}

RobotModel make_planar_tree(int dof) {
  // dof = 2 * (2^depth - 1): two full binary branches below a fixed trunk.
  int depth = 0;
  while (depth < 16 && 2 * ((1 << (depth + 1)) - 1) < dof) ++depth;
  ++depth;
  if (2 * ((1 << depth) - 1) != dof)
    throw InvalidModel("make_planar_tree: dof must be 2*(2^depth - 1), e.g. 6, 14, 30");

  RobotModel model;
  model.kind = ModelKind::Planar;
  model.joints.push_back(make_joint("trunk", -1, Vector3::Zero(), Matrix3::Identity(), false));

  // Breadth-first construction; each level halves the splay angle.
  struct Pending {
    int parent;
    int level;
    double splay;
    std::string id;
  };
  std::vector<Pending> frontier{{0, 1, kPi / 4.0, "l"}, {0, 1, -kPi / 4.0, "r"}};
  while (!frontier.empty()) {
    std::vector<Pending> next;
    for (const Pending& node : frontier) {
      const int idx = static_cast<int>(model.joints.size());
      model.joints.push_back(make_joint(node.id, node.parent, kX, rot_z(node.splay)));
      if (node.level < depth) {
        const double child_splay = kPi / std::pow(2.0, node.level + 2);
        next.push_back({idx, node.level + 1, child_splay, node.id + "l"});
        next.push_back({idx, node.level + 1, -child_splay, node.id + "r"});
      } else {
        const int tool_idx = static_cast<int>(model.joints.size());
        model.joints.push_back(
            make_joint("ee_" + node.id, idx, kX, Matrix3::Identity(), false));
        model.tools.push_back(tool_idx);
      }
    }
    frontier = std::move(next);
  }
  model.validate();
  return model;
}

RobotModel make_revolute_chain(int dof) {
  if (dof < 1) throw InvalidModel("make_revolute_chain: dof >= 1");
  RobotModel model;
  model.kind = ModelKind::Revolute3d;
  model.joints.push_back(make_joint("j0", -1, Vector3::Zero(), Matrix3::Identity()));
  // Alternating parallel and perpendicular-intersecting axes keeps every
  // consecutive pair of joint axes coplanar.
  for (int i = 1; i < dof; ++i) {
    if (i % 2 == 1) {
      model.joints.push_back(make_joint("j" + std::to_string(i), i - 1, kX, Matrix3::Identity()));
    } else {
      const double sign = (i % 4 == 0) ? -1.0 : 1.0;
      model.joints.push_back(
          make_joint("j" + std::to_string(i), i - 1, kZ, rot_x(sign * kPi / 2.0)));
    }
  }
  model.joints.push_back(make_joint("ee", dof - 1, kX, Matrix3::Identity(), false));
  model.tools.push_back(dof);
  model.validate();
  return model;
}

RobotModel make_spherical_chain(int dof) {
  if (dof < 2 || dof % 2 != 0) throw InvalidModel("make_spherical_chain: dof must be even");
  const int joints = dof / 2;
  RobotModel model;
  model.kind = ModelKind::Spherical;
  model.joints.push_back(make_joint("j0", -1, Vector3::Zero(), Matrix3::Identity()));
  for (int i = 1; i < joints; ++i)
    model.joints.push_back(make_joint("j" + std::to_string(i), i - 1, kZ, Matrix3::Identity()));
  model.joints.push_back(make_joint("ee", joints - 1, kZ, Matrix3::Identity(), false));
  model.tools.push_back(joints);
  model.validate();
  return model;
}

std::vector<Obstacle> layout_obstacles(ObstacleLayout layout, int dim, double scale,
                                       double radius) {
  std::vector<Vector> centers;
  const auto push2 = [&](double x, double y) {
    Vector c(2);
    c << x, y;
    centers.push_back(c);
  };
  const auto push3 = [&](double x, double y, double z) {
    Vector c(3);
    c << x, y, z;
    centers.push_back(c);
  };

  switch (layout) {
    case ObstacleLayout::None:
      break;
    case ObstacleLayout::Octahedron:
      if (dim == 2) {
        push2(scale, 0.0);
        push2(-scale, 0.0);
        push2(0.0, scale);
        push2(0.0, -scale);
      } else {
        push3(scale, 0, 0);
        push3(-scale, 0, 0);
        push3(0, scale, 0);
        push3(0, -scale, 0);
        push3(0, 0, scale);
        push3(0, 0, -scale);
      }
      break;
    case ObstacleLayout::Cube: {
      if (dim == 2) {
        const double c = scale / std::sqrt(2.0);
        for (int sx : {-1, 1})
          for (int sy : {-1, 1}) push2(sx * c, sy * c);
      } else {
        const double c = scale / std::sqrt(3.0);
        for (int sx : {-1, 1})
          for (int sy : {-1, 1})
            for (int sz : {-1, 1}) push3(sx * c, sy * c, sz * c);
      }
      break;
    }
    case ObstacleLayout::Icosahedron: {
      if (dim == 2) {
        for (int i = 0; i < 6; ++i)
          push2(scale * std::cos(i * kPi / 3.0), scale * std::sin(i * kPi / 3.0));
      } else {
        const double phi = 0.5 * (1.0 + std::sqrt(5.0));
        const double s = scale / std::sqrt(1.0 + phi * phi);
        for (int sa : {-1, 1}) {
          for (int sb : {-1, 1}) {
            push3(0.0, sa * s, sb * s * phi);
            push3(sa * s, sb * s * phi, 0.0);
            push3(sa * s * phi, 0.0, sb * s);
          }
        }
      }
      break;
    }
  }

  std::vector<Obstacle> out;
  for (const Vector& c : centers) out.push_back(Obstacle{c, radius});
  return out;
}

namespace {

RobotModel suite_model(const ExperimentSpec& spec) {
  switch (spec.suite) {
    case Suite::PlanarChain: return make_planar_chain(spec.dof);
    case Suite::PlanarTree: return make_planar_tree(spec.dof);
    case Suite::RevoluteChain:
    case Suite::RevoluteObstacles: return make_revolute_chain(spec.dof);
  }
  throw Error("unknown suite");
}

ObstacleLayout effective_layout(const ExperimentSpec& spec) {
  if (spec.suite == Suite::RevoluteObstacles && spec.obstacles == ObstacleLayout::None)
    return ObstacleLayout::Octahedron;
  return spec.obstacles;
}

Vector sample_configuration(const RobotModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector theta = Vector::Zero(model.dof());
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const Joint& joint = model.joints[j];
    if (!joint.actuated) continue;
    const int off = model.angle_offset(static_cast<int>(j));
    if (model.kind == ModelKind::Spherical) {
      theta(off) = (2.0 * unit(rng) - 1.0) * kPi;  // azimuth
      const double el_max = joint.limit ? *joint.limit : kPi;
      theta(off + 1) = unit(rng) * el_max;
    } else {
      const double lim = joint.limit ? *joint.limit : kPi;
      theta(off) = (2.0 * unit(rng) - 1.0) * lim;
    }
  }
  return theta;
}

bool collision_free(const RobotModel& model, const Vector& theta,
                    const std::vector<Obstacle>& obstacles) {
  if (obstacles.empty()) return true;
  const int k = model.dim();
  const std::vector<Frame> frames = forward_kinematics(model, theta);
  for (size_t j = 0; j < model.joints.size(); ++j) {
    std::vector<Vector3> pts{frames[j].p};
    if (model.kind == ModelKind::Revolute3d && !model.is_tool(static_cast<int>(j)))
      pts.push_back(frames[j].p + frames[j].r * kZ);
    for (const Obstacle& obs : obstacles)
      for (const Vector3& p : pts)
        if ((p.head(k) - obs.center).norm() < obs.radius) return false;
  }
  return true;
}

}  // namespace

RobotModel build_model(const ExperimentSpec& spec) {
  RobotModel model = suite_model(spec);
  if (spec.limits) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ 0x6d6f64656cULL));
    std::uniform_real_distribution<double> lim_dist(kPi / 4.0, 3.0 * kPi / 4.0);
    for (Joint& joint : model.joints)
      if (joint.actuated) joint.limit = lim_dist(rng);
  }
  return model;
}

SolveRequest generate_problem(const ExperimentSpec& spec, int trial_index, Vector* theta_out) {
  const RobotModel model = build_model(spec);
  const std::vector<Obstacle> obstacles = layout_obstacles(
      effective_layout(spec), model.dim(), spec.obstacle_scale, spec.obstacle_radius);

  std::mt19937_64 rng(splitmix64(spec.seed ^ static_cast<std::uint64_t>(trial_index)));
  Vector theta_goal;
  bool found = false;
  for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
    theta_goal = sample_configuration(model, rng);
    found = collision_free(model, theta_goal, obstacles);
  }
  if (!found) throw Error("generate_problem: no collision-free configuration found");
  if (theta_out != nullptr) *theta_out = theta_goal;

  const std::vector<Frame> frames = forward_kinematics(model, theta_goal);
  const int k = model.dim();
  SolveRequest req;
  req.model = model;
  req.obstacles = obstacles;
  for (int tool : model.tools) {
    const Frame& tf = frames[static_cast<size_t>(tool)];
    Goal goal;
    goal.end_effector = model.joints[static_cast<size_t>(tool)].id;
    goal.kind = spec.goal_kind;
    if (spec.goal_kind == GoalKind::Position) {
      goal.targets.resize(1, k);
      goal.targets.row(0) = tf.p.head(k).transpose();
    } else {
      goal.targets.resize(2, k);
      goal.targets.row(0) = tf.p.head(k).transpose();
      if (model.kind == ModelKind::Planar) {
        const int parent = model.joints[static_cast<size_t>(tool)].parent;
        goal.targets.row(1) = frames[static_cast<size_t>(parent)].p.head(k).transpose();
      } else {
        goal.targets.row(1) = (tf.p + tf.r * kZ).head(k).transpose();
      }
    }
    req.goals.push_back(std::move(goal));
  }
  req.init = spec.init;
  req.seed = splitmix64(spec.seed ^ (static_cast<std::uint64_t>(trial_index) << 20) ^ 0xb5ULL);
  req.rtr = spec.rtr;
  return req;
}

CampaignResult run_campaign(const ExperimentSpec& spec) {
  spec.validate();
  const int n_trials = spec.trials;
  CampaignResult result;
  result.trials.resize(static_cast<size_t>(n_trials));

  const int n_threads =
      spec.threads > 0 ? spec.threads
                       : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1)) {
      const SolveRequest req = generate_problem(spec, i);
      const SolveReport rep = solve_ik(req);
      TrialRecord& rec = result.trials[static_cast<size_t>(i)];
      rec.trial_id = i;
      rec.success = rep.success;
      rec.pos_err_m = rep.position_error;
      rec.rot_err_rad = rep.rotation_error;
      rec.limit_violation_frac = rep.limit_violation;
      rec.obstacle_violation_m = rep.obstacle_violation;
      rec.iterations = rep.iterations;
      rec.runtime_ms = rep.runtime_ms;
      rec.termination = rep.termination;
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CampaignSummary& s = result.summary;
  s.trials = n_trials;
  double iter_sum = 0.0, iter_sq = 0.0, rt_sum = 0.0, rt_sq = 0.0;
  for (const TrialRecord& rec : result.trials) {
    s.successes += rec.success ? 1 : 0;
    iter_sum += rec.iterations;
    iter_sq += static_cast<double>(rec.iterations) * rec.iterations;
    rt_sum += rec.runtime_ms;
    rt_sq += rec.runtime_ms * rec.runtime_ms;
  }
  s.success_rate = static_cast<double>(s.successes) / n_trials;
  s.interval = jeffreys_interval(s.successes, n_trials);
  s.iter_mean = iter_sum / n_trials;
  s.iter_std = std::sqrt(std::max(0.0, iter_sq / n_trials - s.iter_mean * s.iter_mean));
  s.runtime_mean_ms = rt_sum / n_trials;
  s.runtime_std_ms =
      std::sqrt(std::max(0.0, rt_sq / n_trials - s.runtime_mean_ms * s.runtime_mean_ms));

  // Success rate as a function of the position tolerance; the rotation
  // tolerance stays fixed at 0.01 rad.
  for (int expo = -6; expo <= 1; ++expo) {
    WaterfallRow row;
    row.tolerance = std::pow(10.0, expo);
    for (const TrialRecord& rec : result.trials) {
      const bool ok = rec.pos_err_m < row.tolerance && rec.rot_err_rad < 0.01 &&
                      rec.limit_violation_frac <= 0.01 && rec.obstacle_violation_m <= 0.01;
      row.successes += ok ? 1 : 0;
    }
    row.rate = static_cast<double>(row.successes) / n_trials;
    const BinomialInterval iv = jeffreys_interval(row.successes, n_trials);
    row.low = iv.low;
    row.high = iv.high;
    s.waterfall.push_back(row);
  }
  return result;
}

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials) {
  std::ofstream out(path);
  if (!out) throw Error("write_trials_csv: cannot open " + path);
  out << "trial_id,success,pos_err_m,rot_err_rad,limit_violation_frac,"
         "obstacle_violation_m,iterations,runtime_ms,termination\n";
  char buf[256];
  for (const TrialRecord& r : trials) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g,%.9g,%d,%.3f,", r.trial_id,
                  r.success ? 1 : 0, r.pos_err_m, r.rot_err_rad, r.limit_violation_frac,
                  r.obstacle_violation_m, r.iterations, r.runtime_ms);
    out << buf << r.termination << "\n";
  }
  if (!out) throw Error("write_trials_csv: write failed for " + path);
}

void write_waterfall_csv(const std::string& path, const std::vector<WaterfallRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("write_waterfall_csv: cannot open " + path);
  out << "pos_tolerance_m,successes,rate,jeffreys_low,jeffreys_high\n";
  char buf[256];
  for (const WaterfallRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%d,%.9g,%.9g,%.9g\n", r.tolerance, r.successes, r.rate,
                  r.low, r.high);
    out << buf;
  }
  if (!out) throw Error("write_waterfall_csv: write failed for " + path);
}

std::string format_summary(const ExperimentSpec& spec, const CampaignSummary& s) {
  std::ostringstream out;
  out << "suite=" << to_string(spec.suite) << " dof=" << spec.dof
      << " limits=" << (spec.limits ? "on" : "off")
      << " obstacles=" << to_string(effective_layout(spec)) << " trials=" << s.trials
      << " init=" << (spec.init == InitMode::BoundSmoothing ? "bounds" : "flat") << "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "success %.1f%% (%d/%d), 95%% Jeffreys [%.3f, %.3f]\n",
                100.0 * s.success_rate, s.successes, s.trials, s.interval.low, s.interval.high);
  out << buf;
  std::snprintf(buf, sizeof(buf), "iterations mean %.1f (sd %.1f), runtime mean %.2f ms (sd %.2f)\n",
                s.iter_mean, s.iter_std, s.runtime_mean_ms, s.runtime_std_ms);
  out << buf;
  return out.str();
}

}  // namespace dgik
