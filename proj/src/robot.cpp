#include "dgik/robot.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace dgik {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector3 unit_z() { return Vector3(0.0, 0.0, 1.0); }

Matrix base_positions(int k) {
  Matrix pos = Matrix::Zero(k + 1, k);
  for (int i = 0; i < k; ++i) pos(i + 1, i) = 1.0;
  return pos;
}

double sq(double x) { return x * x; }

}  // namespace

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Revolute3d: return "revolute3d";
    case ModelKind::Planar: return "planar";
    case ModelKind::Spherical: return "spherical";
  }
  return "unknown";
}

Matrix3 rot_z(double a) {
  Matrix3 r;
  r << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0;
  return r;
}

Matrix3 rot_y(double a) {
  Matrix3 r;
  r << std::cos(a), 0.0, std::sin(a), 0.0, 1.0, 0.0, -std::sin(a), 0.0, std::cos(a);
  return r;
}

Matrix3 rot_x(double a) {
  Matrix3 r;
  r << 1.0, 0.0, 0.0, 0.0, std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a);
  return r;
}

Matrix3 rot_rpy(double roll, double pitch, double yaw) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

bool RobotModel::is_tool(int j) const {
  return std::find(tools.begin(), tools.end(), j) != tools.end();
}

int RobotModel::root() const {
  for (size_t j = 0; j < joints.size(); ++j)
    if (joints[j].parent < 0) return static_cast<int>(j);
  throw InvalidModel("RobotModel: no root joint");
}

std::vector<int> RobotModel::children_of(int j) const {
  std::vector<int> out;
  for (size_t v = 0; v < joints.size(); ++v)
    if (joints[v].parent == j) out.push_back(static_cast<int>(v));
  return out;
}

int RobotModel::dof() const {
  int n = 0;
  for (const auto& j : joints)
    if (j.actuated) n += angles_per_joint();
  return n;
}

int RobotModel::angle_offset(int j) const {
  if (!joints[static_cast<size_t>(j)].actuated) return -1;
  int off = 0;
  for (int i = 0; i < j; ++i)
    if (joints[static_cast<size_t>(i)].actuated) off += angles_per_joint();
  return off;
}

int RobotModel::tool_index(const std::string& id) const {
  for (int t : tools)
    if (joints[static_cast<size_t>(t)].id == id) return t;
  return -1;
}

void RobotModel::validate() const {
  if (joints.empty()) throw InvalidModel("RobotModel: no joints");
  int roots = 0;
  for (size_t j = 0; j < joints.size(); ++j) {
    const Joint& joint = joints[j];
    if (joint.parent < 0) {
      ++roots;
    } else if (joint.parent >= static_cast<int>(j)) {
      throw InvalidModel("RobotModel: parents must precede children (" + joint.id + ")");
    }
    if (!joint.translation.allFinite()) throw InvalidModel("RobotModel: non-finite translation");
    const Matrix3 rtr = joint.rotation.transpose() * joint.rotation;
    if ((rtr - Matrix3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
        std::abs(joint.rotation.determinant() - 1.0) > 1e-9)
      throw InvalidModel("RobotModel: rotation not in SO(3) (" + joint.id + ")");
    if (joint.limit) {
      if (!joint.actuated) throw InvalidModel("RobotModel: limit on unactuated joint");
      if (!(*joint.limit > 0.0 && *joint.limit <= kPi))
        throw InvalidModel("RobotModel: limit must lie in (0, pi]");
    }
    if (kind == ModelKind::Planar) {
      if (std::abs(joint.translation.z()) > 1e-12)
        throw InvalidModel("RobotModel: planar translation must have z = 0");
      if (std::abs(joint.rotation(2, 2) - 1.0) > 1e-9 ||
          std::abs(joint.rotation(0, 2)) > 1e-9 || std::abs(joint.rotation(1, 2)) > 1e-9)
        throw InvalidModel("RobotModel: planar rotations must be about z");
    }
    if (kind == ModelKind::Spherical && joint.parent >= 0) {
      if (joint.translation.head<2>().norm() > 1e-12)
        throw InvalidModel("RobotModel: spherical links must translate along z");
    }
  }
  if (roots != 1) throw InvalidModel("RobotModel: exactly one root required");
  for (int t : tools) {
    if (t < 0 || t >= static_cast<int>(joints.size()))
      throw InvalidModel("RobotModel: tool index out of range");
    if (joints[static_cast<size_t>(t)].actuated)
      throw InvalidModel("RobotModel: tool frames must be unactuated");
    if (!children_of(t).empty()) throw InvalidModel("RobotModel: tool frames must be leaves");
  }
}

namespace {

// Rotation contributed by a joint's own angle(s).
Matrix3 joint_rotation(const RobotModel& model, const Joint& joint, const Vector& theta,
                       int offset) {
  if (!joint.actuated) return Matrix3::Identity();
  if (model.kind == ModelKind::Spherical) return rot_z(theta(offset)) * rot_y(theta(offset + 1));
  return rot_z(theta(offset));
}

}  // namespace

std::vector<Frame> forward_kinematics(const RobotModel& model, const Vector& theta) {
  if (theta.size() != model.dof())
    throw LengthMismatch("forward_kinematics: configuration has " + std::to_string(theta.size()) +
                         " angles, model expects " + std::to_string(model.dof()));
  std::vector<Frame> frames(model.joints.size());
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const Joint& joint = model.joints[j];
    if (joint.parent < 0) {
      frames[j].p = joint.translation;
      frames[j].r = joint.rotation;
      continue;
    }
    const Joint& parent = model.joints[static_cast<size_t>(joint.parent)];
    const Frame& pf = frames[static_cast<size_t>(joint.parent)];
    const Matrix3 spin =
        pf.r * joint_rotation(model, parent, theta, model.angle_offset(joint.parent));
    frames[j].p = pf.p + spin * joint.translation;
    frames[j].r = spin * joint.rotation;
  }
  return frames;
}

void DistanceGraph::add_equality(int u, int v, double sq_dist) {
  if (u == v) throw MalformedGraph("DistanceGraph: self edge");
  const auto key = std::minmax(u, v);
  if (intervals.count(key)) throw MalformedGraph("DistanceGraph: edge already interval-constrained");
  const auto [it, inserted] = equality.emplace(key, sq_dist);
  if (!inserted && it->second != sq_dist)
    throw MalformedGraph("DistanceGraph: conflicting equality weights");
}

void DistanceGraph::add_interval_lower(int u, int v, double sq_dist) {
  if (u == v) throw MalformedGraph("DistanceGraph: self edge");
  const auto key = std::minmax(u, v);
  if (equality.count(key)) throw MalformedGraph("DistanceGraph: edge already equality-constrained");
  auto& iv = intervals[key];
  iv.lower = iv.lower ? std::max(*iv.lower, sq_dist) : sq_dist;
}

void DistanceGraph::add_interval_upper(int u, int v, double sq_dist) {
  if (u == v) throw MalformedGraph("DistanceGraph: self edge");
  const auto key = std::minmax(u, v);
  if (equality.count(key)) throw MalformedGraph("DistanceGraph: edge already equality-constrained");
  auto& iv = intervals[key];
  iv.upper = iv.upper ? std::min(*iv.upper, sq_dist) : sq_dist;
}

DistanceGraph structure_graph(const RobotModel& model) {
  model.validate();
  const int k = model.dim();
  DistanceGraph graph;
  graph.dim = k;
  VertexOrdering& ord = graph.ordering;
  ord.dim = k;
  ord.joint_point.assign(model.joints.size(), -1);
  ord.joint_aux.assign(model.joints.size(), -1);

  const char* base_names[] = {"o", "x", "y", "z"};
  for (int b = 0; b <= k; ++b) {
    ord.base.push_back(ord.n());
    ord.names.emplace_back(base_names[b]);
  }

  // Structure joints breadth-first, each 3D joint followed by its axis point.
  const bool aux = model.kind == ModelKind::Revolute3d;
  std::deque<int> queue{model.root()};
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    if (!model.is_tool(j)) {
      ord.joint_point[static_cast<size_t>(j)] = ord.n();
      ord.names.push_back(model.joints[static_cast<size_t>(j)].id);
      if (aux) {
        ord.joint_aux[static_cast<size_t>(j)] = ord.n();
        ord.names.push_back("~" + model.joints[static_cast<size_t>(j)].id);
      }
    }
    for (int c : model.children_of(j)) queue.push_back(c);
  }
  for (int t : model.tools) {
    ord.joint_point[static_cast<size_t>(t)] = ord.n();
    ord.names.push_back(model.joints[static_cast<size_t>(t)].id);
  }

  // Unit edge along each joint axis.
  if (aux) {
    for (size_t j = 0; j < model.joints.size(); ++j)
      if (!model.is_tool(static_cast<int>(j)))
        graph.add_equality(ord.joint_point[j], ord.joint_aux[j], 1.0);
  }

  // Motion-invariant link edges between neighbouring joints.
  for (size_t v = 0; v < model.joints.size(); ++v) {
    const Joint& joint = model.joints[v];
    if (joint.parent < 0) continue;
    const int u = joint.parent;
    const int pu = ord.joint_point[static_cast<size_t>(u)];
    const int pv = ord.joint_point[v];
    const Vector3& t = joint.translation;
    graph.add_equality(pu, pv, t.squaredNorm());
    if (aux) {
      const int au = ord.joint_aux[static_cast<size_t>(u)];
      const int av = ord.joint_aux[v];
      const Vector3 rz = joint.rotation * unit_z();
      graph.add_equality(au, pv, (t - unit_z()).squaredNorm());
      if (av >= 0) {
        graph.add_equality(pu, av, (t + rz).squaredNorm());
        graph.add_equality(au, av, (t - unit_z() + rz).squaredNorm());
      }
    }
  }
  return graph;
}

void add_base(DistanceGraph& graph, const RobotModel& model) {
  const int k = graph.dim;
  const Matrix bp = base_positions(k);
  const auto& base = graph.ordering.base;
  for (int i = 0; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j)
      graph.add_equality(base[static_cast<size_t>(i)], base[static_cast<size_t>(j)],
                         (bp.row(i) - bp.row(j)).squaredNorm());

  // Pin the root joint's points to the base frame; both are independent of
  // every joint angle.
  const int root = model.root();
  const std::vector<Frame> f0 = forward_kinematics(model, Vector::Zero(model.dof()));
  const Vector3 p_root = f0[static_cast<size_t>(root)].p;
  const int root_row = graph.ordering.joint_point[static_cast<size_t>(root)];
  for (int b = 0; b <= k; ++b) {
    Vector3 qb = Vector3::Zero();
    qb.head(k) = bp.row(b).transpose();
    graph.add_equality(root_row, base[static_cast<size_t>(b)], (p_root - qb).squaredNorm());
    const int aux_row = graph.ordering.joint_aux[static_cast<size_t>(root)];
    if (aux_row >= 0) {
      const Vector3 p_aux = p_root + f0[static_cast<size_t>(root)].r * unit_z();
      graph.add_equality(aux_row, base[static_cast<size_t>(b)], (p_aux - qb).squaredNorm());
    }
  }
}

void add_goal(DistanceGraph& graph, const RobotModel& model, const Goal& goal) {
  const int k = graph.dim;
  const int tool = model.tool_index(goal.end_effector);
  if (tool < 0) throw MalformedGraph("add_goal: unknown end-effector " + goal.end_effector);
  const int rows_needed = goal.kind == GoalKind::Position ? 1 : 2;
  if (goal.targets.rows() != rows_needed || goal.targets.cols() != k)
    throw ShapeMismatch("add_goal: target shape");
  if (!goal.targets.allFinite()) throw MalformedGraph("add_goal: non-finite target");
  if (goal.kind == GoalKind::Direction &&
      (goal.targets.row(0) - goal.targets.row(1)).norm() < 1e-9)
    throw DegenerateDirectionGoal("add_goal: direction targets coincide");

  const Matrix bp = base_positions(k);
  const auto& base = graph.ordering.base;
  const int w_row = graph.ordering.joint_point[static_cast<size_t>(tool)];

  const auto pin = [&](int row, const Eigen::RowVectorXd& target) {
    for (int b = 0; b <= k; ++b)
      graph.add_equality(row, base[static_cast<size_t>(b)], (target - bp.row(b)).squaredNorm());
    graph.goal_pins.emplace_back(row, target.transpose());
  };
  pin(w_row, goal.targets.row(0));

  if (goal.kind == GoalKind::Direction) {
    const Joint& joint = model.joints[static_cast<size_t>(tool)];
    const int u = joint.parent;
    if (model.kind == ModelKind::Planar) {
      // A planar pose is the tip position plus the parent joint position; the
      // parent's structure vertex is pinned directly.
      pin(graph.ordering.joint_point[static_cast<size_t>(u)], goal.targets.row(1));
    } else {
      int aux_row = graph.ordering.joint_aux[static_cast<size_t>(tool)];
      if (aux_row < 0) {
        aux_row = graph.ordering.n();
        graph.ordering.joint_aux[static_cast<size_t>(tool)] = aux_row;
        graph.ordering.names.push_back("~" + model.joints[static_cast<size_t>(tool)].id);
      }
      const int u_row = graph.ordering.joint_point[static_cast<size_t>(u)];
      const Vector3 t_aux = joint.translation + joint.rotation * unit_z();
      graph.add_equality(w_row, aux_row, 1.0);
      graph.add_equality(u_row, aux_row, t_aux.squaredNorm());
      const int u_aux = graph.ordering.joint_aux[static_cast<size_t>(u)];
      if (u_aux >= 0)
        graph.add_equality(u_aux, aux_row, (t_aux - unit_z()).squaredNorm());
      pin(aux_row, goal.targets.row(1));
    }
  }
}

namespace {

// Range of a*sin(x) + b*cos(x) over [lo, hi].
std::pair<double, double> sinusoid_range(double a, double b, double lo, double hi) {
  const auto f = [&](double x) { return a * std::sin(x) + b * std::cos(x); };
  double mn = std::min(f(lo), f(hi));
  double mx = std::max(f(lo), f(hi));
  const double x0 = std::atan2(a, b);
  for (const double cand : {x0, x0 + kPi, x0 - kPi, x0 + 2.0 * kPi, x0 - 2.0 * kPi}) {
    if (cand >= lo && cand <= hi) {
      mn = std::min(mn, f(cand));
      mx = std::max(mx, f(cand));
    }
  }
  return {mn, mx};
}

struct SquaredInterval {
  double lower, upper;
};

// Exact range of || g - Rz(theta) b ||^2 over |theta| <= lim. Returns nothing
// when the distance does not depend on the angle.
std::optional<SquaredInterval> z_rotation_interval(const Vector3& g, const Vector3& b,
                                                   double lim) {
  const double alpha = g.x() * b.x() + g.y() * b.y();
  const double beta = g.y() * b.x() - g.x() * b.y();
  const double gamma = g.z() * b.z();
  if (std::hypot(alpha, beta) <= 1e-12 * (1.0 + g.norm() * b.norm())) return std::nullopt;
  const auto [hmin, hmax] = sinusoid_range(beta, alpha, -lim, lim);
  const double c0 = g.squaredNorm() + b.squaredNorm() - 2.0 * gamma;
  return SquaredInterval{c0 - 2.0 * hmax, c0 - 2.0 * hmin};
}

// Exact range of || g - Rz(az) Ry(el) b ||^2 with b along z, az free and
// el in [0, lim] (the spherical elevation cone).
std::optional<SquaredInterval> cone_interval(const Vector3& g, double b_z, double lim) {
  const double gxy = g.head<2>().norm();
  const double a_hi = b_z * gxy;  // coefficient of sin(el) at the best azimuth
  const double b_co = b_z * g.z();
  if (std::abs(a_hi) <= 1e-12 && std::abs(b_co) <= 1e-12) return std::nullopt;
  const double hmax = sinusoid_range(a_hi, b_co, 0.0, lim).second;
  const double hmin = sinusoid_range(-a_hi, b_co, 0.0, lim).first;
  if (hmax - hmin <= 1e-12 * (1.0 + g.norm() * std::abs(b_z))) return std::nullopt;
  const double c0 = g.squaredNorm() + b_z * b_z;
  return SquaredInterval{c0 - 2.0 * hmax, c0 - 2.0 * hmin};
}

}  // namespace

void add_joint_limits(DistanceGraph& graph, const RobotModel& model) {
  const int k = graph.dim;
  const std::vector<Frame> f0 = forward_kinematics(model, Vector::Zero(model.dof()));
  const Matrix bp = base_positions(k);

  for (size_t v = 0; v < model.joints.size(); ++v) {
    const Joint& jv = model.joints[v];
    if (!jv.limit || !jv.actuated) continue;
    const double lim = *jv.limit;

    // Reference point whose distance to v's children encodes the angle: the
    // parent joint, or a base axis vertex for the root.
    Vector3 q_ref;
    int ref_row;
    if (jv.parent >= 0) {
      q_ref = f0[static_cast<size_t>(jv.parent)].p;
      ref_row = graph.ordering.joint_point[static_cast<size_t>(jv.parent)];
    } else if (model.kind == ModelKind::Spherical) {
      q_ref = unit_z();
      ref_row = graph.ordering.base[static_cast<size_t>(k)];  // the z vertex
    } else {
      q_ref = Vector3::Zero();
      q_ref.x() = 1.0;
      ref_row = graph.ordering.base[1];  // the x vertex
    }
    const Vector3 g = f0[v].r.transpose() * (q_ref - f0[v].p);

    for (int w : model.children_of(static_cast<int>(v))) {
      const Vector3& b = model.joints[static_cast<size_t>(w)].translation;
      std::optional<SquaredInterval> iv;
      if (model.kind == ModelKind::Spherical) {
        iv = cone_interval(g, b.z(), lim);
      } else {
        iv = z_rotation_interval(g, b, lim);
      }
      if (!iv) continue;  // distance insensitive to this angle
      const int w_row = graph.ordering.joint_point[static_cast<size_t>(w)];
      graph.add_interval_lower(ref_row, w_row, std::max(iv->lower, 0.0));
      graph.add_interval_upper(ref_row, w_row, iv->upper);
    }
  }
}

void add_obstacles(DistanceGraph& graph, const RobotModel& model,
                   const std::vector<Obstacle>& obstacles) {
  if (obstacles.empty()) return;
  const int k = graph.dim;
  const Matrix bp = base_positions(k);
  const auto& base = graph.ordering.base;

  std::vector<int> structure_rows;
  for (size_t j = 0; j < model.joints.size(); ++j) {
    structure_rows.push_back(graph.ordering.joint_point[j]);
    // Axis points of structure joints are constrained too; direction markers
    // added by goals are not physical and are skipped.
    if (!model.is_tool(static_cast<int>(j)) && graph.ordering.joint_aux[j] >= 0)
      structure_rows.push_back(graph.ordering.joint_aux[j]);
  }

  std::vector<int> center_rows;
  for (const Obstacle& obs : obstacles) {
    if (!(obs.radius > 0.0)) throw MalformedGraph("add_obstacles: radius must be positive");
    if (obs.center.size() != k) throw ShapeMismatch("add_obstacles: center dimension");
    const int row = graph.ordering.n();
    graph.ordering.names.push_back("obs" + std::to_string(graph.obstacles.size()));
    graph.ordering.obstacle_row.push_back(row);
    graph.obstacles.push_back(obs);

    for (int b = 0; b <= k; ++b)
      graph.add_equality(row, base[static_cast<size_t>(b)],
                         (obs.center.transpose() - bp.row(b)).squaredNorm());
    for (size_t i = 0; i < center_rows.size(); ++i)
      graph.add_equality(row, center_rows[i],
                         (obs.center - graph.obstacles[i].center).squaredNorm());
    center_rows.push_back(row);

    for (int s : structure_rows) graph.add_interval_lower(s, row, sq(obs.radius));
  }
}

BuiltProblem problem_from_graph(const DistanceGraph& graph) {
  const int n = graph.ordering.n();
  const int k = graph.dim;
  if (!graph.goal_pins.empty()) {
    const auto& base = graph.ordering.base;
    if (base.size() < 2 || !graph.equality.count(std::minmax(base[0], base[1])))
      throw MalformedGraph("problem_from_graph: goals present but base structure missing");
  }

  BuiltProblem built;
  built.ordering = graph.ordering;
  CompletionProblem& prob = built.problem;
  prob.dim = k;
  prob.omega = Matrix::Zero(n, n);
  prob.d_tilde = Matrix::Zero(n, n);
  prob.psi_lower = Matrix::Zero(n, n);
  prob.d_lower = Matrix::Zero(n, n);
  prob.psi_upper = Matrix::Zero(n, n);
  prob.d_upper = Matrix::Zero(n, n);
  for (const auto& [key, w] : graph.equality) {
    prob.omega(key.first, key.second) = prob.omega(key.second, key.first) = 1.0;
    prob.d_tilde(key.first, key.second) = prob.d_tilde(key.second, key.first) = w;
  }
  for (const auto& [key, iv] : graph.intervals) {
    if (iv.lower) {
      prob.psi_lower(key.first, key.second) = prob.psi_lower(key.second, key.first) = 1.0;
      prob.d_lower(key.first, key.second) = prob.d_lower(key.second, key.first) = *iv.lower;
    }
    if (iv.upper) {
      prob.psi_upper(key.first, key.second) = prob.psi_upper(key.second, key.first) = 1.0;
      prob.d_upper(key.first, key.second) = prob.d_upper(key.second, key.first) = *iv.upper;
    }
  }
  prob.validate();

  const Matrix bp = base_positions(k);
  for (size_t b = 0; b < graph.ordering.base.size(); ++b)
    built.anchors.indices.push_back(graph.ordering.base[b]);
  built.anchors.targets = bp;
  return built;
}

Matrix realize(const RobotModel& model, const Vector& theta, const DistanceGraph& graph) {
  const int k = graph.dim;
  const int n = graph.ordering.n();
  const std::vector<Frame> frames = forward_kinematics(model, theta);
  Matrix points = Matrix::Zero(n, k);

  const Matrix bp = base_positions(k);
  for (size_t b = 0; b < graph.ordering.base.size(); ++b)
    points.row(graph.ordering.base[b]) = bp.row(static_cast<long>(b));

  for (size_t j = 0; j < model.joints.size(); ++j) {
    points.row(graph.ordering.joint_point[j]) = frames[j].p.head(k).transpose();
    const int aux_row = graph.ordering.joint_aux[j];
    if (aux_row >= 0)
      points.row(aux_row) = (frames[j].p + frames[j].r * unit_z()).head(k).transpose();
  }
  for (size_t o = 0; o < graph.obstacles.size(); ++o)
    points.row(graph.ordering.obstacle_row[o]) = graph.obstacles[o].center.transpose();
  return points;
}

Matrix place_points(const RobotModel& model, const Vector& theta) {
  const DistanceGraph graph = structure_graph(model);
  return realize(model, theta, graph);
}

Vector recover_angles(const RobotModel& model, const Matrix& points,
                      const VertexOrdering& ordering) {
  if (points.cols() != model.dim()) throw ShapeMismatch("recover_angles: point dimension");
  if (points.rows() < ordering.n()) throw ShapeMismatch("recover_angles: too few rows");
  const int k = model.dim();

  const auto realized = [&](int row) {
    Vector3 p = Vector3::Zero();
    p.head(k) = points.row(row).transpose();
    return p;
  };

  Vector theta = Vector::Zero(model.dof());
  std::vector<Matrix3> frame_r(model.joints.size(), Matrix3::Identity());

  for (size_t u = 0; u < model.joints.size(); ++u) {
    const Joint& ju = model.joints[u];
    if (ju.parent < 0) frame_r[u] = ju.rotation;
    const std::vector<int> kids = model.children_of(static_cast<int>(u));

    Matrix3 spin = Matrix3::Identity();
    if (ju.actuated && !kids.empty()) {
      const int offset = model.angle_offset(static_cast<int>(u));
      const Vector3 pu = realized(ordering.joint_point[u]);

      if (model.kind == ModelKind::Spherical) {
        const Vector3 q =
            frame_r[u].transpose() * (realized(ordering.joint_point[static_cast<size_t>(kids[0])]) - pu);
        const double rxy = q.head<2>().norm();
        const double el = std::atan2(rxy, q.z());
        const double az = rxy > 1e-12 ? std::atan2(q.y(), q.x()) : 0.0;
        theta(offset) = az;
        theta(offset + 1) = el;
        spin = rot_z(az) * rot_y(el);
      } else {
        // Stationarity of the two-term angle objective reduces to
        // atan2 on the accumulated in-plane coefficients.
        double acc_cos = 0.0, acc_sin = 0.0, max_axy = 0.0;
        const auto add_term = [&](const Vector3& a, const Vector3& b_world) {
          const Vector3 c = frame_r[u].transpose() * b_world;
          acc_cos += c.x() * a.x() + c.y() * a.y();
          acc_sin += c.y() * a.x() - c.x() * a.y();
          max_axy = std::max(max_axy, a.head<2>().norm());
        };
        for (int v : kids) {
          const Joint& jv = model.joints[static_cast<size_t>(v)];
          add_term(jv.translation, realized(ordering.joint_point[static_cast<size_t>(v)]) - pu);
          if (model.kind == ModelKind::Revolute3d &&
              ordering.joint_aux[static_cast<size_t>(v)] >= 0) {
            add_term(jv.translation + jv.rotation * unit_z(),
                     realized(ordering.joint_aux[static_cast<size_t>(v)]) - pu);
          }
        }
        if (max_axy <= 1e-9)
          throw DegenerateGeometry("recover_angles: joint " + ju.id +
                                   " has all child offsets along its axis");
        theta(offset) = std::atan2(acc_sin, acc_cos);
        spin = rot_z(theta(offset));
      }
    } else if (ju.actuated) {
      spin = Matrix3::Identity();  // leaf joint: angle unobservable, report 0
    }

    for (int v : kids)
      frame_r[static_cast<size_t>(v)] =
          frame_r[u] * spin * model.joints[static_cast<size_t>(v)].rotation;
  }
  return theta;
}

Vector recover_angles(const RobotModel& model, const Matrix& points) {
  return recover_angles(model, points, structure_graph(model).ordering);
}

CoplanarityReport check_coplanarity(const RobotModel& model) {
  CoplanarityReport report;
  if (model.kind != ModelKind::Revolute3d) return report;  // single-point models
  const std::vector<Frame> f0 = forward_kinematics(model, Vector::Zero(model.dof()));
  for (size_t v = 0; v < model.joints.size(); ++v) {
    const int u = model.joints[v].parent;
    if (u < 0) continue;
    const Vector3& pu = f0[static_cast<size_t>(u)].p;
    const Vector3 d1 = f0[static_cast<size_t>(u)].r * unit_z();
    const Vector3 d2 = f0[v].p - pu;
    const Vector3 d3 = f0[v].p + f0[v].r * unit_z() - pu;
    const double triple = d1.dot(d2.cross(d3));
    const double scale = d1.norm() * d2.norm() * d3.norm();
    if (std::abs(triple) > 1e-9 * std::max(1.0, scale)) {
      report.coplanar = false;
      report.offending.emplace_back(u, static_cast<int>(v));
    }
  }
  return report;
}

}  // namespace dgik
