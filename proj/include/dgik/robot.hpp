#pragma once

// Kinematic tree models, forward kinematics, construction of the distance
// graph (structure, base frame, goals, joint limits, obstacles), reduction to
// a CompletionProblem, and closed-form joint-angle recovery from realized
// point sets.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgik/completion.hpp"
#include "dgik/edm.hpp"
#include "dgik/types.hpp"

namespace dgik {

enum class ModelKind { Revolute3d, Planar, Spherical };
const char* to_string(ModelKind k);

struct Joint {
  std::string id;
  int parent = -1;                       // index into RobotModel::joints, -1 for root
  Vector3 translation = Vector3::Zero(); // fixed offset in the parent's rotated frame
  Matrix3 rotation = Matrix3::Identity();
  std::optional<double> limit;           // symmetric |theta| <= limit, in (0, pi]
  bool actuated = true;                  // tool frames and fixed connectors are not
};

struct RobotModel {
  ModelKind kind = ModelKind::Planar;
  std::vector<Joint> joints;  // parents precede children
  std::vector<int> tools;     // joint indices acting as end-effector frames (leaves)

  int dim() const { return kind == ModelKind::Planar ? 2 : 3; }
  int angles_per_joint() const { return kind == ModelKind::Spherical ? 2 : 1; }
  bool is_tool(int j) const;
  int root() const;
  std::vector<int> children_of(int j) const;
  int dof() const;
  // Start of joint j's angles within a configuration vector, -1 if unactuated.
  int angle_offset(int j) const;
  int tool_index(const std::string& id) const;  // -1 when unknown

  void validate() const;  // throws InvalidModel
};

struct Frame {
  Vector3 p = Vector3::Zero();
  Matrix3 r = Matrix3::Identity();  // frame orientation, excluding the joint's own angle
};

// Frames for all joints; theta holds one angle per actuated joint (two for
// spherical: azimuth then elevation). Throws LengthMismatch.
std::vector<Frame> forward_kinematics(const RobotModel& model, const Vector& theta);

Matrix3 rot_z(double angle);
Matrix3 rot_y(double angle);
Matrix3 rot_x(double angle);
Matrix3 rot_rpy(double roll, double pitch, double yaw);

enum class GoalKind { Position, Direction };

struct Goal {
  std::string end_effector;
  GoalKind kind = GoalKind::Position;
  Matrix targets;  // 1 x K (position) or 2 x K (direction; rows distinct)
};

struct Obstacle {
  Vector center;  // K-dimensional
  double radius = 0.0;
};

// Row bookkeeping for graph vertices. Base rows come first, then structure
// points in breadth-first order (with each 3D joint's axis point directly
// after it), then end-effector vertices, then obstacle centers.
struct VertexOrdering {
  int dim = 2;
  std::vector<std::string> names;
  std::vector<int> base;          // K+1 rows at the origin and unit basis vectors
  std::vector<int> joint_point;   // per joint
  std::vector<int> joint_aux;     // per joint, -1 when absent
  std::vector<int> obstacle_row;  // per obstacle
  int n() const { return static_cast<int>(names.size()); }
};

struct DistanceGraph {
  int dim = 2;
  VertexOrdering ordering;
  std::map<std::pair<int, int>, double> equality;  // squared distances
  struct Interval {
    std::optional<double> lower, upper;  // squared
  };
  std::map<std::pair<int, int>, Interval> intervals;
  std::vector<Obstacle> obstacles;
  std::vector<std::pair<int, Vector>> goal_pins;  // rows with goal-fixed positions

  void add_equality(int u, int v, double sq);
  void add_interval_lower(int u, int v, double sq);  // tightens (max) on repeat
  void add_interval_upper(int u, int v, double sq);  // tightens (min) on repeat
};

// Vertices for base + structure + tool points, and the motion-invariant
// structure edges between neighbouring joints.
DistanceGraph structure_graph(const RobotModel& model);

// Base clique edges (unit distances to the origin vertex, sqrt(2) between
// axis vertices) plus exact pins from the root joint's points to every base
// vertex. Idempotent.
void add_base(DistanceGraph& graph, const RobotModel& model);

// Equality edges fixing the goal point(s) relative to the base frame, plus
// the structure edges attaching the end-effector vertices to their parent
// joint. Direction goals add a second end-effector vertex.
void add_goal(DistanceGraph& graph, const RobotModel& model, const Goal& goal);

// Interval edges encoding symmetric joint limits between each limited
// joint's parent and child points (base axis vertices for the root).
void add_joint_limits(DistanceGraph& graph, const RobotModel& model);

// Obstacle centers as vertices with exact distances to the base frame and to
// each other, plus squared lower bounds radius^2 from every structure point.
void add_obstacles(DistanceGraph& graph, const RobotModel& model,
                   const std::vector<Obstacle>& obstacles);

struct BuiltProblem {
  CompletionProblem problem;
  VertexOrdering ordering;
  AnchorSet anchors;
};
BuiltProblem problem_from_graph(const DistanceGraph& graph);

// Ground-truth realization of every graph vertex at a configuration.
Matrix realize(const RobotModel& model, const Vector& theta, const DistanceGraph& graph);

// Base + structure + tool points in the canonical ordering (no goal or
// obstacle vertices).
Matrix place_points(const RobotModel& model, const Vector& theta);

// Root-to-leaf closed-form recovery of joint angles from a realization
// aligned to the canonical frame. Angles are reported in (-pi, pi].
Vector recover_angles(const RobotModel& model, const Matrix& points,
                      const VertexOrdering& ordering);
Vector recover_angles(const RobotModel& model, const Matrix& points);

struct CoplanarityReport {
  bool coplanar = true;
  std::vector<std::pair<int, int>> offending;  // parent-child joint index pairs
};
CoplanarityReport check_coplanarity(const RobotModel& model);

}  // namespace dgik
