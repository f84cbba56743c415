#include <doctest.h>

#include <cmath>
#include <random>

#include "dgik/bench.hpp"
#include "dgik/robot.hpp"
#include "test_util.hpp"

using namespace dgik;

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double angle_diff(double a, double b) { return std::abs(wrap_pi(a - b)); }

Vector random_theta(const RobotModel& model, std::mt19937_64& rng, double within_limits = 1.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector theta = Vector::Zero(model.dof());
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const Joint& joint = model.joints[j];
    if (!joint.actuated) continue;
    const int off = model.angle_offset(static_cast<int>(j));
    if (model.kind == ModelKind::Spherical) {
      theta(off) = (2.0 * unit(rng) - 1.0) * kPi * 0.95;
      const double el_max = joint.limit ? *joint.limit : kPi - 0.1;
      theta(off + 1) = 0.05 + unit(rng) * (el_max * within_limits - 0.05);
    } else {
      const double lim = joint.limit ? *joint.limit * within_limits : kPi * 0.95;
      theta(off) = (2.0 * unit(rng) - 1.0) * lim;
    }
  }
  return theta;
}

DistanceGraph full_graph(const RobotModel& model, const Vector& theta_goal,
                         const std::vector<Obstacle>& obstacles = {}) {
  DistanceGraph graph = structure_graph(model);
  add_base(graph, model);
  const std::vector<Frame> frames = forward_kinematics(model, theta_goal);
  const int k = model.dim();
  for (int tool : model.tools) {
    Goal goal;
    goal.end_effector = model.joints[static_cast<size_t>(tool)].id;
    goal.kind = GoalKind::Direction;
    goal.targets.resize(2, k);
    goal.targets.row(0) = frames[static_cast<size_t>(tool)].p.head(k).transpose();
    if (model.kind == ModelKind::Planar) {
      const int parent = model.joints[static_cast<size_t>(tool)].parent;
      goal.targets.row(1) = frames[static_cast<size_t>(parent)].p.head(k).transpose();
    } else {
      goal.targets.row(1) = (frames[static_cast<size_t>(tool)].p +
                             frames[static_cast<size_t>(tool)].r * Vector3(0, 0, 1))
                                .head(k)
                                .transpose();
    }
    add_goal(graph, model, goal);
  }
  add_joint_limits(graph, model);
  add_obstacles(graph, model, obstacles);
  return graph;
}

}  // namespace

TEST_CASE("forward_kinematics: straight chains and quarter turns") {
  const RobotModel chain = make_planar_chain(4);
  const auto frames = forward_kinematics(chain, Vector::Zero(4));
  for (int j = 0; j < 5; ++j) {
    CHECK(frames[static_cast<size_t>(j)].p.x() == doctest::Approx(j));
    CHECK(frames[static_cast<size_t>(j)].p.y() == doctest::Approx(0.0));
  }

  RobotModel single;
  single.kind = ModelKind::Revolute3d;
  Joint root;
  root.id = "j0";
  single.joints.push_back(root);
  Joint child;
  child.id = "c";
  child.parent = 0;
  child.translation = Vector3(1, 0, 0);
  child.actuated = false;
  single.joints.push_back(child);
  single.tools.push_back(1);
  Vector theta(1);
  theta << kPi / 2.0;
  const auto f = forward_kinematics(single, theta);
  CHECK((f[1].p - Vector3(0, 1, 0)).norm() < 1e-12);
  CHECK((f[1].r - rot_z(kPi / 2.0)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(forward_kinematics(single, Vector::Zero(3)), LengthMismatch);
}

TEST_CASE("forward_kinematics matches a homogeneous-transform oracle") {
  std::mt19937_64 rng(61);
  RobotModel model;
  model.kind = ModelKind::Revolute3d;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int j = 0; j < 6; ++j) {
    Joint joint;
    joint.id = "j" + std::to_string(j);
    joint.parent = j - 1;
    if (j > 0) {
      joint.translation = Vector3(unit(rng), unit(rng), unit(rng));
      joint.rotation = rot_rpy(unit(rng), unit(rng), unit(rng));
    }
    model.joints.push_back(joint);
  }
  model.validate();

  const Vector theta = random_theta(model, rng);
  const auto frames = forward_kinematics(model, theta);

  // Independent oracle: accumulate 4x4 homogeneous transforms.
  using Mat4 = Eigen::Matrix4d;
  const auto to_hom = [](const Matrix3& r, const Vector3& p) {
    Mat4 t = Mat4::Identity();
    t.topLeftCorner<3, 3>() = r;
    t.topRightCorner<3, 1>() = p;
    return t;
  };
  Mat4 acc = Mat4::Identity();
  for (int j = 0; j < 6; ++j) {
    const Joint& joint = model.joints[static_cast<size_t>(j)];
    if (j > 0) {
      acc = acc * to_hom(rot_z(theta(j - 1)), Vector3::Zero()) *
            to_hom(joint.rotation, joint.translation);
    }
    CHECK((frames[static_cast<size_t>(j)].p - acc.topRightCorner<3, 1>()).norm() < 1e-12);
    CHECK((frames[static_cast<size_t>(j)].r - acc.topLeftCorner<3, 3>()).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("place_points: axis offsets, planar chain layout") {
  std::mt19937_64 rng(62);
  const RobotModel model = make_revolute_chain(5);
  const Vector theta = random_theta(model, rng);
  const Matrix points = place_points(model, theta);
  const DistanceGraph graph = structure_graph(model);
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const int aux = graph.ordering.joint_aux[j];
    if (aux < 0) continue;
    const double dist =
        (points.row(aux) - points.row(graph.ordering.joint_point[j])).norm();
    CHECK(dist == doctest::Approx(1.0).epsilon(1e-12));
  }

  const RobotModel planar = make_planar_chain(2);
  const Matrix pp = place_points(planar, Vector::Zero(2));
  // Base rows first (o, x, y), then the chain at (0,0), (1,0), (2,0).
  CHECK(pp.rows() == 6);
  CHECK((pp.row(3) - Eigen::RowVector2d(0, 0)).norm() < 1e-12);
  CHECK((pp.row(4) - Eigen::RowVector2d(1, 0)).norm() < 1e-12);
  CHECK((pp.row(5) - Eigen::RowVector2d(2, 0)).norm() < 1e-12);
}

TEST_CASE("structure_graph: hand-checked link weights and motion invariance") {
  RobotModel model;
  model.kind = ModelKind::Revolute3d;
  Joint root;
  root.id = "u";
  model.joints.push_back(root);
  Joint v;
  v.id = "v";
  v.parent = 0;
  v.translation = Vector3(1, 0, 0);
  model.joints.push_back(v);
  model.validate();

  const DistanceGraph graph = structure_graph(model);
  const auto& ord = graph.ordering;
  const int pu = ord.joint_point[0], au = ord.joint_aux[0];
  const int pv = ord.joint_point[1], av = ord.joint_aux[1];
  CHECK(graph.equality.at(std::minmax(pu, pv)) == doctest::Approx(1.0));
  CHECK(graph.equality.at(std::minmax(pu, av)) == doctest::Approx(2.0));
  CHECK(graph.equality.at(std::minmax(au, pv)) == doctest::Approx(2.0));
  CHECK(graph.equality.at(std::minmax(au, av)) == doctest::Approx(1.0));
  CHECK(graph.equality.at(std::minmax(pu, au)) == doctest::Approx(1.0));
  CHECK(graph.equality.at(std::minmax(pv, av)) == doctest::Approx(1.0));

  // Structure edges are invariant to the feasible motions.
  std::mt19937_64 rng(63);
  const RobotModel chain = make_revolute_chain(6);
  const DistanceGraph cg = structure_graph(chain);
  const Matrix p1 = realize(chain, random_theta(chain, rng), cg);
  const Matrix p2 = realize(chain, random_theta(chain, rng), cg);
  for (const auto& [key, w] : cg.equality) {
    const double d1 = (p1.row(key.first) - p1.row(key.second)).squaredNorm();
    const double d2 = (p2.row(key.first) - p2.row(key.second)).squaredNorm();
    CHECK(d1 == doctest::Approx(w).epsilon(1e-10));
    CHECK(d2 == doctest::Approx(w).epsilon(1e-10));
  }
}

TEST_CASE("add_base: clique weights, planar reduction, idempotence") {
  const RobotModel model = make_revolute_chain(3);
  DistanceGraph graph = structure_graph(model);
  add_base(graph, model);
  const auto& base = graph.ordering.base;
  REQUIRE(base.size() == 4);
  int unit_count = 0, sqrt2_count = 0;
  for (size_t i = 0; i < base.size(); ++i)
    for (size_t j = i + 1; j < base.size(); ++j) {
      const double w = graph.equality.at(std::minmax(base[i], base[j]));
      if (w == doctest::Approx(1.0)) ++unit_count;
      if (w == doctest::Approx(2.0)) ++sqrt2_count;
    }
  CHECK(unit_count == 3);
  CHECK(sqrt2_count == 3);

  const RobotModel planar = make_planar_chain(3);
  DistanceGraph pg = structure_graph(planar);
  add_base(pg, planar);
  REQUIRE(pg.ordering.base.size() == 3);
  CHECK(pg.equality.at(std::minmax(pg.ordering.base[0], pg.ordering.base[1])) ==
        doctest::Approx(1.0));
  CHECK(pg.equality.at(std::minmax(pg.ordering.base[1], pg.ordering.base[2])) ==
        doctest::Approx(2.0));

  const auto before = graph.equality;
  add_base(graph, model);  // idempotent
  CHECK(graph.equality.size() == before.size());
}

TEST_CASE("add_goal: coordinate geometry of the base pins") {
  const RobotModel model = make_revolute_chain(2);
  {
    DistanceGraph graph = structure_graph(model);
    add_base(graph, model);
    Goal goal;
    goal.end_effector = "ee";
    goal.kind = GoalKind::Position;
    goal.targets.resize(1, 3);
    goal.targets << 1, 0, 0;
    add_goal(graph, model, goal);
    const int w = graph.ordering.joint_point[static_cast<size_t>(model.tools[0])];
    const auto& base = graph.ordering.base;
    CHECK(graph.equality.at(std::minmax(w, base[0])) == doctest::Approx(1.0));
    CHECK(graph.equality.at(std::minmax(w, base[1])) == doctest::Approx(0.0));
    CHECK(graph.equality.at(std::minmax(w, base[2])) == doctest::Approx(2.0));
    CHECK(graph.equality.at(std::minmax(w, base[3])) == doctest::Approx(2.0));
  }
  {
    DistanceGraph graph = structure_graph(model);
    add_base(graph, model);
    Goal goal;
    goal.end_effector = "ee";
    goal.kind = GoalKind::Position;
    goal.targets = Matrix::Zero(1, 3);
    add_goal(graph, model, goal);
    const int w = graph.ordering.joint_point[static_cast<size_t>(model.tools[0])];
    const auto& base = graph.ordering.base;
    CHECK(graph.equality.at(std::minmax(w, base[0])) == doctest::Approx(0.0));
    for (int b = 1; b <= 3; ++b)
      CHECK(graph.equality.at(std::minmax(w, base[static_cast<size_t>(b)])) ==
            doctest::Approx(1.0));
  }

  // Direction goals with coincident targets are rejected.
  DistanceGraph graph = structure_graph(model);
  add_base(graph, model);
  Goal bad;
  bad.end_effector = "ee";
  bad.kind = GoalKind::Direction;
  bad.targets = Matrix::Zero(2, 3);
  CHECK_THROWS_AS(add_goal(graph, model, bad), DegenerateDirectionGoal);
}

TEST_CASE("add_joint_limits: law-of-cosines intervals on unit links") {
  const auto interval_for = [](double lim) {
    RobotModel model = make_planar_chain(3);
    model.joints[1].limit = lim;  // middle joint
    DistanceGraph graph = structure_graph(model);
    add_base(graph, model);
    add_joint_limits(graph, model);
    const auto key = std::minmax(graph.ordering.joint_point[0], graph.ordering.joint_point[2]);
    REQUIRE(graph.intervals.count(key) == 1);
    const auto& iv = graph.intervals.at(key);
    REQUIRE(iv.lower.has_value());
    REQUIRE(iv.upper.has_value());
    return std::make_pair(*iv.lower, *iv.upper);
  };

  const auto [lo_half, hi_half] = interval_for(kPi / 2.0);
  CHECK(lo_half == doctest::Approx(2.0));
  CHECK(hi_half == doctest::Approx(4.0));

  const auto [lo_pi, hi_pi] = interval_for(kPi);
  CHECK(lo_pi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hi_pi == doctest::Approx(4.0));

  const auto [lo_tiny, hi_tiny] = interval_for(1e-6);
  CHECK(hi_tiny == doctest::Approx(4.0));
  CHECK(lo_tiny <= hi_tiny);
  CHECK(lo_tiny == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("add_joint_limits: intervals are tight for planar chains") {
  // Inside the limit the realization satisfies the interval; outside it the
  // lower bound is violated.
  RobotModel model = make_planar_chain(3);
  model.joints[0].limit = kPi / 2.0;
  model.joints[1].limit = kPi / 3.0;
  model.joints[2].limit = kPi / 2.5;
  DistanceGraph graph = structure_graph(model);
  add_base(graph, model);
  add_joint_limits(graph, model);
  const BuiltProblem built = problem_from_graph(graph);
  const CostModel cost(built.problem);

  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector inside = random_theta(model, rng, 0.999);
    const ResidualSummary r = cost.problem_residual(realize(model, inside, graph));
    CHECK(r.max_lower_violation <= 1e-9);
    CHECK(r.max_upper_violation <= 1e-9);
  }
  Vector outside = Vector::Zero(3);
  outside << 0.0, kPi / 3.0 * 1.2, 0.0;
  const ResidualSummary r = cost.problem_residual(realize(model, outside, graph));
  CHECK(r.max_lower_violation > 1e-4);
}

TEST_CASE("add_joint_limits: root limits use the base axis vertex") {
  RobotModel model = make_planar_chain(2);
  model.joints[0].limit = kPi / 2.0;
  DistanceGraph graph = structure_graph(model);
  add_base(graph, model);
  add_joint_limits(graph, model);
  // d(x, j1)^2 = 2 - 2 cos(theta_root): upper bound 2 at the limit.
  const auto key = std::minmax(graph.ordering.base[1], graph.ordering.joint_point[1]);
  REQUIRE(graph.intervals.count(key) == 1);
  CHECK(*graph.intervals.at(key).upper == doctest::Approx(2.0));

  const BuiltProblem built = problem_from_graph(graph);
  const CostModel cost(built.problem);
  Vector inside(2);
  inside << kPi / 2.0 * 0.99, 0.3;
  CHECK(cost.problem_residual(realize(model, inside, graph)).max_upper_violation <= 1e-9);
  Vector outside(2);
  outside << kPi / 2.0 * 1.2, 0.3;
  CHECK(cost.problem_residual(realize(model, outside, graph)).max_upper_violation > 1e-3);
}

TEST_CASE("add_obstacles: coordinate geometry and lower bounds") {
  const RobotModel model = make_revolute_chain(2);
  DistanceGraph graph = structure_graph(model);
  add_base(graph, model);
  const size_t edges_before = graph.equality.size() + graph.intervals.size();
  add_obstacles(graph, model, {});
  CHECK(graph.equality.size() + graph.intervals.size() == edges_before);

  Obstacle obs;
  obs.center = Vector(3);
  obs.center << 0, 0, 2;
  obs.radius = 0.5;
  add_obstacles(graph, model, {obs});
  const int row = graph.ordering.obstacle_row[0];
  const auto& base = graph.ordering.base;
  CHECK(graph.equality.at(std::minmax(row, base[0])) == doctest::Approx(4.0));
  CHECK(graph.equality.at(std::minmax(row, base[1])) == doctest::Approx(5.0));
  CHECK(graph.equality.at(std::minmax(row, base[2])) == doctest::Approx(5.0));
  CHECK(graph.equality.at(std::minmax(row, base[3])) == doctest::Approx(1.0));
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const auto key = std::minmax(graph.ordering.joint_point[j], row);
    REQUIRE(graph.intervals.count(key) == 1);
    CHECK(*graph.intervals.at(key).lower == doctest::Approx(0.25));
  }
}

TEST_CASE("problem_from_graph: mask structure and feasibility of true configurations") {
  std::mt19937_64 rng(65);
  RobotModel model = make_planar_chain(6);
  for (size_t j = 0; j < 6; ++j) model.joints[j].limit = kPi / 2.0;

  const Vector theta_goal = random_theta(model, rng, 0.999);
  const DistanceGraph graph = full_graph(model, theta_goal);
  const BuiltProblem built = problem_from_graph(graph);

  // Twice the undirected edge count lands in the mask.
  CHECK(static_cast<long>(built.problem.omega.sum()) ==
        2 * static_cast<long>(graph.equality.size()));
  CHECK_NOTHROW(built.problem.validate());

  const CostModel cost(built.problem);
  CHECK(cost.cost(realize(model, theta_goal, graph)) <= 1e-18);
}

TEST_CASE("graph size: 3D chain with a position goal has 2n + 5 vertices") {
  for (int n : {3, 6}) {
    const RobotModel model = make_revolute_chain(n);
    DistanceGraph graph = structure_graph(model);
    add_base(graph, model);
    Goal goal;
    goal.end_effector = "ee";
    goal.kind = GoalKind::Position;
    goal.targets.resize(1, 3);
    goal.targets << 1, 1, 1;
    add_goal(graph, model, goal);
    // n structure joints with axis points, 4 base vertices, 1 goal vertex.
    CHECK(graph.ordering.n() == 2 * n + 4 + 1);
  }
}

TEST_CASE("recover_angles: round trips for all model kinds") {
  std::mt19937_64 rng(66);
  const RobotModel planar = make_planar_chain(6);
  const RobotModel revolute = make_revolute_chain(6);
  const RobotModel spherical = make_spherical_chain(8);
  const RobotModel tree = make_planar_tree(6);

  for (const RobotModel* model : {&planar, &revolute, &spherical, &tree}) {
    CHECK(recover_angles(*model, place_points(*model, Vector::Zero(model->dof())))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    for (int trial = 0; trial < 25; ++trial) {
      const Vector theta = random_theta(*model, rng);
      const Matrix points = place_points(*model, theta);
      const Vector rec = recover_angles(*model, points);
      for (int a = 0; a < theta.size(); ++a) CHECK(angle_diff(rec(a), theta(a)) < 1e-8);
    }
  }
}

TEST_CASE("recover_angles: robust to small point noise") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const RobotModel model = make_revolute_chain(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector theta = random_theta(model, rng);
    Matrix points = place_points(model, theta);
    for (long i = 0; i < points.rows(); ++i)
      for (long c = 0; c < points.cols(); ++c) points(i, c) += 1e-6 * unit(rng);
    const Vector rec = recover_angles(model, points);
    for (int a = 0; a < theta.size(); ++a) CHECK(angle_diff(rec(a), theta(a)) < 1e-4);
  }
}

TEST_CASE("recover_angles: degenerate axis-aligned children are reported") {
  RobotModel model;
  model.kind = ModelKind::Revolute3d;
  Joint root;
  root.id = "j0";
  model.joints.push_back(root);
  Joint child;
  child.id = "c";
  child.parent = 0;
  child.translation = Vector3(0, 0, 1);  // along the rotation axis
  child.actuated = false;
  model.joints.push_back(child);
  model.tools.push_back(1);
  const Matrix points = place_points(model, Vector::Zero(1));
  CHECK_THROWS_AS(recover_angles(model, points), DegenerateGeometry);
}

TEST_CASE("realizations are injective in the configuration") {
  std::mt19937_64 rng(68);
  const RobotModel model = make_planar_chain(6);
  const DistanceGraph graph = structure_graph(model);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector t1 = random_theta(model, rng);
    Vector t2 = random_theta(model, rng);
    if ((t1 - t2).norm() < 1e-3) t2(0) += 0.1;
    const Matrix p1 = realize(model, t1, graph);
    const Matrix p2 = realize(model, t2, graph);
    CHECK((p1 - p2).norm() >= 1e-6);
  }
}

TEST_CASE("check_coplanarity: planar, parallel, and skew axes") {
  CHECK(check_coplanarity(make_planar_chain(4)).coplanar);
  CHECK(check_coplanarity(make_revolute_chain(6)).coplanar);

  RobotModel parallel;
  parallel.kind = ModelKind::Revolute3d;
  Joint root;
  root.id = "u";
  parallel.joints.push_back(root);
  Joint v;
  v.id = "v";
  v.parent = 0;
  v.translation = Vector3(1, 0, 0);
  parallel.joints.push_back(v);
  CHECK(check_coplanarity(parallel).coplanar);

  RobotModel skew = parallel;
  skew.joints[1].translation = Vector3(1, 1, 0);
  skew.joints[1].rotation = rot_x(kPi / 2.0);
  const CoplanarityReport rep = check_coplanarity(skew);
  CHECK_FALSE(rep.coplanar);
  REQUIRE(rep.offending.size() == 1);
  CHECK(rep.offending[0].first == 0);
  CHECK(rep.offending[0].second == 1);
}

TEST_CASE("model validation rejects malformed trees") {
  RobotModel model;
  model.kind = ModelKind::Planar;
  CHECK_THROWS_AS(model.validate(), InvalidModel);

  model = make_planar_chain(3);
  model.joints[1].limit = 4.0;  // outside (0, pi]
  CHECK_THROWS_AS(model.validate(), InvalidModel);

  model = make_planar_chain(3);
  model.joints[2].translation = Vector3(0, 0, 1);  // planar links must stay in-plane
  CHECK_THROWS_AS(model.validate(), InvalidModel);

  model = make_spherical_chain(6);
  model.joints[1].translation = Vector3(1, 0, 1);  // spherical links along z only
  CHECK_THROWS_AS(model.validate(), InvalidModel);
}
