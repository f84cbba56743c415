#include "dgik/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace dgik {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelKind kind_from_string(const std::string& s) {
  if (s == "revolute3d") return ModelKind::Revolute3d;
  if (s == "planar") return ModelKind::Planar;
  if (s == "spherical") return ModelKind::Spherical;
  throw InvalidModel("unknown robot kind: " + s);
}

Vector3 vec3_from(const json& a, const char* what) {
  if (!a.is_array() || a.size() != 3) throw InvalidModel(std::string(what) + " must be [x,y,z]");
  return Vector3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

}  // namespace

RobotModel robot_from_json(const std::string& text) {
  const json doc = json::parse(text);
  RobotModel model;
  model.kind = kind_from_string(doc.at("kind").get<std::string>());
  const int dim = doc.at("dim").get<int>();
  if (dim != model.dim())
    throw InvalidModel("robot dim " + std::to_string(dim) + " inconsistent with kind");

  std::map<std::string, int> index;
  for (const json& j : doc.at("joints")) {
    Joint joint;
    joint.id = j.at("id").get<std::string>();
    if (index.count(joint.id)) throw InvalidModel("duplicate joint id " + joint.id);
    const json& par = j.at("parent");
    if (par.is_null() || (par.is_string() && par.get<std::string>().empty())) {
      joint.parent = -1;
    } else {
      const auto it = index.find(par.get<std::string>());
      if (it == index.end())
        throw InvalidModel("joint " + joint.id + " references unknown parent");
      joint.parent = it->second;
    }
    joint.translation = vec3_from(j.at("translation"), "translation");
    const Vector3 rpy = vec3_from(j.at("rotation_rpy"), "rotation_rpy");
    joint.rotation = rot_rpy(rpy.x(), rpy.y(), rpy.z());
    if (j.contains("limit") && !j.at("limit").is_null())
      joint.limit = j.at("limit").get<double>();
    if (j.contains("actuated")) joint.actuated = j.at("actuated").get<bool>();
    index[joint.id] = static_cast<int>(model.joints.size());
    model.joints.push_back(std::move(joint));
  }
  for (const json& id : doc.at("end_effectors")) {
    const auto it = index.find(id.get<std::string>());
    if (it == index.end()) throw InvalidModel("unknown end-effector id");
    model.joints[static_cast<size_t>(it->second)].actuated = false;
    model.tools.push_back(it->second);
  }
  model.validate();
  return model;
}

RobotModel load_robot(const std::string& path) { return robot_from_json(slurp(path)); }

std::string robot_to_json(const RobotModel& model) {
  json doc;
  doc["dim"] = model.dim();
  doc["kind"] = to_string(model.kind);
  json joints = json::array();
  for (const Joint& j : model.joints) {
    json entry;
    entry["id"] = j.id;
    entry["parent"] = j.parent < 0 ? json() : json(model.joints[static_cast<size_t>(j.parent)].id);
    entry["translation"] = {j.translation.x(), j.translation.y(), j.translation.z()};
    // Recover roll-pitch-yaw from the rotation matrix (ZYX convention).
    const Matrix3& r = j.rotation;
    const double pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    const double roll = std::atan2(r(2, 1), r(2, 2));
    entry["rotation_rpy"] = {roll, pitch, yaw};
    entry["limit"] = j.limit ? json(*j.limit) : json();
    if (!j.actuated && !model.is_tool(static_cast<int>(&j - model.joints.data())))
      entry["actuated"] = false;
    joints.push_back(std::move(entry));
  }
  doc["joints"] = std::move(joints);
  json tools = json::array();
  for (int t : model.tools) tools.push_back(model.joints[static_cast<size_t>(t)].id);
  doc["end_effectors"] = std::move(tools);
  return doc.dump(2);
}

namespace {

Goal goal_from(const json& doc, int dim) {
  Goal goal;
  goal.end_effector = doc.at("end_effector").get<std::string>();
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "position") {
    goal.kind = GoalKind::Position;
  } else if (kind == "direction") {
    goal.kind = GoalKind::Direction;
  } else {
    throw Error("unknown goal kind: " + kind);
  }
  const json& targets = doc.at("targets");
  const int rows = goal.kind == GoalKind::Position ? 1 : 2;
  if (!targets.is_array() || static_cast<int>(targets.size()) != rows)
    throw Error("goal targets: expected " + std::to_string(rows) + " points");
  goal.targets.resize(rows, dim);
  for (int i = 0; i < rows; ++i) {
    const json& pt = targets[static_cast<size_t>(i)];
    if (!pt.is_array() || static_cast<int>(pt.size()) != dim)
      throw Error("goal target dimension mismatch");
    for (int c = 0; c < dim; ++c) goal.targets(i, c) = pt[static_cast<size_t>(c)].get<double>();
  }
  return goal;
}

}  // namespace

std::vector<Goal> goals_from_json(const std::string& text, int dim) {
  const json doc = json::parse(text);
  std::vector<Goal> goals;
  if (doc.is_array()) {
    for (const json& g : doc) goals.push_back(goal_from(g, dim));
  } else {
    goals.push_back(goal_from(doc, dim));
  }
  return goals;
}

std::vector<Goal> load_goals(const std::string& path, int dim) {
  return goals_from_json(slurp(path), dim);
}

std::vector<Obstacle> obstacles_from_json(const std::string& text, int dim) {
  const json doc = json::parse(text);
  if (!doc.is_array()) throw Error("obstacles file must be an array");
  std::vector<Obstacle> out;
  for (const json& o : doc) {
    Obstacle obs;
    const json& c = o.at("center");
    if (!c.is_array() || static_cast<int>(c.size()) != dim)
      throw Error("obstacle center dimension mismatch");
    obs.center.resize(dim);
    for (int i = 0; i < dim; ++i) obs.center(i) = c[static_cast<size_t>(i)].get<double>();
    obs.radius = o.at("radius").get<double>();
    out.push_back(std::move(obs));
  }
  return out;
}

std::vector<Obstacle> load_obstacles(const std::string& path, int dim) {
  return obstacles_from_json(slurp(path), dim);
}

std::string report_to_json(const SolveReport& report) {
  json doc;
  json theta = json::array();
  for (long i = 0; i < report.theta.size(); ++i) theta.push_back(report.theta(i));
  doc["theta"] = std::move(theta);
  doc["position_error"] = report.position_error;
  doc["rotation_error"] = report.rotation_error;
  doc["limit_violation"] = report.limit_violation;
  doc["obstacle_violation"] = report.obstacle_violation;
  doc["iterations"] = report.iterations;
  doc["runtime_ms"] = report.runtime_ms;
  doc["success"] = report.success;
  doc["termination"] = report.termination;
  doc["final_cost"] = report.final_cost;
  doc["grad_norm"] = report.grad_norm;
  if (report.coplanarity_warning) doc["coplanarity_warning"] = true;
  return doc.dump(2);
}

}  // namespace dgik
