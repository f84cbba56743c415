#pragma once

// JSON file formats for robot descriptions, goals, obstacles and solve
// reports.

#include <string>
#include <vector>

#include "dgik/pipeline.hpp"
#include "dgik/robot.hpp"

namespace dgik {

// {"dim": 2|3, "kind": "revolute3d"|"planar"|"spherical",
//  "joints": [{"id", "parent", "translation": [x,y,z],
//              "rotation_rpy": [r,p,y], "limit": radians|null}],
//  "end_effectors": [ids]}
// "parent" is the parent joint's id, null/"" for the root. An optional
// "actuated": false marks fixed connector links.
RobotModel robot_from_json(const std::string& text);
RobotModel load_robot(const std::string& path);
std::string robot_to_json(const RobotModel& model);

// {"end_effector": id, "kind": "position"|"direction", "targets": [[...],...]}
// or an array of such objects.
std::vector<Goal> goals_from_json(const std::string& text, int dim);
std::vector<Goal> load_goals(const std::string& path, int dim);

// [{"center": [...], "radius": r}, ...]
std::vector<Obstacle> obstacles_from_json(const std::string& text, int dim);
std::vector<Obstacle> load_obstacles(const std::string& path, int dim);

std::string report_to_json(const SolveReport& report);

}  // namespace dgik
