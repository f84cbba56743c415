// Command-line driver: single IK solves from JSON descriptions, randomized
// benchmark campaigns, and model checks.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "dgik/bench.hpp"
#include "dgik/io.hpp"
#include "dgik/pipeline.hpp"

namespace {

int run_solve(const std::string& robot_path, const std::string& goal_path,
              const std::string& obstacles_path, const std::string& init,
              std::uint64_t seed, const std::string& out_path) {
  dgik::SolveRequest req;
  req.model = dgik::load_robot(robot_path);
  req.goals = dgik::load_goals(goal_path, req.model.dim());
  if (!obstacles_path.empty())
    req.obstacles = dgik::load_obstacles(obstacles_path, req.model.dim());
  req.init = init == "bounds" ? dgik::InitMode::BoundSmoothing : dgik::InitMode::Flat;
  req.seed = seed;

  const dgik::SolveReport report = dgik::solve_ik(req);
  const std::string text = dgik::report_to_json(report);
  std::cout << text << std::endl;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw dgik::Error("cannot open " + out_path);
    out << text << "\n";
  }
  return report.success ? 0 : 1;
}

int run_check(const std::string& robot_path) {
  const dgik::RobotModel model = dgik::load_robot(robot_path);
  model.validate();
  const dgik::CoplanarityReport rep = dgik::check_coplanarity(model);
  std::cout << "model: " << dgik::to_string(model.kind) << ", " << model.joints.size()
            << " links, " << model.dof() << " dof, " << model.tools.size() << " end-effector(s)\n";
  if (rep.coplanar) {
    std::cout << "coplanarity: ok (all consecutive joint axes coplanar)\n";
    return 0;
  }
  std::cout << "coplanarity: FAILED for joint pairs:";
  for (const auto& [u, v] : rep.offending)
    std::cout << " (" << model.joints[static_cast<size_t>(u)].id << ","
              << model.joints[static_cast<size_t>(v)].id << ")";
  std::cout << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgik: distance-geometric inverse kinematics solver"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one IK instance from JSON files");
  std::string robot_path, goal_path, obstacles_path, out_path;
  std::string init = "flat";
  std::uint64_t seed = 0;
  solve->add_option("--robot", robot_path, "robot description JSON")->required();
  solve->add_option("--goal", goal_path, "goal JSON (object or array)")->required();
  solve->add_option("--obstacles", obstacles_path, "obstacles JSON");
  solve->add_option("--init", init, "initialization: flat|bounds")
      ->check(CLI::IsMember({"flat", "bounds"}));
  solve->add_option("--seed", seed, "RNG seed (bound-smoothing sampling)");
  solve->add_option("--out", out_path, "write the report JSON here as well");

  // bench
  auto* bench = app.add_subcommand("bench", "run a randomized benchmark campaign");
  dgik::ExperimentSpec spec;
  std::string suite = "planar-chain", layout = "none", bench_init = "flat",
              goal_kind = "direction", csv_path, waterfall_path;
  const std::map<std::string, dgik::Suite> suite_map{
      {"planar-chain", dgik::Suite::PlanarChain},
      {"planar-tree", dgik::Suite::PlanarTree},
      {"revolute-chain", dgik::Suite::RevoluteChain},
      {"revolute-obstacles", dgik::Suite::RevoluteObstacles}};
  const std::map<std::string, dgik::ObstacleLayout> layout_map{
      {"none", dgik::ObstacleLayout::None},
      {"octahedron", dgik::ObstacleLayout::Octahedron},
      {"cube", dgik::ObstacleLayout::Cube},
      {"icosahedron", dgik::ObstacleLayout::Icosahedron}};
  bench->add_option("--suite", suite, "planar-chain|planar-tree|revolute-chain|revolute-obstacles")
      ->check(CLI::IsMember({"planar-chain", "planar-tree", "revolute-chain",
                             "revolute-obstacles"}));
  bench->add_option("--dof", spec.dof, "degrees of freedom (trees: 6, 14, 30, ...)");
  bench->add_flag("--limits", spec.limits, "sample symmetric joint limits");
  bench->add_option("--obstacles", layout,
                    "sphere layout: none|octahedron|cube|icosahedron (2D suites use the "
                    "layout's equatorial polygon)")
      ->check(CLI::IsMember({"none", "octahedron", "cube", "icosahedron"}));
  bench->add_option("--obstacle-scale", spec.obstacle_scale, "layout circumradius [m]");
  bench->add_option("--obstacle-radius", spec.obstacle_radius, "sphere radius [m]");
  bench->add_option("--trials", spec.trials, "number of random problems");
  bench->add_option("--seed", spec.seed, "campaign seed");
  bench->add_option("--init", bench_init, "initialization: flat|bounds")
      ->check(CLI::IsMember({"flat", "bounds"}));
  bench->add_option("--goal-kind", goal_kind, "position|direction")
      ->check(CLI::IsMember({"position", "direction"}));
  bench->add_option("--threads", spec.threads, "worker threads (0 = hardware)");
  bench->add_option("--csv", csv_path, "per-trial CSV output path");
  bench->add_option("--waterfall", waterfall_path, "success-vs-tolerance CSV output path");
  double grad_tol = -1.0, delta0 = -1.0, delta_bar = -1.0, rho_prime = -1.0;
  int max_iters = -1;
  bench->add_option("--max-iters", max_iters, "trust-region iteration cap");
  bench->add_option("--grad-tol", grad_tol, "gradient-norm stopping tolerance");
  bench->add_option("--delta0", delta0, "initial trust radius");
  bench->add_option("--delta-bar", delta_bar, "maximum trust radius");
  bench->add_option("--rho-prime", rho_prime, "step acceptance threshold");

  // check
  auto* check = app.add_subcommand("check", "validate a robot model and its coplanarity");
  std::string check_robot;
  check->add_option("--robot", check_robot, "robot description JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return run_solve(robot_path, goal_path, obstacles_path, init, seed,
                                          out_path);
    if (check->parsed()) return run_check(check_robot);

    spec.suite = suite_map.at(suite);
    spec.obstacles = layout_map.at(layout);
    spec.init = bench_init == "bounds" ? dgik::InitMode::BoundSmoothing : dgik::InitMode::Flat;
    spec.goal_kind = goal_kind == "position" ? dgik::GoalKind::Position : dgik::GoalKind::Direction;
    if (max_iters > 0 || grad_tol > 0 || delta0 > 0 || delta_bar > 0 || rho_prime >= 0) {
      // Start from size-based defaults for the suite's problem and override.
      const dgik::SolveRequest probe = dgik::generate_problem(spec, 0);
      dgik::DistanceGraph graph = dgik::structure_graph(probe.model);
      dgik::RtrParams params =
          dgik::RtrParams::defaults(graph.ordering.n(), probe.model.dim());
      if (max_iters > 0) params.max_iters = max_iters;
      if (grad_tol > 0) params.grad_tol = grad_tol;
      if (delta_bar > 0) params.delta_bar = delta_bar;
      if (delta0 > 0) params.delta0 = delta0;
      if (rho_prime >= 0) params.rho_prime = rho_prime;
      spec.rtr = params;
    }
    const dgik::CampaignResult result = dgik::run_campaign(spec);
    std::cout << dgik::format_summary(spec, result.summary);
    if (!csv_path.empty()) dgik::write_trials_csv(csv_path, result.trials);
    if (!waterfall_path.empty())
      dgik::write_waterfall_csv(waterfall_path, result.summary.waterfall);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
