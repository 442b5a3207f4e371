// Command-line harness for the closed-loop experiments.
//
//   quadfg run --config <file> [--seed N] [--out <csv>] [--dump-graph]
//   quadfg rmse --log <csv> [--exclude <s>]
//   quadfg compare --logs <csv...> [--exclude <s>]
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "quadfg/quadfg.hpp"

namespace {

using namespace quadfg;

void print_rmse_row(const std::string& label, const harness::RmseReport& r) {
  std::printf("%-24s %10.4f %10.4f %10.4f   %10.4f %10.4f %10.4f\n", label.c_str(),
              r.position.x(), r.position.y(), r.position.z(), r.rotation.x(),
              r.rotation.y(), r.rotation.z());
}

void print_rmse_header() {
  std::printf("%-24s %10s %10s %10s   %10s %10s %10s\n", "log", "pos_x(m)", "pos_y(m)",
              "pos_z(m)", "rot_x(rad)", "rot_y(rad)", "rot_z(rad)");
}

int run_command(const std::string& config_path, int seed_override, const std::string& out_path,
                bool dump_graph) {
  harness::Scenario scenario =
      harness::scenario_from_config(harness::ConfigFile::load(config_path));
  if (seed_override >= 0) {
    scenario.seed = static_cast<std::uint64_t>(seed_override);
  }

  if (dump_graph) {
    // Dump the first control step's graph at its initial values.
    control::Controller controller(scenario.params, scenario.control, scenario.mode);
    const quad::QuadState x0 = traj::circle_state(scenario.circle, 0.0,
                                                  scenario.attitude_rule,
                                                  scenario.params.gravity);
    std::vector<factors::RefPoint> refs;
    for (int j = 1; j <= scenario.control.horizon; ++j) {
      refs.push_back(traj::circle_ref(scenario.circle, j * scenario.control.dt,
                                      scenario.attitude_rule, scenario.params.gravity));
    }
    controller.step(x0, std::nullopt, refs);  // fill the window
    const fgo::FactorGraph graph = scenario.mode == control::ControlMode::NominalMpc
                                       ? controller.build_nominal_graph(x0, refs)
                                       : controller.build_joint_graph(refs);
    graph.dump(std::cerr, graph.initial_values());
  }

  const harness::RunLog log = harness::run_scenario(scenario);
  if (!out_path.empty()) {
    harness::emit_csv(log, out_path);
  }

  if (log.failed) {
    std::cerr << "run failed: " << log.failure_message << "\n";
    return 2;
  }

  const harness::RmseReport rmse =
      harness::compute_rmse(log, scenario.rmse_exclude_seconds);
  print_rmse_header();
  print_rmse_row(scenario.name, rmse);
  std::printf("steps simulated: %zu, samples in RMSE: %d\n", log.steps.size(), rmse.samples);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factor-graph joint positioning and control experiments"};
  app.require_subcommand(1);

  std::string config_path;
  int seed_override = -1;
  std::string out_path;
  bool dump_graph = false;
  auto* run = app.add_subcommand("run", "run a scenario config and report tracking RMSE");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--seed", seed_override, "override the scenario seed");
  run->add_option("--out", out_path, "write the per-step CSV log here");
  run->add_flag("--dump-graph", dump_graph, "print the first-step factor graph to stderr");

  std::string log_path;
  double exclude = 1.0;
  auto* rmse = app.add_subcommand("rmse", "recompute RMSE from an emitted CSV log");
  rmse->add_option("--log", log_path, "CSV log file")->required();
  rmse->add_option("--exclude", exclude, "transient exclusion window in seconds");

  std::vector<std::string> log_paths;
  double cmp_exclude = 1.0;
  auto* compare = app.add_subcommand("compare", "tabulate RMSE for several CSV logs");
  compare->add_option("--logs", log_paths, "CSV log files")->required()->expected(-1);
  compare->add_option("--exclude", cmp_exclude, "transient exclusion window in seconds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, seed_override, out_path, dump_graph);
    }
    if (rmse->parsed()) {
      print_rmse_header();
      print_rmse_row(log_path,
                     harness::rmse_from_table(harness::parse_csv_file(log_path), exclude));
      return 0;
    }
    if (compare->parsed()) {
      print_rmse_header();
      for (const std::string& path : log_paths) {
        print_rmse_row(path, harness::rmse_from_table(harness::parse_csv_file(path),
                                                      cmp_exclude));
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
