// tankctl: simulate, sweep and verify the coupled-tank backstepping loop.
//
//   tankctl simulate <scenario> [--out run.csv] [--summary]
//   tankctl equilibrium <fraction>
//   tankctl sweep <scenario> --kphi 0.02,0.05,0.2 --ky 0.02,0.05,0.2
//   tankctl verify
//
// Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tanks/error_coordinates.hpp"
#include "tanks/errors.hpp"
#include "tanks/scenario_io.hpp"
#include "tanks/self_check.hpp"
#include "tanks/simulation_engine.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int cmd_simulate(const std::string& path, const std::string& csv_path,
                 bool summary) {
  const tanks::Scenario scenario = tanks::parse_scenario(path);
  const tanks::RunResult result = tanks::run(scenario);
  if (!csv_path.empty()) {
    tanks::emit_csv(result.rows, std::filesystem::path(csv_path));
  }
  if (summary || csv_path.empty()) {
    tanks::emit_summary(result.summary, result.certification, std::cout);
  }
  return 0;
}

int cmd_equilibrium(double fraction) {
  const tanks::PlantParams plant;
  const tanks::ReferencePoint ref =
      tanks::make_reference(fraction * plant.h0, plant);
  std::printf("h1ref: %.6g m\n", ref.h1ref);
  std::printf("h3ref: %.6g m\n", ref.h3ref);
  std::printf("Qss: %.6g m^3/s\n", ref.u_s * plant.Q0);
  std::printf("u_s: %.6g\n", ref.u_s);
  std::printf("z3r: %.6g m^0.5\n", ref.z3r);
  return 0;
}

int cmd_sweep(const std::string& path, const std::vector<double>& k_phi,
              const std::vector<double>& k_y) {
  const tanks::Scenario scenario = tanks::parse_scenario(path);
  const auto table = tanks::gain_sweep(scenario, k_phi, k_y);
  tanks::emit_sweep_table(table, std::cout);
  return 0;
}

int cmd_verify() {
  const bool ok =
      tanks::report_self_checks(tanks::run_self_checks(), std::cout);
  std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled-tank backstepping level control toolkit", "tankctl"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string csv_path;
  bool summary = false;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
  simulate->add_option("scenario", scenario_path, "Scenario file")->required();
  simulate->add_option("--out", csv_path, "Write the trajectory CSV here");
  simulate->add_flag("--summary", summary, "Print the run summary");

  double fraction = 0.0;
  auto* equilibrium = app.add_subcommand(
      "equilibrium", "Print the equilibrium for a level setpoint");
  equilibrium->add_option("fraction", fraction, "h1ref as a fraction of h0")
      ->required();

  std::string sweep_path;
  std::vector<double> k_phi;
  std::vector<double> k_y;
  auto* sweep = app.add_subcommand("sweep", "Gain sweep over a scenario");
  sweep->add_option("scenario", sweep_path, "Scenario file")->required();
  sweep->add_option("--kphi", k_phi, "Comma separated k_phi values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--ky", k_y, "Comma separated k_y values")
      ->required()
      ->delimiter(',');

  auto* verify =
      app.add_subcommand("verify", "Run the built-in numerical property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(scenario_path, csv_path, summary);
    if (equilibrium->parsed()) return cmd_equilibrium(fraction);
    if (sweep->parsed()) return cmd_sweep(sweep_path, k_phi, k_y);
    if (verify->parsed()) return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "tankctl: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
