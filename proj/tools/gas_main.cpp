#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "gas/par.hpp"
#include "gas/scenario.hpp"

int main(int argc, char** argv) {
  gas::apply_thread_cap_from_env();

  CLI::App app{"Lagrangian gas dynamics simulator and structure verifier"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, snapshot_path;
  bool strict = false;

  auto* run = app.add_subcommand("run", "integrate a scenario and write diagnostics");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (overrides the scenario)");
  run->add_flag("--strict", strict, "exit nonzero on tolerance breach");

  auto* check =
      app.add_subcommand("check", "recompute all diagnostics from a snapshot");
  check->add_option("snapshot", snapshot_path, "snapshot JSON file")->required();
  check->add_flag("--strict", strict, "exit nonzero on tolerance breach");

  auto* msr = app.add_subcommand(
      "ms-residual", "multi-symplectic residual row blocks from a snapshot");
  msr->add_option("snapshot", snapshot_path, "snapshot JSON file")->required();

  int fv_n = 2, fv_trials = 100;
  double fv_tol = 1e-10;
  unsigned fv_seed = 20160707;
  auto* fv = app.add_subcommand("forms-verify",
                                "check the closed ideal of differential forms");
  fv->add_option("--n", fv_n, "spatial dimension, 2 or 3")
      ->check(CLI::IsMember({2, 3}));
  fv->add_option("--trials", fv_trials, "random fiber points per identity");
  fv->add_option("--tol", fv_tol, "failure threshold");
  fv->add_option("--seed", fv_seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const gas::Scenario sc = gas::load_scenario(scenario_path);
      const std::filesystem::path dir = out_dir.empty() ? sc.output_dir : out_dir;
      const gas::RunOutcome rc = gas::run_command(sc, dir, strict);
      std::printf("wrote %s and %s\n", rc.csv_path.c_str(), rc.snapshot_path.c_str());
      return rc.exit_code;
    }
    if (check->parsed()) return gas::check_command(snapshot_path, strict);
    if (msr->parsed()) return gas::ms_residual_command(snapshot_path);
    if (fv->parsed())
      return gas::forms_verify_command(fv_n, fv_trials, fv_tol, fv_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
