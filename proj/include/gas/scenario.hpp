#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gas/conservation.hpp"
#include "gas/expr_lang.hpp"

namespace gas {

/// Gravitational potential selector as it appears in scenario files.
struct PotentialSpec {
  enum class Kind { zero, uniform, expression } kind = Kind::zero;
  Point3 g{0, 0, 0};
  std::string expr;

  Potential build(int n) const;
};

/// Parsed and validated scenario configuration. Initial conditions are
/// expressions of the labels m1..mn; the run is Clebsch-initialized when the
/// clebsch block is present, otherwise the velocity is given directly.
struct Scenario {
  LabelGrid grid;
  ThermoModel thermo;
  PotentialSpec potential;

  std::vector<std::string> displacement;  // n expressions
  std::string entropy = "0";
  // Clebsch block
  bool clebsch = false;
  std::string phi0 = "0", r0 = "0";
  std::vector<std::string> lambda0, mu0;
  // Direct block
  std::vector<std::string> velocity;

  Integrator integrator = Integrator::rk4;
  double dt = 0.0;
  double t_end = 0.0;

  std::vector<cons::Law> laws;
  int cadence = 10;
  std::map<std::string, double> tolerances;
  std::optional<std::string> ertel_psi;

  std::string output_dir = "out";
  unsigned seed = 0;

  SimState make_state() const;
  SimConfig make_config() const;
  cons::LawContext make_law_context() const;
};

/// Loads and validates a scenario file (strict: unknown keys rejected, every
/// error names the offending key path).
Scenario load_scenario(const std::filesystem::path& path);
Scenario scenario_from_json_text(const std::string& text);

/// Snapshot: one full state plus everything `check` needs to reproduce the
/// diagnostics row bitwise (potential, law set, tolerances, baseline
/// invariants). Fields are stored as row-major nested arrays in the fixed
/// order (x, u, S, r, phi, lamt, mu), 17 significant digits.
struct Snapshot {
  SimState state;
  ThermoModel thermo;
  PotentialSpec potential;
  std::vector<cons::Law> laws;
  std::map<std::string, double> tolerances;
  std::optional<std::string> ertel_psi;
  cons::Baseline baseline;

  cons::LawContext make_law_context() const;
};

void write_snapshot(const Snapshot& snap, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

/// diagnostics.csv row: t plus one max-norm column per registered law, in
/// registry order, printed with printf %.17g.
std::string csv_header(const std::vector<cons::Law>& laws);
std::string csv_row(double t, const std::vector<cons::DiagnosticRecord>& records,
                    const std::vector<cons::Law>& laws);

struct RunOutcome {
  int exit_code = 0;
  std::filesystem::path csv_path;
  std::filesystem::path snapshot_path;
};

/// `gas run`: executes the scenario, writes diagnostics.csv and
/// snapshot.json under out_dir; with strict, exit code 1 when any final
/// residual exceeds its declared tolerance.
RunOutcome run_command(const Scenario& sc, const std::filesystem::path& out_dir,
                       bool strict);

/// `gas check`: recomputes all registered diagnostics from a snapshot and
/// writes check.csv next to it (bitwise equal to the run's final row).
int check_command(const std::filesystem::path& snapshot_path, bool strict);

/// `gas ms-residual`: assembles jets from a snapshot and prints row-block
/// residual norms.
int ms_residual_command(const std::filesystem::path& snapshot_path);

/// `gas forms-verify`: runs the closed-ideal checks.
int forms_verify_command(int n, int trials, double tol, unsigned seed);

}  // namespace gas
