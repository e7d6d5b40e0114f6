#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gas/dynamics.hpp"
#include "gas/multisymplectic.hpp"

namespace gas::cons {

struct DiagnosticRecord {
  double t = 0.0;
  std::string name;
  double norm_max = 0.0;
  double norm_l2 = 0.0;
  std::vector<std::pair<std::string, double>> extra;

  double extra_value(const std::string& key) const;
};

/// Per-particle invariant traced from t=0.
struct AdvectedInvariantTrace {
  ScalarField initial;
  ScalarField current;
  ScalarField drift() const {
    ScalarField d = current;
    d -= initial;
    return d;
  }
};

enum class Law {
  energy,
  eulerian_energy,
  mass_translation,
  bernoulli,
  sympl_tm,
  sympl_mm_drift,
  sympl_mm_flux,
  ertel_pv,
  vorticity_identity,
  vorticity_drift,
  helicity,
  clebsch_reconstruction,
  clebsch_oracle,
};

/// Fixed registry order; also the diagnostics.csv column order.
const std::vector<Law>& all_laws();
std::string law_name(Law);
Law law_from_name(const std::string&);
/// helicity needs n=3; the Clebsch-only laws need a Clebsch-initialized run.
bool law_applicable(Law, int n, bool clebsch_initialized);

struct LawContext {
  ThermoModel thermo;
  Potential potential = Potential::zero();
  /// Ertel advected scalar Psi as a pure label function; empty means Psi = S.
  std::optional<ScalarFn> ertel_psi;
};

/// Shared per-state geometry/thermo pieces used by every law.
struct Workspace {
  const SimState* s = nullptr;
  ThermoModel thermo;
  MapThermo mt;
  VectorField mrhs;
  TensorField ug;    // du^i/dm^j
  ScalarField Jdot;  // A : ug = dJ/dt
  ScalarField rho_t;
  ScalarField Phi;
  VectorField Phix;
  ScalarField kin;  // |u|^2 / 2
  std::vector<ScalarField> dS, dr;  // label derivatives per axis
  TensorField pi;                   // p A

  static Workspace build(const SimState& s, const LawContext& ctx);
  const LabelGrid& grid() const { return s->grid(); }
};

/// Invariant fields captured at the start of a run, needed by the drift laws.
struct Baseline {
  std::vector<ScalarField> mm0;  // I0_{ab} per pair a<b (n=2: one entry)
  ScalarField q0;                // Ertel potential vorticity
  std::vector<ScalarField> w0;   // Omega^gamma / rho per gamma (n=2: one)
};

Baseline capture_baseline(const SimState& s, const LawContext& ctx);

// Residual fields, exposed so the forms module and the tests can compare
// against them with identical stencils.
ScalarField energy_residual_field(const Workspace& ws);
ScalarField mass_translation_field(const Workspace& ws, int axis);
/// d/dt(w + Phi + u^2/2) by the exact chain rule; the resolved rate of the
/// tm-symplecticity density.
ScalarField sympl_tm_energy_rate(const Workspace& ws);
ScalarField sympl_tm_density_bracket(const Workspace& ws, int s_axis);
VectorField sympl_tm_flux_bracket(const Workspace& ws, int s_axis);
ScalarField sympl_tm_residual_field(const Workspace& ws, int s_axis);
ScalarField sympl_mm_density(const Workspace& ws, int a, int b);
ScalarField ertel_q_field(const Workspace& ws, const LawContext& ctx);
ScalarField ertel_qc_field(const Workspace& ws, const LawContext& ctx);
std::vector<ScalarField> vorticity_per_mass(const Workspace& ws);  // Omega^g/rho

// The spec'd operations. Each returns one record; drift laws take the
// baseline captured at t=0.
DiagnosticRecord energy_law_residual(const SimState&, const LawContext&);
DiagnosticRecord eulerian_energy_residual(const SimState&, const LawContext&);
DiagnosticRecord mass_translation_residual(const SimState&, const LawContext&, int axis);
DiagnosticRecord bernoulli_residual(const SimState&, const LawContext&);
DiagnosticRecord symplecticity_tm_residual(const SimState&, const LawContext&,
                                           int s_axis);
AdvectedInvariantTrace symplecticity_mm_invariant(const SimState&, const LawContext&,
                                                  int a, int b,
                                                  const ScalarField* baseline);
AdvectedInvariantTrace ertel_pv(const SimState&, const LawContext&,
                                const ScalarField* baseline_q0);
DiagnosticRecord vorticity_dragging_residual(const SimState&, const LawContext&,
                                             const std::vector<ScalarField>* w0);
DiagnosticRecord helicity_residual(const SimState&, const LawContext&);
DiagnosticRecord clebsch_oracle_residual(const SimState&, const LawContext&);

/// Runs every law in `laws` (registry order) against one state.
std::vector<DiagnosticRecord> run_diagnostics(const SimState&, const LawContext&,
                                              const std::vector<Law>& laws,
                                              const Baseline* baseline);

/// Arbitrary smooth section of the full z-bundle for the off-shell identity:
/// values plus first (and optionally second) analytic time derivatives per
/// slot. x-slots hold the periodic displacement; value = m + displacement.
struct OffshellSection {
  LabelGrid grid;
  ms::ZLayout layout;
  std::vector<ScalarField> z, z_t, z_tt;  // z_tt may be empty
  bool has_second = false;
};

OffshellSection random_offshell_section(const LabelGrid& g, const ms::ZLayout& lo,
                                        unsigned seed);
/// Section assembled from a solved state (no second time derivatives; only
/// spatial index pairs are then admissible).
OffshellSection section_from_state(const SimState& s, const ThermoModel& thermo,
                                   const Potential& pot, const ms::ZLayout& lo);

/// Off-shell compatibility D_g G_b - D_b G_g = D_a(K^a_{ij} z^i_{,g} z^j_{,b})
/// for base indices 0 <= beta < gamma <= n (0 is time). Holds for arbitrary
/// smooth fields; the discrete residual is O(dm^fd_order).
DiagnosticRecord offshell_compatibility(const OffshellSection&, int beta, int gamma,
                                        const ThermoModel&, const Potential&);

}  // namespace gas::cons
