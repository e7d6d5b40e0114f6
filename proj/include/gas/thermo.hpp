#pragma once

#include <stdexcept>

namespace gas {

/// Ideal polytropic, non-barotropic gas:
///   eps(rho,S) = A0 * exp(S/c_v) * rho^gamma / (gamma - 1)   (per unit volume)
/// from which p = rho*eps_rho - eps, rho*T = eps_S, w = eps_rho follow in
/// closed form, and p(rho,S) inverts analytically for rho.
struct ThermoModel {
  double gamma = 5.0 / 3.0;  // adiabatic exponent, > 1
  double c_v = 1.0;          // specific heat scale, > 0
  double A0 = 1.0;           // reference pressure scale, > 0

  void validate() const {
    if (!(gamma > 1.0)) throw std::invalid_argument("ThermoModel: gamma must exceed 1");
    if (!(c_v > 0.0)) throw std::invalid_argument("ThermoModel: c_v must be positive");
    if (!(A0 > 0.0)) throw std::invalid_argument("ThermoModel: A0 must be positive");
  }
};

/// All pointwise thermodynamic quantities at one (rho, S).
struct ThermoPoint {
  double rho;  // mass density
  double S;    // specific entropy
  double p;    // pressure
  double T;    // temperature
  double w;    // specific enthalpy (eps + p) / rho
  double e;    // internal energy per unit mass, eps / rho
  double tau;  // specific volume 1 / rho
};

struct EnthalpyPoint {
  double w;    // specific enthalpy as a function of (p, S)
  double tau;  // = dw/dp at fixed S
  double T;    // = dw/dS at fixed p
};

/// eps(rho, S), internal energy per unit volume. Throws std::domain_error for
/// rho <= 0.
double internal_energy_density(const ThermoModel& m, double rho, double S);

ThermoPoint eval_thermo(const ThermoModel& m, double rho, double S);

/// Inverts p(rho,S) analytically and returns the enthalpy w~(p,S) together
/// with its two partial derivatives tau and T. Throws for p <= 0.
EnthalpyPoint enthalpy_pS(const ThermoModel& m, double p, double S);

/// Relative first-law residual |T dS - (de + p dtau)| / |T dS| for centered
/// probes of half-width h in S and h*tau in tau. O(h^2) for the analytic EOS.
double gibbs_residual(const ThermoModel& m, double rho, double S, double h);

// Closed-form helpers used by the Hamiltonian density, the conservation-law
// chain rules and the forms engine.
double specific_internal_energy_tau(const ThermoModel& m, double tau, double S);
double pressure_from_tau(const ThermoModel& m, double tau, double S);
double density_from_pS(const ThermoModel& m, double p, double S);
double dp_drho(const ThermoModel& m, double rho, double S);  // at fixed S
double dw_drho(const ThermoModel& m, double rho, double S);  // at fixed S
// Second partials of w~(p,S); D = wt_pp + n*tau/((n-1)p) must stay positive.
double wt_pp(const ThermoModel& m, double p, double S);
double wt_pS(const ThermoModel& m, double p, double S);
double wt_SS(const ThermoModel& m, double p, double S);

}  // namespace gas
