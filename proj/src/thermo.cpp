#include "gas/thermo.hpp"

#include <cmath>
#include <cstdlib>

#include "gas/par.hpp"

namespace gas {

void apply_thread_cap_from_env() {
  if (const char* s = std::getenv("GAS_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) cap_worker_threads(n);
  }
}

static void require_rho(double rho) {
  if (!(rho > 0.0)) throw std::domain_error("thermo: density must be positive");
}
static void require_p(double p) {
  if (!(p > 0.0)) throw std::domain_error("thermo: pressure must be positive");
}

double internal_energy_density(const ThermoModel& m, double rho, double S) {
  require_rho(rho);
  return m.A0 * std::exp(S / m.c_v) * std::pow(rho, m.gamma) / (m.gamma - 1.0);
}

ThermoPoint eval_thermo(const ThermoModel& m, double rho, double S) {
  require_rho(rho);
  const double eps = internal_energy_density(m, rho, S);
  ThermoPoint out;
  out.rho = rho;
  out.S = S;
  out.tau = 1.0 / rho;
  out.p = (m.gamma - 1.0) * eps;           // = rho*eps_rho - eps
  out.T = eps / (rho * m.c_v);             // rho*T = eps_S = eps/c_v
  out.e = eps / rho;
  out.w = m.gamma * eps / rho;             // = eps_rho = (eps + p)/rho
  return out;
}

double density_from_pS(const ThermoModel& m, double p, double S) {
  require_p(p);
  return std::pow(p * std::exp(-S / m.c_v) / m.A0, 1.0 / m.gamma);
}

EnthalpyPoint enthalpy_pS(const ThermoModel& m, double p, double S) {
  const double rho = density_from_pS(m, p, S);
  const ThermoPoint tp = eval_thermo(m, rho, S);
  return EnthalpyPoint{tp.w, tp.tau, tp.T};
}

double specific_internal_energy_tau(const ThermoModel& m, double tau, double S) {
  if (!(tau > 0.0)) throw std::domain_error("thermo: specific volume must be positive");
  // e = eps/rho = A0 exp(S/c_v) tau^(1-gamma) / (gamma-1)
  return m.A0 * std::exp(S / m.c_v) * std::pow(tau, 1.0 - m.gamma) / (m.gamma - 1.0);
}

double pressure_from_tau(const ThermoModel& m, double tau, double S) {
  if (!(tau > 0.0)) throw std::domain_error("thermo: specific volume must be positive");
  return m.A0 * std::exp(S / m.c_v) * std::pow(tau, -m.gamma);
}

double gibbs_residual(const ThermoModel& m, double rho, double S, double h) {
  require_rho(rho);
  if (!(h > 0.0) || !(h < 1.0))
    throw std::domain_error("thermo: probe step must satisfy 0 < h << 1");
  const ThermoPoint tp = eval_thermo(m, rho, S);
  const double dtau = h * tp.tau;
  const double dS = h;
  const double e_plus =
      specific_internal_energy_tau(m, tp.tau + dtau, S + dS);
  const double e_minus =
      specific_internal_energy_tau(m, tp.tau - dtau, S - dS);
  const double lhs = tp.T * (2.0 * dS);
  const double rhs = (e_plus - e_minus) + tp.p * (2.0 * dtau);
  return std::fabs(lhs - rhs) / std::fabs(lhs);
}

double dp_drho(const ThermoModel& m, double rho, double S) {
  return m.gamma * eval_thermo(m, rho, S).p / rho;
}

double dw_drho(const ThermoModel& m, double rho, double S) {
  return m.gamma * eval_thermo(m, rho, S).p / (rho * rho);
}

double wt_pp(const ThermoModel& m, double p, double S) {
  const double tau = 1.0 / density_from_pS(m, p, S);
  return -tau / (m.gamma * p);
}

double wt_pS(const ThermoModel& m, double p, double S) {
  const double tau = 1.0 / density_from_pS(m, p, S);
  return tau / (m.gamma * m.c_v);
}

double wt_SS(const ThermoModel& m, double p, double S) {
  const double rho = density_from_pS(m, p, S);
  return eval_thermo(m, rho, S).T / (m.gamma * m.c_v);
}

}  // namespace gas
