#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "gas/thermo.hpp"

using namespace gas;

namespace {
const ThermoModel base{5.0 / 3.0, 1.0, 1.0};
}

TEST_CASE("internal energy density, hand-evaluated points") {
  // gamma=5/3: eps(1,0) = 1/(gamma-1) = 3/2.
  CHECK(internal_energy_density(base, 1.0, 0.0) == doctest::Approx(1.5).epsilon(1e-15));
  // gamma=2, rho=2: 2^2/(2-1) = 4.
  CHECK(internal_energy_density(ThermoModel{2.0, 1.0, 1.0}, 2.0, 0.0) ==
        doctest::Approx(4.0).epsilon(1e-15));
  // A0 -> 0 limit: eps scales linearly with A0.
  CHECK(internal_energy_density(ThermoModel{5.0 / 3.0, 1.0, 1e-300}, 1.0, 0.0) <=
        1.5e-300);
  CHECK_THROWS_AS(internal_energy_density(base, -1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(internal_energy_density(base, 0.0, 0.0), std::domain_error);
}

TEST_CASE("eval_thermo derived quantities") {
  const ThermoPoint tp = eval_thermo(base, 1.0, 0.0);
  CHECK(tp.p == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tp.T == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(tp.w == doctest::Approx(2.5).epsilon(1e-15));
  // Entropy shift S = c_v ln 2 doubles the pressure.
  CHECK(eval_thermo(base, 1.0, std::log(2.0)).p == doctest::Approx(2.0).epsilon(1e-14));
  // Identity w = (eps + p)/rho.
  const double eps = internal_energy_density(base, 1.0, 0.0);
  CHECK(tp.w - (eps + tp.p) / tp.rho == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tp.tau * tp.rho == 1.0);
}

TEST_CASE("pressure matches rho eps_rho - eps by finite differences") {
  for (double rho : {0.3, 1.0, 2.7}) {
    for (double S : {-1.0, 0.0, 0.8}) {
      const ThermoPoint tp = eval_thermo(base, rho, S);
      // Richardson-extrapolated centered difference: truncation O(h^4) with
      // h large enough to stay clear of cancellation noise.
      auto eps_of = [&](double r) { return internal_energy_density(base, r, S); };
      auto centered = [&](double h) {
        return (eps_of(rho + h) - eps_of(rho - h)) / (2 * h);
      };
      const double h = 1e-4 * rho;
      const double deps = (4.0 * centered(h / 2) - centered(h)) / 3.0;
      const double p_fd = rho * deps - eps_of(rho);
      CHECK(std::fabs(tp.p - p_fd) / tp.p < 1e-10);
    }
  }
}

TEST_CASE("enthalpy_pS inversion and partial derivatives") {
  const EnthalpyPoint ep = enthalpy_pS(base, 1.0, 0.0);
  CHECK(ep.tau == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ep.T == doctest::Approx(1.5).epsilon(1e-14));
  // p = 2^gamma inverts to rho = 2.
  CHECK(enthalpy_pS(base, std::pow(2.0, base.gamma), 0.0).tau ==
        doctest::Approx(0.5).epsilon(1e-14));
  // Centered differences of w~ recover tau and T to O(h^2).
  const double p = 1.7, S = 0.4, h = 1e-5;
  const EnthalpyPoint e0 = enthalpy_pS(base, p, S);
  const double dw_dp = (enthalpy_pS(base, p + h, S).w - enthalpy_pS(base, p - h, S).w) / (2 * h);
  const double dw_dS = (enthalpy_pS(base, p, S + h).w - enthalpy_pS(base, p, S - h).w) / (2 * h);
  CHECK(std::fabs(dw_dp - e0.tau) / e0.tau < 1e-8);
  CHECK(std::fabs(dw_dS - e0.T) / e0.T < 1e-8);
  CHECK_THROWS_AS(enthalpy_pS(base, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(enthalpy_pS(base, -2.0, 0.0), std::domain_error);
}

TEST_CASE("second partials of w~ against finite differences") {
  const double p = 1.3, S = -0.2, h = 1e-5;
  auto tau_of = [&](double pp, double ss) { return enthalpy_pS(base, pp, ss).tau; };
  auto T_of = [&](double pp, double ss) { return enthalpy_pS(base, pp, ss).T; };
  CHECK(std::fabs((tau_of(p + h, S) - tau_of(p - h, S)) / (2 * h) - wt_pp(base, p, S)) <
        1e-7);
  CHECK(std::fabs((tau_of(p, S + h) - tau_of(p, S - h)) / (2 * h) - wt_pS(base, p, S)) <
        1e-7);
  CHECK(std::fabs((T_of(p, S + h) - T_of(p, S - h)) / (2 * h) - wt_SS(base, p, S)) <
        1e-7);
}

TEST_CASE("Gibbs residual is second order in the probe") {
  // Centered probes: relative residual ~ O(h^2) ~ 1e-10 at h = 1e-5.
  CHECK(gibbs_residual(base, 1.0, 0.0, 1e-5) < 1e-8);
  const double r1 = gibbs_residual(base, 1.7, 0.5, 2e-4);
  const double r2 = gibbs_residual(base, 1.7, 0.5, 1e-4);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.25));
  // S-only probe: T matches e_S at fixed tau.
  const ThermoPoint tp = eval_thermo(base, 1.7, 0.5);
  const double h = 1e-6;
  const double eS = (specific_internal_energy_tau(base, tp.tau, 0.5 + h) -
                     specific_internal_energy_tau(base, tp.tau, 0.5 - h)) /
                    (2 * h);
  CHECK(std::fabs(eS - tp.T) / tp.T < 1e-9);
  CHECK_THROWS_AS(gibbs_residual(base, 1.0, 0.0, 2.0), std::domain_error);
}

TEST_CASE("positivity and consistency over the sample grid") {
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double rho = 0.1 + (10.0 - 0.1) * i / 19.0;
      const double S = -2.0 + 4.0 * j / 19.0;
      const ThermoPoint tp = eval_thermo(base, rho, S);
      CHECK(tp.p > 0.0);
      CHECK(tp.T > 0.0);
      CHECK(tp.w > 0.0);
      CHECK(gibbs_residual(base, rho, S, 1e-5) < 1e-8);
      // enthalpy_pS o eval_thermo is the identity on (p, S).
      const double rho_back = density_from_pS(base, tp.p, S);
      CHECK(std::fabs(eval_thermo(base, rho_back, S).p - tp.p) / tp.p < 1e-12);
      CHECK(std::fabs(rho_back - rho) / rho < 1e-12);
    }
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS((ThermoModel{1.0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ThermoModel{1.4, 0.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ThermoModel{1.4, 1.0, -1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW(base.validate());
}
