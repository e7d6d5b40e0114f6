#pragma once

// Shared analytic states and convergence helpers for the test suites.

#include <cmath>
#include <functional>
#include <vector>

#include "gas/dynamics.hpp"

namespace gas::test {

inline constexpr double two_pi = 2.0 * M_PI;

/// Smooth non-barotropic 2D scenario: sinusoidal displacement and entropy,
/// Clebsch-initialized, amplitudes small enough to stay shock-free past t=1.
inline SimState smooth2d_state(int npts, int fd_order = 4, double amp = 0.02) {
  const LabelGrid g = LabelGrid::unit_box(2, npts, fd_order);
  std::vector<ScalarFn> disp = {
      [amp](const Point3& m) {
        return amp * std::sin(two_pi * m[0]) * std::cos(two_pi * m[1]);
      },
      [amp](const Point3& m) {
        return -amp * std::cos(two_pi * m[0]) * std::sin(two_pi * m[1]);
      }};
  const ScalarFn phi0 = [amp](const Point3& m) {
    return 2.0 * amp * std::sin(two_pi * m[0]) * std::sin(two_pi * m[1]);
  };
  const ScalarFn r0 = [amp](const Point3& m) {
    return 3.0 * amp * std::cos(two_pi * m[1]);
  };
  const ScalarFn S0 = [](const Point3& m) {
    return 0.15 * std::cos(two_pi * m[0]) * std::cos(two_pi * m[1]);
  };
  const ScalarFn l0 = [amp](const Point3& m) {
    return 2.0 * amp * std::sin(two_pi * m[1]);
  };
  const ScalarFn m0 = [](const Point3& m) {
    return 0.3 * std::cos(two_pi * m[0]);
  };
  return init_clebsch(g, ThermoModel{}, disp, phi0, r0, S0, {l0}, {m0});
}

/// Vortical 3D Clebsch scenario (nonzero helicity density).
inline SimState clebsch3d_state(int npts, int fd_order = 4, double amp = 0.02) {
  const LabelGrid g = LabelGrid::unit_box(3, npts, fd_order);
  std::vector<ScalarFn> disp = {
      [amp](const Point3& m) { return amp * std::sin(two_pi * m[0]) * std::cos(two_pi * m[2]); },
      [amp](const Point3& m) { return amp * std::sin(two_pi * m[1]) * std::cos(two_pi * m[0]); },
      [amp](const Point3& m) { return amp * std::sin(two_pi * m[2]) * std::cos(two_pi * m[1]); }};
  const ScalarFn phi0 = [amp](const Point3& m) {
    return 2.0 * amp * std::sin(two_pi * m[0]) * std::sin(two_pi * m[1]);
  };
  const ScalarFn r0 = [amp](const Point3& m) {
    return 3.0 * amp * std::cos(two_pi * m[2]);
  };
  const ScalarFn S0 = [](const Point3& m) {
    return 0.1 * std::cos(two_pi * m[0]) * std::cos(two_pi * m[1]);
  };
  const ScalarFn l0 = [amp](const Point3& m) {
    return 3.0 * amp * std::sin(two_pi * m[1]);
  };
  const ScalarFn m0 = [](const Point3& m) {
    return 0.3 * std::cos(two_pi * m[2]) + 0.2 * std::sin(two_pi * m[0]);
  };
  return init_clebsch(g, ThermoModel{}, disp, phi0, r0, S0, {l0}, {m0});
}

/// Uniform translation x = m + u0 t: a fixed point of the momentum equation.
inline SimState uniform_state(int n, int npts, const Point3& u0, int fd_order = 4) {
  const LabelGrid g = LabelGrid::unit_box(n, npts, fd_order);
  std::vector<ScalarFn> disp, vel;
  for (int c = 0; c < n; ++c) {
    disp.push_back([](const Point3&) { return 0.0; });
    vel.push_back([u0, c](const Point3&) { return u0[c]; });
  }
  return init_direct(g, disp, vel, [](const Point3&) { return 0.1; },
                     [](const Point3&) { return 0.2; });
}

/// Observed convergence order from errors at resolutions N and 2N.
inline double observed_order(double err_coarse, double err_fine) {
  return std::log2(err_coarse / err_fine);
}

}  // namespace gas::test
