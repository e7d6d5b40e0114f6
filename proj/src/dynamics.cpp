#include "gas/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace gas {

Potential Potential::zero() {
  Potential p;
  p.value = [](const Point3&) { return 0.0; };
  p.grad = [](const Point3&) { return Point3{0, 0, 0}; };
  return p;
}

Potential Potential::uniform(const Point3& g) {
  Potential p;
  p.value = [g](const Point3& x) { return g[0] * x[0] + g[1] * x[1] + g[2] * x[2]; };
  p.grad = [g](const Point3&) { return g; };
  return p;
}

VectorField SimState::displacement() const {
  const LabelGrid& g = grid();
  VectorField d = x;
  for (int c = 0; c < g.n; ++c) {
    auto& dc = d.comp(c);
    parallel_for(g.point_count(), [&](std::size_t i) { dc[i] -= g.label(i)[c]; });
  }
  return d;
}

static void check_nonsingular(const ScalarField& J, const char* where) {
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (J[i] <= 1e-12) {
      std::ostringstream os;
      os << where << ": singular Lagrangian map, J=" << J[i] << " at point " << i;
      throw std::runtime_error(os.str());
    }
  }
}

MapThermo evaluate_map_thermo(const SimState& s, const ThermoModel& thermo) {
  MapThermo mt;
  mt.xg = deformation_gradient(s.displacement());
  mt.J = jacobian(mt.xg);
  check_nonsingular(mt.J, "evaluate_map_thermo");
  mt.A = cofactor(mt.xg);
  mt.y = inverse_gradient(mt.xg, mt.J);
  const LabelGrid& g = s.grid();
  mt.p = ScalarField(g);
  mt.T = ScalarField(g);
  mt.w = ScalarField(g);
  mt.e = ScalarField(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    const ThermoPoint tp = eval_thermo(thermo, 1.0 / mt.J[i], s.S[i]);
    mt.p[i] = tp.p;
    mt.T[i] = tp.T;
    mt.w[i] = tp.w;
    mt.e[i] = tp.e;
  });
  return mt;
}

static Point3 point_of(const VectorField& x, std::size_t i) {
  Point3 p{0, 0, 0};
  for (int c = 0; c < x.ncomp(); ++c) p[c] = x.comp(c)[i];
  return p;
}

VectorField momentum_rhs(const SimState& s, const MapThermo& mt, const Potential& pot) {
  const LabelGrid& g = s.grid();
  VectorField rhs(g);
  for (int i = 0; i < g.n; ++i) {
    for (int k = 0; k < g.n; ++k) {
      ScalarField flux = hadamard(mt.p, mt.A.comp(i, k));
      rhs.comp(i) -= label_derivative(flux, k);
    }
  }
  VectorField gphi(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    const Point3 gp = pot.grad(point_of(s.x, i));
    for (int c = 0; c < g.n; ++c) gphi.comp(c)[i] = gp[c];
  });
  rhs -= gphi;
  return rhs;
}

VectorField momentum_rhs(const SimState& s, const ThermoModel& thermo,
                         const Potential& pot) {
  const MapThermo mt = evaluate_map_thermo(s, thermo);
  return momentum_rhs(s, mt, pot);
}

StateDeriv full_rhs(const SimState& s, const ThermoModel& thermo, const Potential& pot) {
  const LabelGrid& g = s.grid();
  const MapThermo mt = evaluate_map_thermo(s, thermo);
  StateDeriv d;
  d.dx = s.u;
  d.du = momentum_rhs(s, mt, pot);
  d.dr = ScalarField(g);
  d.dphi = ScalarField(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    d.dr[i] = -mt.T[i];
    double u2 = 0.0;
    for (int c = 0; c < g.n; ++c) u2 += s.u.comp(c)[i] * s.u.comp(c)[i];
    d.dphi[i] = 0.5 * u2 - mt.w[i] - pot.value(point_of(s.x, i));
  });
  return d;
}

static SimState advanced(const SimState& s, const StateDeriv& d, double c) {
  SimState out = s;
  out.t = s.t + c;
  out.x.axpy(c, d.dx);
  out.u.axpy(c, d.du);
  out.r.axpy(c, d.dr);
  out.phi.axpy(c, d.dphi);
  return out;
}

static SimState step_rk4(const SimState& s, double dt, const ThermoModel& th,
                         const Potential& pot) {
  const StateDeriv k1 = full_rhs(s, th, pot);
  const StateDeriv k2 = full_rhs(advanced(s, k1, 0.5 * dt), th, pot);
  const StateDeriv k3 = full_rhs(advanced(s, k2, 0.5 * dt), th, pot);
  const StateDeriv k4 = full_rhs(advanced(s, k3, dt), th, pot);
  SimState out = s;
  out.t = s.t + dt;
  const double c = dt / 6.0;
  out.x.axpy(c, k1.dx).axpy(2 * c, k2.dx).axpy(2 * c, k3.dx).axpy(c, k4.dx);
  out.u.axpy(c, k1.du).axpy(2 * c, k2.du).axpy(2 * c, k3.du).axpy(c, k4.du);
  out.r.axpy(c, k1.dr).axpy(2 * c, k2.dr).axpy(2 * c, k3.dr).axpy(c, k4.dr);
  out.phi.axpy(c, k1.dphi).axpy(2 * c, k2.dphi).axpy(2 * c, k3.dphi).axpy(c, k4.dphi);
  return out;
}

// Kick-drift-kick on (x,u); (r,phi) advance with midpoint rates evaluated at
// the half-step map and half-step velocity.
static SimState step_leapfrog(const SimState& s, double dt, const ThermoModel& th,
                              const Potential& pot) {
  const LabelGrid& g = s.grid();
  SimState mid = s;
  mid.u.axpy(0.5 * dt, momentum_rhs(s, th, pot));  // half kick
  mid.x.axpy(0.5 * dt, mid.u);                     // half drift
  mid.t = s.t + 0.5 * dt;

  const MapThermo mtm = evaluate_map_thermo(mid, th);
  SimState out = s;
  out.t = s.t + dt;
  out.x = mid.x;
  out.x.axpy(0.5 * dt, mid.u);  // complete the drift
  parallel_for(g.point_count(), [&](std::size_t i) {
    double u2 = 0.0;
    for (int c = 0; c < g.n; ++c) u2 += mid.u.comp(c)[i] * mid.u.comp(c)[i];
    out.r[i] = s.r[i] - dt * mtm.T[i];
    out.phi[i] = s.phi[i] + dt * (0.5 * u2 - mtm.w[i] - pot.value(point_of(mid.x, i)));
  });
  out.u = mid.u;
  SimState end = out;  // positions at t+dt for the closing kick
  out.u.axpy(0.5 * dt, momentum_rhs(end, th, pot));
  return out;
}

SimState step(const SimState& s, double dt, Integrator integ, const ThermoModel& thermo,
              const Potential& pot) {
  if (dt == 0.0) return s;
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be >= 0");
  return integ == Integrator::rk4 ? step_rk4(s, dt, thermo, pot)
                                  : step_leapfrog(s, dt, thermo, pot);
}

static ScalarField sample_fn(const LabelGrid& g, const ScalarFn& f) {
  return ScalarField::sample(g, [&](const std::array<double, 3>& m) { return f(m); });
}

static SimState init_common(const LabelGrid& grid,
                            const std::vector<ScalarFn>& displacement,
                            const ScalarFn& S0) {
  grid.validate();
  if (int(displacement.size()) != grid.n)
    throw std::invalid_argument("init: displacement needs n components");
  SimState s;
  s.t = 0.0;
  s.x = VectorField(grid);
  for (int c = 0; c < grid.n; ++c) {
    const ScalarField d = sample_fn(grid, displacement[c]);
    auto& xc = s.x.comp(c);
    parallel_for(grid.point_count(), [&](std::size_t i) {
      xc[i] = grid.label(i)[c] + d[i];
    });
  }
  s.S = sample_fn(grid, S0);
  s.u = VectorField(grid);
  s.r = ScalarField(grid);
  s.phi = ScalarField(grid);
  return s;
}

SimState init_clebsch(const LabelGrid& grid, const ThermoModel& thermo,
                      const std::vector<ScalarFn>& displacement, const ScalarFn& phi0,
                      const ScalarFn& r0, const ScalarFn& S0,
                      const std::vector<ScalarFn>& lamt0,
                      const std::vector<ScalarFn>& mu0) {
  thermo.validate();
  if (lamt0.size() != mu0.size())
    throw std::invalid_argument("init_clebsch: lamt0/mu0 length mismatch");
  SimState s = init_common(grid, displacement, S0);
  s.phi = sample_fn(grid, phi0);
  s.r = sample_fn(grid, r0);
  for (std::size_t k = 0; k < lamt0.size(); ++k) {
    s.lamt.push_back(sample_fn(grid, lamt0[k]));
    s.mu.push_back(sample_fn(grid, mu0[k]));
  }
  const TensorField xg = deformation_gradient(s.displacement());
  const ScalarField J = jacobian(xg);
  check_nonsingular(J, "init_clebsch");
  const TensorField y = inverse_gradient(xg, J);
  const VectorField gphi = eulerian_gradient(s.phi, y);
  const VectorField gS = eulerian_gradient(s.S, y);
  for (int c = 0; c < grid.n; ++c) {
    auto& uc = s.u.comp(c);
    parallel_for(grid.point_count(), [&](std::size_t i) {
      uc[i] = gphi.comp(c)[i] - s.r[i] * gS.comp(c)[i];
    });
  }
  for (std::size_t k = 0; k < s.mu.size(); ++k) {
    const VectorField gmu = eulerian_gradient(s.mu[k], y);
    for (int c = 0; c < grid.n; ++c) {
      auto& uc = s.u.comp(c);
      const auto& lam = s.lamt[k];
      parallel_for(grid.point_count(), [&](std::size_t i) {
        uc[i] -= lam[i] * gmu.comp(c)[i];
      });
    }
  }
  s.clebsch_initialized = true;
  return s;
}

SimState init_direct(const LabelGrid& grid, const std::vector<ScalarFn>& displacement,
                     const std::vector<ScalarFn>& u0, const ScalarFn& S0,
                     const ScalarFn& r0) {
  if (int(u0.size()) != grid.n)
    throw std::invalid_argument("init_direct: u0 needs n components");
  SimState s = init_common(grid, displacement, S0);
  for (int c = 0; c < grid.n; ++c) s.u.comp(c) = sample_fn(grid, u0[c]);
  s.r = sample_fn(grid, r0);
  s.clebsch_initialized = false;
  return s;
}

ScalarField clebsch_residual(const SimState& s) {
  const LabelGrid& g = s.grid();
  const TensorField xg = deformation_gradient(s.displacement());
  const ScalarField J = jacobian(xg);
  const TensorField y = inverse_gradient(xg, J);
  const VectorField gphi = eulerian_gradient(s.phi, y);
  const VectorField gS = eulerian_gradient(s.S, y);
  std::vector<VectorField> gmu;
  for (const auto& mu_k : s.mu) gmu.push_back(eulerian_gradient(mu_k, y));
  ScalarField res(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    double sum2 = 0.0;
    for (int c = 0; c < g.n; ++c) {
      double rec = gphi.comp(c)[i] - s.r[i] * gS.comp(c)[i];
      for (std::size_t k = 0; k < gmu.size(); ++k)
        rec -= s.lamt[k][i] * gmu[k].comp(c)[i];
      const double d = s.u.comp(c)[i] - rec;
      sum2 += d * d;
    }
    res[i] = std::sqrt(sum2);
  });
  return res;
}

SimState run(const SimState& s0, const SimConfig& cfg, int cadence,
             const std::function<void(const SimState&)>& sample) {
  cfg.validate();
  if (cadence <= 0) throw std::invalid_argument("run: cadence must be positive");
  SimState s = s0;
  if (sample) sample(s);
  const double t_end = s0.t + cfg.t_end;
  long step_index = 0;
  while (s.t < t_end - 1e-12 * std::max(1.0, std::fabs(t_end))) {
    const double dt = std::min(cfg.dt, t_end - s.t);
    s = step(s, dt, cfg.integrator, cfg.thermo, cfg.potential);
    ++step_index;
    const bool last = !(s.t < t_end - 1e-12 * std::max(1.0, std::fabs(t_end)));
    if (sample && (step_index % cadence == 0 || last)) sample(s);
  }
  return s;
}

}  // namespace gas
