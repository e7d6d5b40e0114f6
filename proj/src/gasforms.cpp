#include "gas/forms/gasforms.hpp"

#include <cmath>
#include <stdexcept>

namespace gas::forms {

Form volume_form(const FiberContext& ctx) {
  Form dV(ctx.n + 1);
  std::vector<int> idx;
  for (int a = 0; a <= ctx.n; ++a) idx.push_back(a);
  dV.add_term(std::move(idx), cst(1.0));
  return dV;
}

Form dm_tilde(const FiberContext& ctx, int mu) {
  std::map<int, Expr> v;
  v[mu] = cst(1.0);  // base coordinate mu (0 = t)
  return contraction(v, volume_form(ctx));
}

Form omega_form(const FiberContext& ctx, int alpha) {
  const auto& lo = ctx.layout;
  Form w(1);
  if (alpha == 0) {
    for (int i = 0; i < ctx.n; ++i)
      w.add_term({ctx.fiber(lo.x(i))}, coord(ctx.fiber(lo.u(i))));
    w.add_term({ctx.fiber(lo.S())}, coord(ctx.fiber(lo.r())));
  } else {
    const int k = alpha - 1;
    for (int i = 0; i < ctx.n; ++i)
      w.add_term({ctx.fiber(lo.x(i))}, coord(ctx.fiber(lo.pi(i, k))));
  }
  return w;
}

Expr hamiltonian_expr(const FiberContext& ctx, const Expr& Phi) {
  const auto& lo = ctx.layout;
  Expr h = Phi;
  for (int i = 0; i < ctx.n; ++i) {
    const Expr ui = coord(ctx.fiber(lo.u(i)));
    h = add(h, mul(cst(0.5), mul(ui, ui)));
  }
  // e(tau,S) = p tau / (gamma - 1) for the polytropic EOS.
  h = add(h, divide(mul(pressure_prim(), tau_prim()), cst(ctx.thermo.gamma - 1.0)));
  for (int i = 0; i < ctx.n; ++i)
    for (int k = 0; k < ctx.n; ++k)
      h = add(h, mul(coord(ctx.fiber(lo.pi(i, k))), coord(ctx.fiber(lo.xg(i, k)))));
  return h;
}

Form build_theta(const FiberContext& ctx, const Expr& Phi) {
  Form theta(ctx.n + 1);
  for (int alpha = 0; alpha <= ctx.n; ++alpha)
    theta += wedge(omega_form(ctx, alpha), dm_tilde(ctx, alpha));
  theta -= scale(volume_form(ctx), hamiltonian_expr(ctx, Phi));
  return theta;
}

std::vector<Form> build_beta(const FiberContext& ctx, const Expr& Phi) {
  const auto& lo = ctx.layout;
  const ms::KMatrices K = ms::build_K(lo);
  const Expr H = hamiltonian_expr(ctx, Phi);
  const Form dV = volume_form(ctx);
  std::vector<Form> dmt;
  for (int alpha = 0; alpha <= ctx.n; ++alpha) dmt.push_back(dm_tilde(ctx, alpha));
  std::vector<Form> betas;
  for (int p = 0; p < lo.N; ++p) {
    Form b(ctx.n + 1);
    for (int alpha = 0; alpha <= ctx.n; ++alpha) {
      for (const auto& e : K.K[alpha]) {
        if (e.row == p) {
          Form dz(1);
          dz.add_term({ctx.fiber(e.col)}, cst(1.0));
          b += wedge(dz, dmt[alpha]);
        } else if (e.col == p) {
          Form dz(1);
          dz.add_term({ctx.fiber(e.row)}, cst(1.0));
          b -= wedge(dz, dmt[alpha]);
        }
      }
    }
    b -= scale(dV, diff(H, ctx.fiber(p), ctx));
    betas.push_back(std::move(b));
  }
  return betas;
}

std::vector<std::vector<double>> K_from_domega(const FiberContext& ctx, int alpha) {
  const int N = ctx.layout.N;
  std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
  const Form k2 = exterior_derivative(omega_form(ctx, alpha), ctx);
  for (const auto& [idx, c] : k2.terms()) {
    if (idx.size() != 2 || !ctx.is_fiber(idx[0]) || !ctx.is_fiber(idx[1]))
      throw std::logic_error("K_from_domega: unexpected term structure");
    if (c->k != EK::Const)
      throw std::logic_error("K_from_domega: non-constant coefficient");
    const int i = ctx.slot_of(idx[0]);
    const int j = ctx.slot_of(idx[1]);
    M[i][j] = c->c;
    M[j][i] = -c->c;
  }
  return M;
}

double pullback_density(const Form& f, const FiberContext& ctx, const ms::ZJet& jet) {
  if (f.degree() != ctx.n + 1)
    throw std::invalid_argument("pullback_density: need an (n+1)-form");
  std::vector<double> pt(ctx.coords(), 0.0);
  for (int s = 0; s < ctx.layout.N; ++s) pt[ctx.fiber(s)] = jet.z[s];
  const std::size_t k = f.degree();
  double total = 0.0;
  std::vector<std::vector<double>> M(k, std::vector<double>(k));
  for (const auto& [idx, c] : f.terms()) {
    // Row per index, column per base direction (t, m^1..m^n).
    for (std::size_t row = 0; row < k; ++row) {
      const int q = idx[row];
      for (std::size_t col = 0; col < k; ++col) {
        double v;
        if (!ctx.is_fiber(q)) {
          v = (int(col) == q) ? 1.0 : 0.0;
        } else {
          const int slot = ctx.slot_of(q);
          v = (col == 0) ? jet.z_t[slot] : jet.z_m[col - 1][slot];
        }
        M[row][col] = v;
      }
    }
    // Reuse the alternating evaluation via a local determinant.
    double det = 1.0;
    {
      auto m = M;
      const std::size_t kk = m.size();
      for (std::size_t colp = 0; colp < kk; ++colp) {
        std::size_t piv = colp;
        for (std::size_t r = colp + 1; r < kk; ++r)
          if (std::fabs(m[r][colp]) > std::fabs(m[piv][colp])) piv = r;
        if (m[piv][colp] == 0.0) {
          det = 0.0;
          break;
        }
        if (piv != colp) {
          std::swap(m[piv], m[colp]);
          det = -det;
        }
        det *= m[colp][colp];
        for (std::size_t r = colp + 1; r < kk; ++r) {
          const double fac = m[r][colp] / m[colp][colp];
          for (std::size_t cc = colp; cc < kk; ++cc) m[r][cc] -= fac * m[colp][cc];
        }
      }
    }
    if (det != 0.0) total += eval(c, ctx, pt) * det;
  }
  return total;
}

BetaPullbackReport pullback_beta(const ms::JetField& jets, const FiberContext& ctx,
                                 const Expr& Phi, const Potential& pot) {
  const auto betas = build_beta(ctx, Phi);
  const ms::KMatrices K = ms::build_K(ctx.layout);
  BetaPullbackReport rep;
  rep.row_max.assign(ctx.layout.N, 0.0);
  for (const ms::ZJet& jet : jets.jets) {
    const std::vector<double> res =
        ms::ms_residual(jet, K, ctx.layout, ctx.thermo, pot);
    for (int p = 0; p < ctx.layout.N; ++p) {
      const double d = pullback_density(betas[p], ctx, jet);
      rep.row_max[p] = std::max(rep.row_max[p], std::fabs(d));
      rep.vs_ms_residual = std::max(rep.vs_ms_residual, std::fabs(d - res[p]));
    }
  }
  return rep;
}

double theta_pullback_vs_lagrangian(const ms::JetField& jets, const FiberContext& ctx,
                                    const Expr& Phi, const Potential& pot) {
  const Form theta = build_theta(ctx, Phi);
  const auto& lo = ctx.layout;
  double worst = 0.0;
  std::vector<double> pt(ctx.coords(), 0.0);
  for (const ms::ZJet& jet : jets.jets) {
    const double dens = pullback_density(theta, ctx, jet);
    for (int s = 0; s < lo.N; ++s) pt[ctx.fiber(s)] = jet.z[s];
    double tau;
    {
      // tau from the x_{ij} slots, as in the Hamiltonian.
      std::vector<double> z = jet.z;
      if (ctx.n == 2) {
        tau = z[lo.xg(0, 0)] * z[lo.xg(1, 1)] - z[lo.xg(0, 1)] * z[lo.xg(1, 0)];
      } else {
        tau = z[lo.xg(0, 0)] * (z[lo.xg(1, 1)] * z[lo.xg(2, 2)] -
                                z[lo.xg(1, 2)] * z[lo.xg(2, 1)]) -
              z[lo.xg(0, 1)] * (z[lo.xg(1, 0)] * z[lo.xg(2, 2)] -
                                z[lo.xg(1, 2)] * z[lo.xg(2, 0)]) +
              z[lo.xg(0, 2)] * (z[lo.xg(1, 0)] * z[lo.xg(2, 1)] -
                                z[lo.xg(1, 1)] * z[lo.xg(2, 0)]);
      }
    }
    Point3 x{0, 0, 0};
    for (int i = 0; i < ctx.n; ++i) x[i] = jet.z[lo.x(i)];
    double lag = jet.z[lo.r()] * jet.z_t[lo.S()];
    double u2 = 0.0;
    for (int i = 0; i < ctx.n; ++i) {
      lag += jet.z[lo.u(i)] * jet.z_t[lo.x(i)];
      u2 += jet.z[lo.u(i)] * jet.z[lo.u(i)];
    }
    lag -= 0.5 * u2 + specific_internal_energy_tau(ctx.thermo, tau, jet.z[lo.S()]) +
           pot.value(x);
    // The pi x_{,k} - pi x_{ik} mismatch vanishes on constrained jets.
    for (int i = 0; i < ctx.n; ++i)
      for (int k = 0; k < ctx.n; ++k)
        lag += jet.z[lo.pi(i, k)] * (jet.z_m[k][lo.x(i)] - jet.z[lo.xg(i, k)]);
    worst = std::max(worst, std::fabs(dens - lag));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Random sampling for the ideal checks.

std::vector<double> random_fiber_point(const FiberContext& ctx, std::mt19937_64& rng,
                                       bool constrain_pi) {
  const auto& lo = ctx.layout;
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  std::uniform_real_distribution<double> up(0.5, 2.0);
  std::vector<double> pt(ctx.coords(), 0.0);
  for (int i = 0; i < ctx.n; ++i) {
    pt[ctx.fiber(lo.x(i))] = 0.5 * u11(rng);
    pt[ctx.fiber(lo.u(i))] = 0.5 * u11(rng);
  }
  pt[ctx.fiber(lo.S())] = u11(rng);
  pt[ctx.fiber(lo.r())] = 0.5 * u11(rng);
  double xg[3][3];
  double det = 0.0;
  do {
    for (int i = 0; i < ctx.n; ++i)
      for (int j = 0; j < ctx.n; ++j)
        xg[i][j] = (i == j ? 1.0 : 0.0) + 0.3 * u11(rng);
    if (ctx.n == 2) {
      det = xg[0][0] * xg[1][1] - xg[0][1] * xg[1][0];
    } else {
      det = xg[0][0] * (xg[1][1] * xg[2][2] - xg[1][2] * xg[2][1]) -
            xg[0][1] * (xg[1][0] * xg[2][2] - xg[1][2] * xg[2][0]) +
            xg[0][2] * (xg[1][0] * xg[2][1] - xg[1][1] * xg[2][0]);
    }
  } while (det < 0.2);
  // Rescale the block so the EOS pressure lands in [0.5, 2].
  const double p_target = up(rng);
  const double S = pt[ctx.fiber(lo.S())];
  const double tau_target = std::pow(
      ctx.thermo.A0 * std::exp(S / ctx.thermo.c_v) / p_target, 1.0 / ctx.thermo.gamma);
  const double c = std::pow(tau_target / det, 1.0 / ctx.n);
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.n; ++j) pt[ctx.fiber(lo.xg(i, j))] = c * xg[i][j];
  if (constrain_pi) {
    const double tau = tau_target;
    const double p = pressure_from_tau(ctx.thermo, tau, S);
    for (int i = 0; i < ctx.n; ++i)
      for (int j = 0; j < ctx.n; ++j) {
        const double A = eval(cofactor_expr(ctx, i, j), ctx, pt);
        pt[ctx.fiber(lo.pi(i, j))] = p * A;
      }
  } else {
    for (int i = 0; i < ctx.n; ++i)
      for (int j = 0; j < ctx.n; ++j)
        pt[ctx.fiber(lo.pi(i, j))] = (i == j ? 1.0 : 0.0) + 0.3 * u11(rng);
  }
  return pt;
}

std::vector<double> random_tangent(const FiberContext& ctx, std::mt19937_64& rng,
                                   const std::vector<double>& pt, bool constrain_pi) {
  const auto& lo = ctx.layout;
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  std::vector<double> v(ctx.coords());
  for (int c = 0; c < ctx.coords(); ++c) v[c] = u11(rng);
  if (!constrain_pi) return v;
  // Slave the pi-components to d(p A) so the vector stays tangent to the
  // constraint surface pi = p A.
  const double S = pt[ctx.fiber(lo.S())];
  std::vector<double> tau_pt = pt;
  const double tau = eval(tau_prim(), ctx, tau_pt);
  const double p = pressure_from_tau(ctx.thermo, tau, S);
  double A[3][3] = {}, dA[3][3] = {}, x[3][3] = {}, dx[3][3] = {};
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.n; ++j) {
      x[i][j] = pt[ctx.fiber(lo.xg(i, j))];
      dx[i][j] = v[ctx.fiber(lo.xg(i, j))];
    }
  if (ctx.n == 2) {
    A[0][0] = x[1][1]; A[0][1] = -x[1][0]; A[1][0] = -x[0][1]; A[1][1] = x[0][0];
    dA[0][0] = dx[1][1]; dA[0][1] = -dx[1][0];
    dA[1][0] = -dx[0][1]; dA[1][1] = dx[0][0];
  } else {
    for (int i = 0; i < 3; ++i) {
      const int a = (i + 1) % 3, b = (i + 2) % 3;
      for (int j = 0; j < 3; ++j) {
        const int pp = (j + 1) % 3, qq = (j + 2) % 3;
        A[i][j] = x[a][pp] * x[b][qq] - x[a][qq] * x[b][pp];
        dA[i][j] = dx[a][pp] * x[b][qq] - dx[a][qq] * x[b][pp] +
                   x[a][pp] * dx[b][qq] - x[a][qq] * dx[b][pp];
      }
    }
  }
  double dtau = 0.0;
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.n; ++j) dtau += A[i][j] * dx[i][j];
  const double dp = (p / ctx.thermo.c_v) * v[ctx.fiber(lo.S())] -
                    ctx.thermo.gamma * (p / tau) * dtau;
  for (int i = 0; i < ctx.n; ++i)
    for (int j = 0; j < ctx.n; ++j)
      v[ctx.fiber(lo.pi(i, j))] = dp * A[i][j] + p * dA[i][j];
  return v;
}

// ---------------------------------------------------------------------------
// Closed-ideal identities.

namespace {

Form base_one_form(const FiberContext&, int base_coord) {
  Form f(1);
  f.add_term({base_coord}, cst(1.0));
  return f;
}

struct Identity {
  std::string name;
  Form lhs;
  Form rhs;
  bool constrained;
};

std::vector<Identity> build_identities(const FiberContext& ctx, const Expr& Phi) {
  const auto& lo = ctx.layout;
  const int n = ctx.n;
  const auto betas = build_beta(ctx, Phi);
  const Form dV = volume_form(ctx);
  const Form dt = base_one_form(ctx, ctx.base_t());
  const double sn = (n % 2 == 0) ? 1.0 : -1.0;  // (-1)^n
  const Expr P = pressure_prim();
  const Expr tau = tau_prim();
  const Expr wt_pS = divide(tau, cst(ctx.thermo.gamma * ctx.thermo.c_v));
  const Expr Texpr =
      divide(mul(P, tau), cst((ctx.thermo.gamma - 1.0) * ctx.thermo.c_v));
  const Expr wt_SS = divide(Texpr, cst(ctx.thermo.gamma * ctx.thermo.c_v));
  const Expr Dexpr =
      mul(divide(tau, P), cst(double(n) / (n - 1.0) - 1.0 / ctx.thermo.gamma));
  const Form dp = exterior_derivative(scalar_form(P), ctx);
  const Form dp_dV = wedge(dp, dV);
  const Form betaS_dt = wedge(betas[lo.r()], dt);  // beta^S lives at the r-slot

  std::vector<Identity> ids;
  // (id3): d beta_j = (-1)^(n+1) Phi_{,js} beta^{u^s} ^ dt.
  for (int j = 0; j < n; ++j) {
    Form rhs(ctx.n + 2);
    for (int s = 0; s < n; ++s) {
      const Expr hess = diff(diff(Phi, ctx.fiber(lo.x(j)), ctx), ctx.fiber(lo.x(s)), ctx);
      if (is_zero(hess)) continue;
      rhs += scale(wedge(betas[lo.u(s)], dt), mul(cst(-sn), hess));
    }
    ids.push_back({"id3_j" + std::to_string(j + 1),
                   exterior_derivative(betas[lo.x(j)], ctx), std::move(rhs), false});
  }
  // (id4): d beta^{u^j} = (-1)^n beta_j ^ dt.
  for (int j = 0; j < n; ++j) {
    ids.push_back({"id4_j" + std::to_string(j + 1),
                   exterior_derivative(betas[lo.u(j)], ctx),
                   scale(wedge(betas[lo.x(j)], dt), cst(sn)), false});
  }
  // (id5): d beta^S = 0 (beta^S lives at the r-slot).
  ids.push_back(
      {"id5", exterior_derivative(betas[lo.r()], ctx), Form(ctx.n + 2), false});
  // (id6): d beta^r = -(wt_Sp dp^dV + (-1)^n wt_SS beta^S ^ dt).
  {
    Form rhs = scale(dp_dV, neg(wt_pS));  // wt_Sp = wt_pS
    rhs += scale(betaS_dt, neg(mul(cst(sn), wt_SS)));
    ids.push_back({"id6", exterior_derivative(betas[lo.S()], ctx), std::move(rhs),
                   false});
  }
  // (id7): dp^dV = (-1)^(n+1)/D { wt_pS beta^S^dt + x_{ij}/((n-1)p) beta_i^dm^j }.
  {
    Form inner = scale(betaS_dt, wt_pS);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Expr cij = divide(coord(ctx.fiber(lo.xg(i, j))), mul(cst(n - 1.0), P));
        inner += scale(wedge(betas[lo.x(i)], base_one_form(ctx, ctx.base_m(j))), cij);
      }
    ids.push_back({"id7", dp_dV, scale(inner, divide(cst(-sn), Dexpr)), true});
  }
  // (id9): d beta_{jk} = -(1/(p tau)) { (-1)^n x_{js} x_{ik} beta_i^dm^s
  //        + x_{jk} [ (p wt_pp + tau) dp^dV + (-1)^n p wt_pS beta^S^dt ] }.
  const Expr pwtpp_tau = mul(tau, cst(1.0 - 1.0 / ctx.thermo.gamma));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Form rhs(ctx.n + 2);
      for (int i = 0; i < n; ++i)
        for (int sidx = 0; sidx < n; ++sidx) {
          const Expr cc = mul(cst(sn), mul(coord(ctx.fiber(lo.xg(j, sidx))),
                                           coord(ctx.fiber(lo.xg(i, k)))));
          rhs += scale(wedge(betas[lo.x(i)], base_one_form(ctx, ctx.base_m(sidx))), cc);
        }
      Form inner = scale(dp_dV, pwtpp_tau);
      inner += scale(betaS_dt, mul(cst(sn), mul(P, wt_pS)));
      rhs += scale(inner, coord(ctx.fiber(lo.xg(j, k))));
      ids.push_back({"id9_" + std::to_string(j + 1) + std::to_string(k + 1),
                     exterior_derivative(betas[lo.pi(j, k)], ctx),
                     scale(rhs, divide(cst(-1.0), mul(P, tau))), true});
    }
  return ids;
}

}  // namespace

IdealReport ideal_closure_check(const FiberContext& ctx, const Expr& Phi, int trials,
                                unsigned seed) {
  const auto ids = build_identities(ctx, Phi);
  std::mt19937_64 rng(seed);
  IdealReport rep;
  for (const auto& id : ids) {
    double worst = 0.0, scale_seen = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto pt = random_fiber_point(ctx, rng, id.constrained);
      std::vector<std::vector<double>> vecs;
      for (int k = 0; k < ctx.n + 2; ++k)
        vecs.push_back(random_tangent(ctx, rng, pt, id.constrained));
      const double l = eval_on(id.lhs, ctx, pt, vecs);
      const double r = eval_on(id.rhs, ctx, pt, vecs);
      worst = std::max(worst, std::fabs(l - r));
      scale_seen = std::max({scale_seen, std::fabs(l), std::fabs(r)});
    }
    rep.rows.push_back({id.name, worst, scale_seen});
    rep.max_residual = std::max(rep.max_residual, worst);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Pulled-back symplecticity forms vs the conservation module.

SymplFormReport symplectic_conservation_form(const SimState& s,
                                             const cons::LawContext& lctx) {
  if (s.k_lin() != 0)
    throw std::invalid_argument(
        "symplectic_conservation_form: Lin-free states only (forms ideal drops "
        "the Lin pairs)");
  const LabelGrid& g = s.grid();
  const FiberContext ctx = FiberContext::make(g.n, lctx.thermo);
  const ms::JetField jets = ms::assemble_jets(s, lctx.thermo, lctx.potential, ctx.layout);
  const cons::Workspace ws = cons::Workspace::build(s, lctx);

  std::vector<Form> kappa;
  for (int alpha = 0; alpha <= g.n; ++alpha)
    kappa.push_back(exterior_derivative(omega_form(ctx, alpha), ctx));

  SymplFormReport rep;
  std::vector<double> pt(ctx.coords(), 0.0);
  auto tangent_time = [&](const ms::ZJet& jet) {
    std::vector<double> v(ctx.coords(), 0.0);
    v[ctx.base_t()] = 1.0;
    for (int slot = 0; slot < ctx.layout.N; ++slot)
      v[ctx.fiber(slot)] = jet.z_t[slot];
    return v;
  };
  auto tangent_label = [&](const ms::ZJet& jet, int axis) {
    std::vector<double> v(ctx.coords(), 0.0);
    v[ctx.base_m(axis)] = 1.0;
    for (int slot = 0; slot < ctx.layout.N; ++slot)
      v[ctx.fiber(slot)] = jet.z_m[axis][slot];
    return v;
  };

  for (int s_axis = 0; s_axis < g.n; ++s_axis) {
    const ScalarField Dcons = cons::sympl_tm_density_bracket(ws, s_axis);
    const VectorField Fcons = cons::sympl_tm_flux_bracket(ws, s_axis);
    ScalarField Dforms(g);
    VectorField Fforms(g);
    for (std::size_t q = 0; q < g.point_count(); ++q) {
      const ms::ZJet& jet = jets.jets[q];
      for (int slot = 0; slot < ctx.layout.N; ++slot) pt[ctx.fiber(slot)] = jet.z[slot];
      const auto vt = tangent_time(jet);
      const auto vs = tangent_label(jet, s_axis);
      Dforms[q] = eval_on(kappa[0], ctx, pt, {vt, vs});
      for (int k = 0; k < g.n; ++k)
        Fforms.comp(k)[q] = eval_on(kappa[k + 1], ctx, pt, {vt, vs});
    }
    {
      ScalarField d = Dforms;
      d -= Dcons;
      rep.tm_density_agreement = std::max(rep.tm_density_agreement, d.max_abs());
    }
    for (int k = 0; k < g.n; ++k) {
      ScalarField d = Fforms.comp(k);
      d -= Fcons.comp(k);
      rep.tm_flux_agreement = std::max(rep.tm_flux_agreement, d.max_abs());
    }
    // Assemble the tm law with the same outer stencils as conservation.
    ScalarField R = label_derivative(cons::sympl_tm_energy_rate(ws), s_axis);
    R *= -1.0;
    for (int k = 0; k < g.n; ++k) R += label_derivative(Fforms.comp(k), k);
    rep.tm_residual_max = std::max(rep.tm_residual_max, R.max_abs());
    R -= cons::sympl_tm_residual_field(ws, s_axis);
    rep.tm_residual_agreement = std::max(rep.tm_residual_agreement, R.max_abs());
  }

  // dm^a ^ dm^b components reproduce the mm-invariant density.
  const auto pairs = (g.n == 2) ? std::vector<std::pair<int, int>>{{0, 1}}
                                : std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}};
  for (auto [a, b] : pairs) {
    const ScalarField Icons = cons::sympl_mm_density(ws, a, b);
    ScalarField Iforms(g);
    for (std::size_t q = 0; q < g.point_count(); ++q) {
      const ms::ZJet& jet = jets.jets[q];
      for (int slot = 0; slot < ctx.layout.N; ++slot) pt[ctx.fiber(slot)] = jet.z[slot];
      Iforms[q] = eval_on(kappa[0], ctx, pt, {tangent_label(jet, a), tangent_label(jet, b)});
    }
    Iforms -= Icons;
    rep.mm_density_agreement = std::max(rep.mm_density_agreement, Iforms.max_abs());
  }
  return rep;
}

}  // namespace gas::forms
