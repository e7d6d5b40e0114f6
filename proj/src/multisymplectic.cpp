#include "gas/multisymplectic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gas::ms {

ZLayout ZLayout::build(int n, int k_lin) {
  if (n != 2 && n != 3) throw std::invalid_argument("ZLayout: n must be 2 or 3");
  if (k_lin < 0) throw std::invalid_argument("ZLayout: k_lin must be >= 0");
  ZLayout lo;
  lo.n = n;
  lo.k_lin = k_lin;
  lo.N = 2 * n * n + 2 * n + 2 + 2 * k_lin;
  return lo;
}

std::string ZLayout::slot_name(int slot) const {
  std::ostringstream os;
  if (slot < n) os << "x" << slot + 1;
  else if (slot < 2 * n) os << "u" << slot - n + 1;
  else if (slot < 2 * n + n * n) {
    const int q = slot - 2 * n;
    os << "pi" << q / n + 1 << q % n + 1;
  } else if (slot == S()) os << "S";
  else if (slot == r()) os << "r";
  else if (slot < 2 * n * n + 2 * n + 2) {
    const int q = slot - r() - 1;
    os << "xg" << q / n + 1 << q % n + 1;
  } else {
    const int q = slot - (2 * n * n + 2 * n + 2);
    os << (q % 2 == 0 ? "mu" : "lambda") << q / 2 + 1;
  }
  return os.str();
}

KMatrices build_K(const ZLayout& lo) {
  KMatrices K;
  K.N = lo.N;
  K.K.assign(lo.n + 1, {});
  // K^0: (u^i, x^i), (r, S), (lambda^k, mu^k)
  for (int i = 0; i < lo.n; ++i) K.K[0].push_back({lo.u(i), lo.x(i)});
  K.K[0].push_back({lo.r(), lo.S()});
  for (int k = 0; k < lo.k_lin; ++k) K.K[0].push_back({lo.lam(k), lo.mu(k)});
  // K^k: (pi_{ik}, x^i)
  for (int k = 0; k < lo.n; ++k)
    for (int i = 0; i < lo.n; ++i) K.K[k + 1].push_back({lo.pi(i, k), lo.x(i)});
  return K;
}

void KMatrices::apply(int alpha, const std::vector<double>& v,
                      std::vector<double>& out) const {
  for (const Entry& e : K[alpha]) {
    out[e.row] += v[e.col];
    out[e.col] -= v[e.row];
  }
}

std::vector<std::vector<double>> KMatrices::dense(int alpha) const {
  std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
  for (const Entry& e : K[alpha]) {
    M[e.row][e.col] = 1.0;
    M[e.col][e.row] = -1.0;
  }
  return M;
}

std::vector<std::vector<double>> oneform_coefficients(const std::vector<double>& z,
                                                      const ZLayout& lo) {
  std::vector<std::vector<double>> L(lo.n + 1, std::vector<double>(lo.N, 0.0));
  for (int i = 0; i < lo.n; ++i) L[0][lo.x(i)] = z[lo.u(i)];
  L[0][lo.S()] = z[lo.r()];
  for (int k = 0; k < lo.k_lin; ++k) L[0][lo.mu(k)] = z[lo.lam(k)];
  for (int k = 0; k < lo.n; ++k)
    for (int i = 0; i < lo.n; ++i) L[k + 1][lo.x(i)] = z[lo.pi(i, k)];
  return L;
}

namespace {

double det_block(const std::vector<double>& z, const ZLayout& lo) {
  if (lo.n == 2) {
    return z[lo.xg(0, 0)] * z[lo.xg(1, 1)] - z[lo.xg(0, 1)] * z[lo.xg(1, 0)];
  }
  const double a = z[lo.xg(0, 0)], b = z[lo.xg(0, 1)], c = z[lo.xg(0, 2)];
  const double d = z[lo.xg(1, 0)], e = z[lo.xg(1, 1)], f = z[lo.xg(1, 2)];
  const double g = z[lo.xg(2, 0)], h = z[lo.xg(2, 1)], l = z[lo.xg(2, 2)];
  return a * (e * l - f * h) - b * (d * l - f * g) + c * (d * h - e * g);
}

void cof_block(const std::vector<double>& z, const ZLayout& lo, double A[3][3]) {
  if (lo.n == 2) {
    A[0][0] = z[lo.xg(1, 1)];
    A[0][1] = -z[lo.xg(1, 0)];
    A[1][0] = -z[lo.xg(0, 1)];
    A[1][1] = z[lo.xg(0, 0)];
    return;
  }
  double x[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) x[i][j] = z[lo.xg(i, j)];
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3, b = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int p = (j + 1) % 3, q = (j + 2) % 3;
      A[i][j] = x[a][p] * x[b][q] - x[a][q] * x[b][p];
    }
  }
}

Point3 x_of(const std::vector<double>& z, const ZLayout& lo) {
  Point3 x{0, 0, 0};
  for (int i = 0; i < lo.n; ++i) x[i] = z[lo.x(i)];
  return x;
}

}  // namespace

double hamiltonian_density(const std::vector<double>& z, const ZLayout& lo,
                           const ThermoModel& thermo, const Potential& pot) {
  const double tau = det_block(z, lo);
  if (tau <= 1e-12)
    throw std::runtime_error("hamiltonian_density: singular x_{ij} block");
  double h = specific_internal_energy_tau(thermo, tau, z[lo.S()]);
  h += pot.value(x_of(z, lo));
  for (int i = 0; i < lo.n; ++i) h += 0.5 * z[lo.u(i)] * z[lo.u(i)];
  for (int i = 0; i < lo.n; ++i)
    for (int k = 0; k < lo.n; ++k) h += z[lo.pi(i, k)] * z[lo.xg(i, k)];
  return h;
}

std::vector<double> grad_h(const std::vector<double>& z, const ZLayout& lo,
                           const ThermoModel& thermo, const Potential& pot) {
  const double tau = det_block(z, lo);
  if (tau <= 1e-12) throw std::runtime_error("grad_h: singular x_{ij} block");
  const double S = z[lo.S()];
  const double p = pressure_from_tau(thermo, tau, S);  // -de/dtau
  const double T = specific_internal_energy_tau(thermo, tau, S) / thermo.c_v;
  double A[3][3];
  cof_block(z, lo, A);
  const Point3 gp = pot.grad(x_of(z, lo));

  std::vector<double> g(lo.N, 0.0);
  for (int i = 0; i < lo.n; ++i) {
    g[lo.x(i)] = gp[i];
    g[lo.u(i)] = z[lo.u(i)];
  }
  g[lo.S()] = T;
  for (int i = 0; i < lo.n; ++i)
    for (int j = 0; j < lo.n; ++j) {
      g[lo.pi(i, j)] = z[lo.xg(i, j)];
      g[lo.xg(i, j)] = z[lo.pi(i, j)] - p * A[i][j];
    }
  return g;
}

std::vector<double> ms_residual(const ZJet& jet, const KMatrices& K, const ZLayout& lo,
                                const ThermoModel& thermo, const Potential& pot) {
  if (int(jet.z.size()) != lo.N || int(jet.z_t.size()) != lo.N ||
      int(jet.z_m.size()) != lo.n)
    throw std::invalid_argument("ms_residual: jet dimensions do not match layout");
  std::vector<double> res(lo.N, 0.0);
  K.apply(0, jet.z_t, res);
  for (int k = 0; k < lo.n; ++k) K.apply(k + 1, jet.z_m[k], res);
  const std::vector<double> g = grad_h(jet.z, lo, thermo, pot);
  for (int i = 0; i < lo.N; ++i) res[i] -= g[i];
  return res;
}

JetField assemble_jets(const SimState& s, const ThermoModel& thermo,
                       const Potential& pot, const ZLayout& lo) {
  const LabelGrid& g = s.grid();
  if (lo.n != g.n) throw std::invalid_argument("assemble_jets: dimension mismatch");
  if (lo.k_lin != s.k_lin())
    throw std::invalid_argument("assemble_jets: Lin-pair count mismatch");

  const MapThermo mt = evaluate_map_thermo(s, thermo);
  const StateDeriv rhs = full_rhs(s, thermo, pot);

  // pi fields are constrained to p A exactly; their label derivatives come
  // from differentiating the constrained fields.
  TensorField pi(g);
  for (int i = 0; i < g.n; ++i)
    for (int k = 0; k < g.n; ++k) pi.comp(i, k) = hadamard(mt.p, mt.A.comp(i, k));

  std::vector<TensorField> dpi(g.n);   // dpi[k](i,j) = d pi_{ij} / dm^k
  for (int k = 0; k < g.n; ++k) {
    dpi[k] = TensorField(g);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        dpi[k].comp(i, j) = label_derivative(pi.comp(i, j), k);
  }
  std::vector<TensorField> dxg(g.n);   // dxg[k](i,j) = d x_{ij} / dm^k
  for (int k = 0; k < g.n; ++k) {
    dxg[k] = TensorField(g);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        dxg[k].comp(i, j) = label_derivative(mt.xg.comp(i, j), k);
  }
  auto deriv_all = [&](const ScalarField& f) {
    std::vector<ScalarField> d;
    for (int k = 0; k < g.n; ++k) d.push_back(label_derivative(f, k));
    return d;
  };
  const auto dS = deriv_all(s.S);
  const auto dr = deriv_all(s.r);
  std::vector<std::vector<ScalarField>> dmu, dlam;
  for (int k = 0; k < s.k_lin(); ++k) {
    dmu.push_back(deriv_all(s.mu[k]));
    dlam.push_back(deriv_all(s.lamt[k]));
  }
  std::vector<VectorField> duk;  // duk[k].comp(i) = du^i/dm^k
  for (int k = 0; k < g.n; ++k) {
    VectorField d(g);
    for (int i = 0; i < g.n; ++i) d.comp(i) = label_derivative(s.u.comp(i), k);
    duk.push_back(std::move(d));
  }
  // d pi_{ij}/dt = pdot A + p Adot with pdot from the EOS chain rule.
  const TensorField ug = vector_label_gradient(s.u);
  const TensorField Adot = cofactor_rate(mt.xg, ug);
  ScalarField Jdot(g);
  parallel_for(g.point_count(), [&](std::size_t q) {
    double s1 = 0.0;
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) s1 += mt.A.comp(i, j)[q] * ug.comp(i, j)[q];
    Jdot[q] = s1;
  });

  JetField out;
  out.layout = lo;
  out.grid = g;
  out.jets.resize(g.point_count());
  for (std::size_t q = 0; q < g.point_count(); ++q) {
    ZJet& jet = out.jets[q];
    jet.z.assign(lo.N, 0.0);
    jet.z_t.assign(lo.N, 0.0);
    jet.z_m.assign(lo.n, std::vector<double>(lo.N, 0.0));
    const double rho = 1.0 / mt.J[q];
    const double pdot = dp_drho(thermo, rho, s.S[q]) * (-rho * rho * Jdot[q]);
    for (int i = 0; i < g.n; ++i) {
      jet.z[lo.x(i)] = s.x.comp(i)[q];
      jet.z[lo.u(i)] = s.u.comp(i)[q];
      jet.z_t[lo.x(i)] = s.u.comp(i)[q];
      jet.z_t[lo.u(i)] = rhs.du.comp(i)[q];
      for (int j = 0; j < g.n; ++j) {
        jet.z[lo.pi(i, j)] = pi.comp(i, j)[q];
        jet.z[lo.xg(i, j)] = mt.xg.comp(i, j)[q];
        jet.z_t[lo.pi(i, j)] = pdot * mt.A.comp(i, j)[q] + mt.p[q] * Adot.comp(i, j)[q];
        jet.z_t[lo.xg(i, j)] = ug.comp(i, j)[q];
      }
    }
    jet.z[lo.S()] = s.S[q];
    jet.z[lo.r()] = s.r[q];
    jet.z_t[lo.S()] = 0.0;
    jet.z_t[lo.r()] = -mt.T[q];
    for (int k = 0; k < s.k_lin(); ++k) {
      jet.z[lo.mu(k)] = s.mu[k][q];
      jet.z[lo.lam(k)] = s.lamt[k][q];
    }
    for (int m = 0; m < g.n; ++m) {
      auto& zm = jet.z_m[m];
      for (int i = 0; i < g.n; ++i) {
        zm[lo.x(i)] = mt.xg.comp(i, m)[q];
        zm[lo.u(i)] = duk[m].comp(i)[q];
        for (int j = 0; j < g.n; ++j) {
          zm[lo.pi(i, j)] = dpi[m].comp(i, j)[q];
          zm[lo.xg(i, j)] = dxg[m].comp(i, j)[q];
        }
      }
      zm[lo.S()] = dS[m][q];
      zm[lo.r()] = dr[m][q];
      for (int k = 0; k < s.k_lin(); ++k) {
        zm[lo.mu(k)] = dmu[k][m][q];
        zm[lo.lam(k)] = dlam[k][m][q];
      }
    }
  }
  return out;
}

DeDonderMomenta dedonder_momenta(const SimState& s, const ThermoModel& thermo) {
  const MapThermo mt = evaluate_map_thermo(s, thermo);
  DeDonderMomenta out;
  out.pi_xt = s.u;
  out.pi_xj = TensorField(s.grid());
  for (int i = 0; i < s.grid().n; ++i)
    for (int j = 0; j < s.grid().n; ++j)
      out.pi_xj.comp(i, j) = hadamard(mt.p, mt.A.comp(i, j));
  out.pi_St = s.r;
  out.pi_mut = s.lamt;
  return out;
}

}  // namespace gas::ms
