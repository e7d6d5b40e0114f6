#pragma once

#include <string>
#include <vector>

#include "gas/dynamics.hpp"

namespace gas::ms {

/// Slot table of the multi-symplectic state vector z. For n=3, K_lin=0 the
/// ordering is (x^1..x^3, u^1..u^3, pi_{11}..pi_{33}, S, r, x_{11}..x_{33}),
/// N=26; for n=2 the same pattern gives N=14; Lin pairs (mu^k, lambda^k)
/// append at the end. Indices are 0-based here; the paper's listing is
/// recovered by adding 1.
struct ZLayout {
  int n = 3;
  int k_lin = 0;
  int N = 26;

  static ZLayout build(int n, int k_lin);

  int x(int i) const { return i; }
  int u(int i) const { return n + i; }
  int pi(int i, int j) const { return 2 * n + i * n + j; }
  int S() const { return 2 * n + n * n; }
  int r() const { return S() + 1; }
  int xg(int i, int j) const { return r() + 1 + i * n + j; }
  int mu(int k) const { return 2 * n * n + 2 * n + 2 + 2 * k; }
  int lam(int k) const { return mu(k) + 1; }

  std::string slot_name(int slot) const;
};

/// Constant skew matrices K^0..K^n stored as the strictly-upper coordinate
/// entries (row < col would not match the paper's listing, so entries keep
/// the paper's (row, col) with value +1 and the transpose is implied).
struct KMatrices {
  struct Entry {
    int row, col;  // K^alpha_{row,col} = +1, K^alpha_{col,row} = -1
  };
  int N = 0;
  std::vector<std::vector<Entry>> K;  // K[alpha], alpha = 0..n

  /// out += K^alpha * v (applies both the listed entries and their
  /// antisymmetric partners).
  void apply(int alpha, const std::vector<double>& v, std::vector<double>& out) const;

  /// Dense row echo for tests.
  std::vector<std::vector<double>> dense(int alpha) const;
};

KMatrices build_K(const ZLayout& lo);

/// One-form coefficients L^0..L^n of omega^alpha = L^alpha_s dz^s as
/// functions of z: L^0 carries u^i at the x^i slots, r at the S slot and
/// lambda^k at the mu^k slots; L^k carries pi_{ik} at the x^i slots.
std::vector<std::vector<double>> oneform_coefficients(const std::vector<double>& z,
                                                      const ZLayout& lo);

/// h = |u|^2/2 + e(tau,S) + Phi(x) + pi_{ik} x_{ik}, tau = det(x_{ij} block).
double hamiltonian_density(const std::vector<double>& z, const ZLayout& lo,
                           const ThermoModel& thermo, const Potential& pot);

/// Componentwise partials of h: u-slots -> u, x-slots -> Phi_x, S-slot -> T,
/// pi-slots -> x_{ij}, x_{ij}-slots -> pi_{ij} - p A_{ij}, r/mu/lambda -> 0.
std::vector<double> grad_h(const std::vector<double>& z, const ZLayout& lo,
                           const ThermoModel& thermo, const Potential& pot);

/// z with its time and label derivatives at one grid point.
struct ZJet {
  std::vector<double> z;
  std::vector<double> z_t;
  std::vector<std::vector<double>> z_m;  // z_m[k][slot], k = 0..n-1
};

/// K^0 z_t + sum_k K^k z_{m^k} - grad h. With the paper's sign conventions
/// the x-rows equal momentum_rhs - du/dt.
std::vector<double> ms_residual(const ZJet& jet, const KMatrices& K, const ZLayout& lo,
                                const ThermoModel& thermo, const Potential& pot);

/// Jets at every grid point, assembled from a solved state: z_t from
/// full_rhs, z_m from label_derivative, pi constrained to p A exactly.
struct JetField {
  ZLayout layout;
  LabelGrid grid;
  std::vector<ZJet> jets;  // one per grid point
};

JetField assemble_jets(const SimState& s, const ThermoModel& thermo,
                       const Potential& pot, const ZLayout& lo);

/// de Donder-Weyl momenta of a state: pi_{kt} = u^k, pi_{kj} = p A_{kj},
/// pi_{St} = r, pi_{mu^k t} = lambda^k.
struct DeDonderMomenta {
  VectorField pi_xt;
  TensorField pi_xj;
  ScalarField pi_St;
  std::vector<ScalarField> pi_mut;
};

DeDonderMomenta dedonder_momenta(const SimState& s, const ThermoModel& thermo);

}  // namespace gas::ms
