#pragma once

#include <memory>
#include <vector>

#include "gas/multisymplectic.hpp"
#include "gas/thermo.hpp"

namespace gas::forms {

/// Coordinates of the joint space: base (t, m^1..m^n) then fiber (z^1..z^N),
/// with the Lin-free layout of the forms ideal.
struct FiberContext {
  ms::ZLayout layout;
  ThermoModel thermo;
  int n = 0;

  static FiberContext make(int n, const ThermoModel& th) {
    FiberContext c;
    c.n = n;
    c.layout = ms::ZLayout::build(n, 0);
    c.thermo = th;
    return c;
  }
  int coords() const { return n + 1 + layout.N; }
  int base_t() const { return 0; }
  int base_m(int k) const { return 1 + k; }  // k = 0..n-1
  int fiber(int slot) const { return n + 1 + slot; }
  bool is_fiber(int coord) const { return coord > n; }
  int slot_of(int coord) const { return coord - n - 1; }
};

// Expression trees over the joint coordinates: constants, coordinates,
// arithmetic, integer powers, exp/log, and the registered thermodynamic
// primitives tau(z) = det(x_{ij} block) and p(z) = EOS pressure at
// (1/tau, S), whose partials are closed-form expressions again.
enum class EK { Const, Coord, Add, Sub, Mul, Div, Neg, PowInt, Exp, Log, Tau, Pressure };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  EK k;
  double c = 0.0;
  int coord = -1;
  int ipow = 0;
  Expr a, b;
};

Expr cst(double v);
Expr coord(int c);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr divide(Expr a, Expr b);
Expr neg(Expr a);
Expr powi(Expr a, int p);
Expr expe(Expr a);
Expr loge(Expr a);
Expr tau_prim();
Expr pressure_prim();

bool is_zero(const Expr& e);
bool is_const(const Expr& e, double v);
/// Structural equality (same tree), used for term cancellation.
bool same(const Expr& a, const Expr& b);

double eval(const Expr& e, const FiberContext& ctx, const std::vector<double>& pt);
Expr diff(const Expr& e, int coord, const FiberContext& ctx);

/// Cofactor A_{i}{j} of the x_{ij}-slot coordinates as a polynomial.
Expr cofactor_expr(const FiberContext& ctx, int i, int j);

}  // namespace gas::forms
