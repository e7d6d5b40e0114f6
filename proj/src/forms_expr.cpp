#include "gas/forms/expr.hpp"

#include <cmath>
#include <stdexcept>

namespace gas::forms {

namespace {
Expr unary(EK k, Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->k = k;
  n->a = std::move(a);
  return n;
}
}  // namespace

Expr cst(double v) {
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Const;
  n->c = v;
  return n;
}

Expr coord(int c) {
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Coord;
  n->coord = c;
  return n;
}

bool is_zero(const Expr& e) { return e->k == EK::Const && e->c == 0.0; }
bool is_const(const Expr& e, double v) { return e->k == EK::Const && e->c == v; }

Expr add(Expr a, Expr b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  if (a->k == EK::Const && b->k == EK::Const) return cst(a->c + b->c);
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Add;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr sub(Expr a, Expr b) {
  if (is_zero(b)) return a;
  if (a->k == EK::Const && b->k == EK::Const) return cst(a->c - b->c);
  if (same(a, b)) return cst(0.0);
  if (is_zero(a)) return neg(std::move(b));
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Sub;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr mul(Expr a, Expr b) {
  if (is_zero(a) || is_zero(b)) return cst(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->k == EK::Const && b->k == EK::Const) return cst(a->c * b->c);
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Mul;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr divide(Expr a, Expr b) {
  if (is_zero(a)) return cst(0.0);
  if (is_const(b, 1.0)) return a;
  if (a->k == EK::Const && b->k == EK::Const) return cst(a->c / b->c);
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expr neg(Expr a) {
  if (a->k == EK::Const) return cst(-a->c);
  if (a->k == EK::Neg) return a->a;
  return unary(EK::Neg, std::move(a));
}

Expr powi(Expr a, int p) {
  if (p == 0) return cst(1.0);
  if (p == 1) return a;
  if (a->k == EK::Const) return cst(std::pow(a->c, p));
  auto n = std::make_shared<ExprNode>();
  n->k = EK::PowInt;
  n->ipow = p;
  n->a = std::move(a);
  return n;
}

Expr expe(Expr a) {
  if (a->k == EK::Const) return cst(std::exp(a->c));
  return unary(EK::Exp, std::move(a));
}

Expr loge(Expr a) { return unary(EK::Log, std::move(a)); }

Expr tau_prim() {
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Tau;
  return n;
}

Expr pressure_prim() {
  auto n = std::make_shared<ExprNode>();
  n->k = EK::Pressure;
  return n;
}

bool same(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->k != b->k) return false;
  switch (a->k) {
    case EK::Const: return a->c == b->c;
    case EK::Coord: return a->coord == b->coord;
    case EK::PowInt: return a->ipow == b->ipow && same(a->a, b->a);
    case EK::Tau:
    case EK::Pressure:
      return true;
    case EK::Neg:
    case EK::Exp:
    case EK::Log:
      return same(a->a, b->a);
    default:
      return same(a->a, b->a) && same(a->b, b->b);
  }
}

namespace {

double tau_value(const FiberContext& ctx, const std::vector<double>& pt) {
  const auto& lo = ctx.layout;
  auto z = [&](int i, int j) { return pt[ctx.fiber(lo.xg(i, j))]; };
  if (ctx.n == 2) return z(0, 0) * z(1, 1) - z(0, 1) * z(1, 0);
  return z(0, 0) * (z(1, 1) * z(2, 2) - z(1, 2) * z(2, 1)) -
         z(0, 1) * (z(1, 0) * z(2, 2) - z(1, 2) * z(2, 0)) +
         z(0, 2) * (z(1, 0) * z(2, 1) - z(1, 1) * z(2, 0));
}

}  // namespace

double eval(const Expr& e, const FiberContext& ctx, const std::vector<double>& pt) {
  switch (e->k) {
    case EK::Const: return e->c;
    case EK::Coord: return pt[e->coord];
    case EK::Add: return eval(e->a, ctx, pt) + eval(e->b, ctx, pt);
    case EK::Sub: return eval(e->a, ctx, pt) - eval(e->b, ctx, pt);
    case EK::Mul: return eval(e->a, ctx, pt) * eval(e->b, ctx, pt);
    case EK::Div: return eval(e->a, ctx, pt) / eval(e->b, ctx, pt);
    case EK::Neg: return -eval(e->a, ctx, pt);
    case EK::PowInt: return std::pow(eval(e->a, ctx, pt), e->ipow);
    case EK::Exp: return std::exp(eval(e->a, ctx, pt));
    case EK::Log: return std::log(eval(e->a, ctx, pt));
    case EK::Tau: return tau_value(ctx, pt);
    case EK::Pressure:
      return pressure_from_tau(ctx.thermo, tau_value(ctx, pt),
                               pt[ctx.fiber(ctx.layout.S())]);
  }
  throw std::logic_error("forms eval");
}

Expr cofactor_expr(const FiberContext& ctx, int i, int j) {
  const auto& lo = ctx.layout;
  auto z = [&](int a, int b) { return coord(ctx.fiber(lo.xg(a, b))); };
  if (ctx.n == 2) {
    if (i == 0 && j == 0) return z(1, 1);
    if (i == 0 && j == 1) return neg(z(1, 0));
    if (i == 1 && j == 0) return neg(z(0, 1));
    return z(0, 0);
  }
  const int a = (i + 1) % 3, b = (i + 2) % 3;
  const int p = (j + 1) % 3, q = (j + 2) % 3;
  return sub(mul(z(a, p), z(b, q)), mul(z(a, q), z(b, p)));
}

Expr diff(const Expr& e, int c, const FiberContext& ctx) {
  switch (e->k) {
    case EK::Const: return cst(0.0);
    case EK::Coord: return cst(e->coord == c ? 1.0 : 0.0);
    case EK::Add: return add(diff(e->a, c, ctx), diff(e->b, c, ctx));
    case EK::Sub: return sub(diff(e->a, c, ctx), diff(e->b, c, ctx));
    case EK::Mul:
      return add(mul(diff(e->a, c, ctx), e->b), mul(e->a, diff(e->b, c, ctx)));
    case EK::Div:
      return sub(divide(diff(e->a, c, ctx), e->b),
                 divide(mul(e->a, diff(e->b, c, ctx)), mul(e->b, e->b)));
    case EK::Neg: return neg(diff(e->a, c, ctx));
    case EK::PowInt:
      return mul(mul(cst(double(e->ipow)), powi(e->a, e->ipow - 1)),
                 diff(e->a, c, ctx));
    case EK::Exp: return mul(expe(e->a), diff(e->a, c, ctx));
    case EK::Log: return divide(diff(e->a, c, ctx), e->a);
    case EK::Tau: {
      // dtau/dx_{ij} = A_{ij}; no other coordinate enters.
      if (!ctx.is_fiber(c)) return cst(0.0);
      const int slot = ctx.slot_of(c);
      const auto& lo = ctx.layout;
      for (int i = 0; i < ctx.n; ++i)
        for (int j = 0; j < ctx.n; ++j)
          if (slot == lo.xg(i, j)) return cofactor_expr(ctx, i, j);
      return cst(0.0);
    }
    case EK::Pressure: {
      // p = A0 exp(S/c_v) tau^-gamma: dp/dS = p/c_v,
      // dp/dx_{ij} = -gamma (p/tau) A_{ij}.
      if (!ctx.is_fiber(c)) return cst(0.0);
      const int slot = ctx.slot_of(c);
      const auto& lo = ctx.layout;
      if (slot == lo.S()) return divide(pressure_prim(), cst(ctx.thermo.c_v));
      for (int i = 0; i < ctx.n; ++i)
        for (int j = 0; j < ctx.n; ++j)
          if (slot == lo.xg(i, j))
            return mul(cst(-ctx.thermo.gamma),
                       mul(divide(pressure_prim(), tau_prim()),
                           cofactor_expr(ctx, i, j)));
      return cst(0.0);
    }
  }
  throw std::logic_error("forms diff");
}

}  // namespace gas::forms
