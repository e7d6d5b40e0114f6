#pragma once

#include <map>
#include <vector>

#include "gas/forms/expr.hpp"

namespace gas::forms {

/// Exterior form over the joint coordinates: degree-k terms indexed by a
/// strictly increasing coordinate multi-index. Insertion sorts indices with
/// parity bookkeeping, drops repeated indices and cancels structurally equal
/// coefficients; the remainder is evaluated numerically.
class Form {
 public:
  explicit Form(int degree = 0) : degree_(degree) {}

  int degree() const { return degree_; }
  const std::map<std::vector<int>, Expr>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Adds coeff * dz_{idx[0]} ^ ... ^ dz_{idx[k-1]} (any index order).
  void add_term(std::vector<int> idx, Expr coeff);

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);

 private:
  int degree_;
  std::map<std::vector<int>, Expr> terms_;
};

Form wedge(const Form& a, const Form& b);
Form exterior_derivative(const Form& a, const FiberContext& ctx);
/// Interior product v . a for a vector with (sparse) Expr components.
Form contraction(const std::map<int, Expr>& v, const Form& a);
Form scale(const Form& a, const Expr& c);
Form negate(const Form& a);

/// Evaluates the form on `degree` tangent vectors at a point of the joint
/// space (vectors indexed by coordinate).
double eval_on(const Form& a, const FiberContext& ctx, const std::vector<double>& pt,
               const std::vector<std::vector<double>>& vecs);

/// 0-form holding a single scalar expression.
Form scalar_form(const Expr& e);

}  // namespace gas::forms
