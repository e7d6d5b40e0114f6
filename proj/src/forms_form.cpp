#include "gas/forms/form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gas::forms {

void Form::add_term(std::vector<int> idx, Expr coeff) {
  if (int(idx.size()) != degree_)
    throw std::invalid_argument("Form::add_term: wrong index count");
  if (is_zero(coeff)) return;
  // Insertion sort with parity; repeated indices kill the term.
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && idx[j - 1] > idx[j]) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
      --j;
    }
    if (j > 0 && idx[j - 1] == idx[j]) return;
  }
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return;
  if (sign < 0) coeff = neg(coeff);
  auto it = terms_.find(idx);
  if (it == terms_.end()) {
    terms_.emplace(std::move(idx), std::move(coeff));
  } else {
    Expr merged = add(it->second, coeff);
    if (is_zero(merged))
      terms_.erase(it);
    else
      it->second = std::move(merged);
  }
}

Form& Form::operator+=(const Form& o) {
  if (o.degree_ != degree_) throw std::invalid_argument("form degree mismatch");
  for (const auto& [idx, c] : o.terms_) add_term(idx, c);
  return *this;
}

Form& Form::operator-=(const Form& o) {
  if (o.degree_ != degree_) throw std::invalid_argument("form degree mismatch");
  for (const auto& [idx, c] : o.terms_) add_term(idx, neg(c));
  return *this;
}

Form wedge(const Form& a, const Form& b) {
  Form out(a.degree() + b.degree());
  for (const auto& [ia, ca] : a.terms())
    for (const auto& [ib, cb] : b.terms()) {
      std::vector<int> idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add_term(std::move(idx), mul(ca, cb));
    }
  return out;
}

Form exterior_derivative(const Form& a, const FiberContext& ctx) {
  Form out(a.degree() + 1);
  for (const auto& [idx, c] : a.terms()) {
    for (int q = 0; q < ctx.coords(); ++q) {
      const Expr dc = diff(c, q, ctx);
      if (is_zero(dc)) continue;
      std::vector<int> nidx;
      nidx.reserve(idx.size() + 1);
      nidx.push_back(q);
      nidx.insert(nidx.end(), idx.begin(), idx.end());
      out.add_term(std::move(nidx), dc);
    }
  }
  return out;
}

Form contraction(const std::map<int, Expr>& v, const Form& a) {
  if (a.degree() == 0)
    throw std::invalid_argument("contraction: cannot contract a 0-form");
  Form out(a.degree() - 1);
  for (const auto& [idx, c] : a.terms()) {
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      auto it = v.find(idx[pos]);
      if (it == v.end() || is_zero(it->second)) continue;
      std::vector<int> nidx;
      nidx.reserve(idx.size() - 1);
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (j != pos) nidx.push_back(idx[j]);
      Expr coeff = mul(c, it->second);
      if (pos % 2 == 1) coeff = neg(coeff);
      out.add_term(std::move(nidx), std::move(coeff));
    }
  }
  return out;
}

Form scale(const Form& a, const Expr& c) {
  Form out(a.degree());
  for (const auto& [idx, cc] : a.terms()) out.add_term(idx, mul(c, cc));
  return out;
}

Form negate(const Form& a) {
  Form out(a.degree());
  for (const auto& [idx, cc] : a.terms()) out.add_term(idx, neg(cc));
  return out;
}

namespace {

double det_small(std::vector<std::vector<double>> m) {
  const std::size_t k = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < k; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace

double eval_on(const Form& a, const FiberContext& ctx, const std::vector<double>& pt,
               const std::vector<std::vector<double>>& vecs) {
  if (int(vecs.size()) != a.degree())
    throw std::invalid_argument("eval_on: need one vector per form degree");
  if (a.degree() == 0) {
    double s = 0.0;
    for (const auto& [idx, c] : a.terms()) s += eval(c, ctx, pt);
    return s;
  }
  double total = 0.0;
  const std::size_t k = vecs.size();
  std::vector<std::vector<double>> M(k, std::vector<double>(k));
  for (const auto& [idx, c] : a.terms()) {
    for (std::size_t row = 0; row < k; ++row)
      for (std::size_t col = 0; col < k; ++col) M[row][col] = vecs[col][idx[row]];
    total += eval(c, ctx, pt) * det_small(M);
  }
  return total;
}

Form scalar_form(const Expr& e) {
  Form f(0);
  f.add_term({}, e);
  return f;
}

}  // namespace gas::forms
