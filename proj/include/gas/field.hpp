#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gas/grid.hpp"
#include "gas/par.hpp"

namespace gas {

/// One scalar value per grid point. Value-semantic: carries its own copy of
/// the (small) grid descriptor.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const LabelGrid& g, double fill = 0.0)
      : grid_(g), v_(g.point_count(), fill) {}

  static ScalarField sample(const LabelGrid& g,
                            const std::function<double(const std::array<double, 3>&)>& f) {
    ScalarField out(g);
    parallel_for(g.point_count(), [&](std::size_t i) { out.v_[i] = f(g.label(i)); });
    return out;
  }

  const LabelGrid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  ScalarField& operator+=(const ScalarField& o) {
    check(o);
    parallel_for(v_.size(), [&](std::size_t i) { v_[i] += o.v_[i]; });
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check(o);
    parallel_for(v_.size(), [&](std::size_t i) { v_[i] -= o.v_[i]; });
    return *this;
  }
  ScalarField& operator*=(double c) {
    parallel_for(v_.size(), [&](std::size_t i) { v_[i] *= c; });
    return *this;
  }
  /// this += c * o
  ScalarField& axpy(double c, const ScalarField& o) {
    check(o);
    parallel_for(v_.size(), [&](std::size_t i) { v_[i] += c * o.v_[i]; });
    return *this;
  }

  // Reductions run serially so output does not depend on the thread count.
  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::fabs(x));
    return m;
  }
  double sum() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s;
  }
  double mean() const { return v_.empty() ? 0.0 : sum() / double(v_.size()); }
  /// Volume-weighted L2 norm: sqrt(sum v^2 * prod(dm)).
  double l2() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return std::sqrt(s * grid_.cell_volume());
  }
  double min() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_) m = std::min(m, x);
    return m;
  }
  double max() const {
    double m = v_.empty() ? 0.0 : v_[0];
    for (double x : v_) m = std::max(m, x);
    return m;
  }

 private:
  void check(const ScalarField& o) const {
    if (grid_ != o.grid_) throw std::invalid_argument("field grid mismatch");
  }
  LabelGrid grid_;
  std::vector<double> v_;
};

/// n-component vector per grid point, stored as one ScalarField per component.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const LabelGrid& g, double fill = 0.0) : grid_(g) {
    comps_.reserve(g.n);
    for (int c = 0; c < g.n; ++c) comps_.emplace_back(g, fill);
  }

  static VectorField sample(
      const LabelGrid& g,
      const std::vector<std::function<double(const std::array<double, 3>&)>>& fns) {
    if (int(fns.size()) != g.n) throw std::invalid_argument("component count mismatch");
    VectorField out(g);
    for (int c = 0; c < g.n; ++c) out.comps_[c] = ScalarField::sample(g, fns[c]);
    return out;
  }

  const LabelGrid& grid() const { return grid_; }
  int ncomp() const { return int(comps_.size()); }
  ScalarField& comp(int c) { return comps_[c]; }
  const ScalarField& comp(int c) const { return comps_[c]; }

  VectorField& operator+=(const VectorField& o) {
    for (int c = 0; c < ncomp(); ++c) comps_[c] += o.comps_[c];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (int c = 0; c < ncomp(); ++c) comps_[c] -= o.comps_[c];
    return *this;
  }
  VectorField& operator*=(double a) {
    for (auto& c : comps_) c *= a;
    return *this;
  }
  VectorField& axpy(double a, const VectorField& o) {
    for (int c = 0; c < ncomp(); ++c) comps_[c].axpy(a, o.comps_[c]);
    return *this;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, c.max_abs());
    return m;
  }

 private:
  LabelGrid grid_;
  std::vector<ScalarField> comps_;
};

/// n x n tensor per grid point; comp(i,j) is row i, column j.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const LabelGrid& g, double fill = 0.0) : grid_(g) {
    comps_.reserve(std::size_t(g.n) * g.n);
    for (int c = 0; c < g.n * g.n; ++c) comps_.emplace_back(g, fill);
  }

  static TensorField identity(const LabelGrid& g) {
    TensorField t(g);
    for (int i = 0; i < g.n; ++i) {
      auto& d = t.comp(i, i);
      parallel_for(g.point_count(), [&](std::size_t k) { d[k] = 1.0; });
    }
    return t;
  }

  const LabelGrid& grid() const { return grid_; }
  int dim() const { return grid_.n; }
  ScalarField& comp(int i, int j) { return comps_[std::size_t(i) * grid_.n + j]; }
  const ScalarField& comp(int i, int j) const {
    return comps_[std::size_t(i) * grid_.n + j];
  }

 private:
  LabelGrid grid_;
  std::vector<ScalarField> comps_;
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(double c, ScalarField a) { return a *= c; }

/// Pointwise product.
inline ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  parallel_for(a.size(), [&](std::size_t i) { out[i] = a[i] * b[i]; });
  return out;
}

inline ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField out(a.grid());
  const int n = a.ncomp();
  parallel_for(out.size(), [&](std::size_t i) {
    double s = 0.0;
    for (int c = 0; c < n; ++c) s += a.comp(c)[i] * b.comp(c)[i];
    out[i] = s;
  });
  return out;
}

}  // namespace gas
