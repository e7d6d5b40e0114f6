#include "gas/reference.hpp"

namespace gas::ref {

ScalarField label_derivative(const ScalarField& f, int axis) {
  const LabelGrid& g = f.grid();
  if (axis < 0 || axis >= g.n)
    throw std::invalid_argument("label_derivative: axis out of range");
  ScalarField out(g);
  const std::size_t st = g.stride(axis);
  const int size = g.sizes[axis];
  const double inv = 1.0 / g.dm[axis];
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    const int c = int((i / st) % std::size_t(size));
    auto wrap = [&](int s) {
      int cc = c + s;
      if (cc < 0) cc += size;
      if (cc >= size) cc -= size;
      return i + std::size_t(cc - c) * st;
    };
    if (g.fd_order == 2) {
      out[i] = 0.5 * inv * (f[wrap(1)] - f[wrap(-1)]);
    } else {
      out[i] = inv / 12.0 *
               (-f[wrap(2)] + 8.0 * f[wrap(1)] - 8.0 * f[wrap(-1)] + f[wrap(-2)]);
    }
  }
  return out;
}

TensorField cofactor(const TensorField& xg) {
  const LabelGrid& g = xg.grid();
  TensorField A(g);
  for (std::size_t k = 0; k < g.point_count(); ++k) {
    if (g.n == 2) {
      A.comp(0, 0)[k] = xg.comp(1, 1)[k];
      A.comp(0, 1)[k] = -xg.comp(1, 0)[k];
      A.comp(1, 0)[k] = -xg.comp(0, 1)[k];
      A.comp(1, 1)[k] = xg.comp(0, 0)[k];
    } else {
      double x[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) x[i][j] = xg.comp(i, j)[k];
      for (int i = 0; i < 3; ++i) {
        const int a = (i + 1) % 3, b = (i + 2) % 3;
        for (int j = 0; j < 3; ++j) {
          const int p = (j + 1) % 3, q = (j + 2) % 3;
          A.comp(i, j)[k] = x[a][p] * x[b][q] - x[a][q] * x[b][p];
        }
      }
    }
  }
  return A;
}

ScalarField jacobian(const TensorField& xg) {
  const LabelGrid& g = xg.grid();
  ScalarField J(g);
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    if (g.n == 2) {
      J[i] = xg.comp(0, 0)[i] * xg.comp(1, 1)[i] - xg.comp(0, 1)[i] * xg.comp(1, 0)[i];
    } else {
      const double a = xg.comp(0, 0)[i], b = xg.comp(0, 1)[i], c = xg.comp(0, 2)[i];
      const double d = xg.comp(1, 0)[i], e = xg.comp(1, 1)[i], f = xg.comp(1, 2)[i];
      const double h = xg.comp(2, 0)[i], k = xg.comp(2, 1)[i], l = xg.comp(2, 2)[i];
      J[i] = a * (e * l - f * k) - b * (d * l - f * h) + c * (d * k - e * h);
    }
  }
  return J;
}

VectorField eulerian_gradient(const ScalarField& f, const TensorField& y) {
  const LabelGrid& g = f.grid();
  VectorField out(g);
  for (int j = 0; j < g.n; ++j) {
    const ScalarField fj = label_derivative(f, j);
    for (int k = 0; k < g.n; ++k)
      for (std::size_t i = 0; i < g.point_count(); ++i)
        out.comp(k)[i] += y.comp(j, k)[i] * fj[i];
  }
  return out;
}

}  // namespace gas::ref
