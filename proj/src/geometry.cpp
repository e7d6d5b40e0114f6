#include "gas/geometry.hpp"

#include <cmath>
#include <sstream>

namespace gas {

ScalarField label_derivative(const ScalarField& f, int axis) {
  const LabelGrid& g = f.grid();
  if (axis < 0 || axis >= g.n)
    throw std::invalid_argument("label_derivative: axis out of range");
  ScalarField out(g);
  const std::size_t st = g.stride(axis);
  const int size = g.sizes[axis];
  const double inv = 1.0 / g.dm[axis];
  if (g.fd_order == 2) {
    parallel_for(g.point_count(), [&](std::size_t i) {
      const int c = int((i / st) % std::size_t(size));
      const std::size_t ip = i + std::size_t((c + 1 == size ? 1 - size : 1)) * st;
      const std::size_t im = i + std::size_t((c == 0 ? size - 1 : -1)) * st;
      out[i] = 0.5 * inv * (f[ip] - f[im]);
    });
  } else {
    parallel_for(g.point_count(), [&](std::size_t i) {
      const int c = int((i / st) % std::size_t(size));
      auto wrap = [&](int s) {
        int cc = c + s;
        if (cc < 0) cc += size;
        if (cc >= size) cc -= size;
        return i + std::size_t(cc - c) * st;
      };
      out[i] = inv / 12.0 *
               (-f[wrap(2)] + 8.0 * f[wrap(1)] - 8.0 * f[wrap(-1)] + f[wrap(-2)]);
    });
  }
  return out;
}

TensorField vector_label_gradient(const VectorField& v) {
  const LabelGrid& g = v.grid();
  TensorField out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) out.comp(i, j) = label_derivative(v.comp(i), j);
  return out;
}

TensorField deformation_gradient(const VectorField& displacement) {
  const LabelGrid& g = displacement.grid();
  TensorField xg = vector_label_gradient(displacement);
  for (int i = 0; i < g.n; ++i) {
    auto& d = xg.comp(i, i);
    parallel_for(g.point_count(), [&](std::size_t k) { d[k] += 1.0; });
  }
  return xg;
}

ScalarField jacobian(const TensorField& xg) {
  const LabelGrid& g = xg.grid();
  ScalarField J(g);
  if (g.n == 2) {
    const auto &a00 = xg.comp(0, 0), &a01 = xg.comp(0, 1), &a10 = xg.comp(1, 0),
               &a11 = xg.comp(1, 1);
    parallel_for(g.point_count(), [&](std::size_t i) {
      J[i] = a00[i] * a11[i] - a01[i] * a10[i];
    });
  } else {
    parallel_for(g.point_count(), [&](std::size_t i) {
      const double a = xg.comp(0, 0)[i], b = xg.comp(0, 1)[i], c = xg.comp(0, 2)[i];
      const double d = xg.comp(1, 0)[i], e = xg.comp(1, 1)[i], f = xg.comp(1, 2)[i];
      const double h = xg.comp(2, 0)[i], k = xg.comp(2, 1)[i], l = xg.comp(2, 2)[i];
      J[i] = a * (e * l - f * k) - b * (d * l - f * h) + c * (d * k - e * h);
    });
  }
  return J;
}

std::size_t singular_count(const ScalarField& J, double tol) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < J.size(); ++i)
    if (J[i] <= tol) ++count;
  return count;
}

TensorField cofactor(const TensorField& xg) {
  const LabelGrid& g = xg.grid();
  TensorField A(g);
  if (g.n == 2) {
    // A = [[x22, -x21], [-x12, x11]]
    const auto &x11 = xg.comp(0, 0), &x12 = xg.comp(0, 1), &x21 = xg.comp(1, 0),
               &x22 = xg.comp(1, 1);
    parallel_for(g.point_count(), [&](std::size_t i) {
      A.comp(0, 0)[i] = x22[i];
      A.comp(0, 1)[i] = -x21[i];
      A.comp(1, 0)[i] = -x12[i];
      A.comp(1, 1)[i] = x11[i];
    });
  } else {
    // A_{ij} = (1/2) eps_{iab} eps_{jpq} x_{ap} x_{bq}
    parallel_for(g.point_count(), [&](std::size_t k) {
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
    });
  }
  return A;
}

TensorField cofactor_rate(const TensorField& xg, const TensorField& ug) {
  const LabelGrid& g = xg.grid();
  TensorField At(g);
  if (g.n == 2) {
    parallel_for(g.point_count(), [&](std::size_t i) {
      At.comp(0, 0)[i] = ug.comp(1, 1)[i];
      At.comp(0, 1)[i] = -ug.comp(1, 0)[i];
      At.comp(1, 0)[i] = -ug.comp(0, 1)[i];
      At.comp(1, 1)[i] = ug.comp(0, 0)[i];
    });
  } else {
    parallel_for(g.point_count(), [&](std::size_t k) {
      double x[3][3], v[3][3];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          x[i][j] = xg.comp(i, j)[k];
          v[i][j] = ug.comp(i, j)[k];
        }
      for (int i = 0; i < 3; ++i) {
        const int a = (i + 1) % 3, b = (i + 2) % 3;
        for (int j = 0; j < 3; ++j) {
          const int p = (j + 1) % 3, q = (j + 2) % 3;
          At.comp(i, j)[k] = v[a][p] * x[b][q] - v[a][q] * x[b][p] +
                             x[a][p] * v[b][q] - x[a][q] * v[b][p];
        }
      }
    });
  }
  return At;
}

VectorField piola_divergence(const TensorField& A) {
  const LabelGrid& g = A.grid();
  VectorField out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) out.comp(i) += label_derivative(A.comp(i, j), j);
  return out;
}

TensorField inverse_gradient(const TensorField& xg, const ScalarField& J) {
  const LabelGrid& g = xg.grid();
  for (std::size_t i = 0; i < J.size(); ++i) {
    if (J[i] <= 1e-12) {
      std::ostringstream os;
      os << "inverse_gradient: singular map, J=" << J[i] << " at point " << i
         << " (coords";
      auto c = g.coords(i);
      for (int a = 0; a < g.n; ++a) os << ' ' << c[a];
      os << ')';
      throw std::runtime_error(os.str());
    }
  }
  const TensorField A = cofactor(xg);
  TensorField y(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      auto& out = y.comp(i, j);
      const auto& Aji = A.comp(j, i);
      parallel_for(g.point_count(), [&](std::size_t k) { out[k] = Aji[k] / J[k]; });
    }
  return y;
}

VectorField eulerian_gradient(const ScalarField& f, const TensorField& y) {
  const LabelGrid& g = f.grid();
  VectorField out(g);
  for (int j = 0; j < g.n; ++j) {
    const ScalarField fj = label_derivative(f, j);
    for (int k = 0; k < g.n; ++k) {
      auto& o = out.comp(k);
      const auto& yjk = y.comp(j, k);
      parallel_for(g.point_count(), [&](std::size_t i) { o[i] += yjk[i] * fj[i]; });
    }
  }
  return out;
}

TensorField eulerian_jacobian(const VectorField& w, const TensorField& y) {
  const LabelGrid& g = w.grid();
  TensorField out(g);
  for (int j = 0; j < g.n; ++j) {
    const VectorField gj = eulerian_gradient(w.comp(j), y);
    for (int i = 0; i < g.n; ++i) out.comp(i, j) = gj.comp(i);
  }
  return out;
}

void base_vectors(const TensorField& xg, const TensorField& y, TensorField& e_lo,
                  TensorField& e_up) {
  const LabelGrid& g = xg.grid();
  e_lo = TensorField(g);
  e_up = TensorField(g);
  for (int a = 0; a < g.n; ++a)
    for (int i = 0; i < g.n; ++i) {
      e_lo.comp(a, i) = xg.comp(i, a);  // (e_a)_i = x_{ia}
      e_up.comp(a, i) = y.comp(a, i);   // (e^a)_i = y_{ai}
    }
}

VectorField curl3(const VectorField& u, const TensorField& y) {
  const LabelGrid& g = u.grid();
  if (g.n != 3) throw std::invalid_argument("curl3 requires n=3");
  const TensorField du = eulerian_jacobian(u, y);  // du(i,j) = du^j/dx^i
  VectorField w(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    w.comp(0)[i] = du.comp(1, 2)[i] - du.comp(2, 1)[i];
    w.comp(1)[i] = du.comp(2, 0)[i] - du.comp(0, 2)[i];
    w.comp(2)[i] = du.comp(0, 1)[i] - du.comp(1, 0)[i];
  });
  return w;
}

ScalarField curl2(const VectorField& u, const TensorField& y) {
  const LabelGrid& g = u.grid();
  if (g.n != 2) throw std::invalid_argument("curl2 requires n=2");
  const TensorField du = eulerian_jacobian(u, y);
  ScalarField w(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    w[i] = du.comp(0, 1)[i] - du.comp(1, 0)[i];  // du^y/dx - du^x/dy
  });
  return w;
}

VectorField cross3(const VectorField& a, const VectorField& b) {
  const LabelGrid& g = a.grid();
  if (g.n != 3) throw std::invalid_argument("cross3 requires n=3");
  VectorField out(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    out.comp(0)[i] = a.comp(1)[i] * b.comp(2)[i] - a.comp(2)[i] * b.comp(1)[i];
    out.comp(1)[i] = a.comp(2)[i] * b.comp(0)[i] - a.comp(0)[i] * b.comp(2)[i];
    out.comp(2)[i] = a.comp(0)[i] * b.comp(1)[i] - a.comp(1)[i] * b.comp(0)[i];
  });
  return out;
}

ScalarField cross2_z(const VectorField& a, const VectorField& b) {
  const LabelGrid& g = a.grid();
  ScalarField out(g);
  parallel_for(g.point_count(), [&](std::size_t i) {
    out[i] = a.comp(0)[i] * b.comp(1)[i] - a.comp(1)[i] * b.comp(0)[i];
  });
  return out;
}

}  // namespace gas
