#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "gas/geometry.hpp"
#include "gas/reference.hpp"

using namespace gas;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

ScalarField sine_field(const LabelGrid& g, int axis) {
  return ScalarField::sample(g, [axis](const std::array<double, 3>& m) {
    return std::sin(kTwoPi * m[axis]);
  });
}

TensorField random_tensor(const LabelGrid& g, unsigned seed, double amp = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  TensorField t(g);
  for (std::size_t q = 0; q < g.point_count(); ++q)
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) t.comp(i, j)[q] = (i == j ? 1.0 : 0.0) + u(rng);
  return t;
}

VectorField smooth_displacement(const LabelGrid& g, double amp) {
  VectorField d(g);
  for (int c = 0; c < g.n; ++c)
    d.comp(c) = ScalarField::sample(g, [c, amp](const std::array<double, 3>& m) {
      return amp * std::sin(kTwoPi * m[c]) * std::cos(kTwoPi * m[(c + 1) % 2]);
    });
  return d;
}

}  // namespace

TEST_CASE("label_derivative against the analytic derivative of sin") {
  // Order-4 stencil on sin(2 pi m): the symbol error at 64 points is
  // 2pi - (8 sin t - sin 2t)/(6 dm) with t = 2pi/64, about 2.2e-5.
  for (int axis : {0, 1}) {
    const LabelGrid g = LabelGrid::unit_box(2, 64, 4);
    const ScalarField d = label_derivative(sine_field(g, axis), axis);
    double err = 0.0;
    for (std::size_t q = 0; q < g.point_count(); ++q)
      err = std::max(err, std::fabs(d[q] - kTwoPi * std::cos(kTwoPi * g.label(q)[axis])));
    CHECK(err < 3e-5);
    CHECK(err > 1.5e-5);  // the oracle is sharp, not just an upper bound
  }
  // 256 points: the error drops by 4^4.
  const LabelGrid g = LabelGrid::unit_box(2, 256, 4);
  const ScalarField d = label_derivative(sine_field(g, 0), 0);
  double err = 0.0;
  for (std::size_t q = 0; q < g.point_count(); ++q)
    err = std::max(err, std::fabs(d[q] - kTwoPi * std::cos(kTwoPi * g.label(q)[0])));
  CHECK(err < 1e-6);
}

TEST_CASE("label_derivative: constants, truncation order, errors") {
  const LabelGrid g = LabelGrid::unit_box(2, 32, 2);
  CHECK(label_derivative(ScalarField(g, 3.25), 0).max_abs() == 0.0);
  auto err_at = [](int npts) {
    const LabelGrid gg = LabelGrid::unit_box(2, npts, 2);
    const ScalarField d = label_derivative(sine_field(gg, 1), 1);
    double err = 0.0;
    for (std::size_t q = 0; q < gg.point_count(); ++q)
      err = std::max(err,
                     std::fabs(d[q] - kTwoPi * std::cos(kTwoPi * gg.label(q)[1])));
    return err;
  };
  CHECK(err_at(32) / err_at(64) == doctest::Approx(4.0).epsilon(0.25));
  CHECK_THROWS_AS(label_derivative(ScalarField(g), 2), std::invalid_argument);
}

TEST_CASE("deformation gradient of the identity map is exactly the identity") {
  const LabelGrid g = LabelGrid::unit_box(2, 16, 4);
  const TensorField xg = deformation_gradient(VectorField(g));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (std::size_t q = 0; q < g.point_count(); ++q)
        CHECK(xg.comp(i, j)[q] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("deformation gradient converges at fd_order on a smooth map") {
  auto err_at = [](int npts) {
    const LabelGrid g = LabelGrid::unit_box(2, npts, 4);
    const double a = 0.05;
    VectorField disp(g);
    disp.comp(0) = ScalarField::sample(g, [a](const std::array<double, 3>& m) {
      return a * std::sin(kTwoPi * m[0]) * std::cos(kTwoPi * m[1]);
    });
    const TensorField xg = deformation_gradient(disp);
    double err = 0.0;
    for (std::size_t q = 0; q < g.point_count(); ++q) {
      const auto m = g.label(q);
      const double ex00 =
          1.0 + a * kTwoPi * std::cos(kTwoPi * m[0]) * std::cos(kTwoPi * m[1]);
      const double ex01 = -a * kTwoPi * std::sin(kTwoPi * m[0]) * std::sin(kTwoPi * m[1]);
      err = std::max({err, std::fabs(xg.comp(0, 0)[q] - ex00),
                      std::fabs(xg.comp(0, 1)[q] - ex01)});
    }
    return err;
  };
  const double order = std::log2(err_at(16) / err_at(32));
  CHECK(order > 3.6);
  CHECK(order < 4.4);
}

TEST_CASE("jacobian: identity, dilation, cofactor contraction") {
  const LabelGrid g2 = LabelGrid::unit_box(2, 8, 4);
  TensorField two_i(g2);
  for (int i = 0; i < 2; ++i)
    for (std::size_t q = 0; q < g2.point_count(); ++q) two_i.comp(i, i)[q] = 2.0;
  const ScalarField J = jacobian(two_i);
  CHECK(J.min() == 4.0);
  CHECK(J.max() == 4.0);
  CHECK(jacobian(TensorField::identity(g2)).max_abs() == 1.0);
  // J = A_{ij} x_{ij} / n on random tensors.
  for (int n : {2, 3}) {
    const LabelGrid g = LabelGrid::unit_box(n, 8, 4);
    const TensorField xg = random_tensor(g, 7u + n);
    const TensorField A = cofactor(xg);
    const ScalarField Jr = jacobian(xg);
    for (std::size_t q = 0; q < g.point_count(); ++q) {
      double tr = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr += A.comp(i, j)[q] * xg.comp(i, j)[q];
      CHECK(std::fabs(tr / n - Jr[q]) < 1e-12);
    }
  }
}

TEST_CASE("cofactor identities") {
  const LabelGrid g2 = LabelGrid::unit_box(2, 8, 4);
  // Shear [[1,k],[0,1]] -> A = [[1,0],[-k,1]].
  const double k = 0.7;
  TensorField shear(g2);
  for (std::size_t q = 0; q < g2.point_count(); ++q) {
    shear.comp(0, 0)[q] = 1.0;
    shear.comp(0, 1)[q] = k;
    shear.comp(1, 1)[q] = 1.0;
  }
  const TensorField As = cofactor(shear);
  for (std::size_t q = 0; q < g2.point_count(); ++q) {
    CHECK(As.comp(0, 0)[q] == 1.0);
    CHECK(As.comp(0, 1)[q] == 0.0);
    CHECK(As.comp(1, 0)[q] == -k);
    CHECK(As.comp(1, 1)[q] == 1.0);
  }
  const LabelGrid g3 = LabelGrid::unit_box(3, 8, 4);
  const TensorField A3 = cofactor(TensorField::identity(g3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(A3.comp(i, j)[0] == (i == j ? 1.0 : 0.0));
  // A_{ij} x_{kj} = J delta_{ik} to 1e-12 on random tensors (pure algebra).
  for (int n : {2, 3}) {
    const LabelGrid g = LabelGrid::unit_box(n, 8, 4);
    const TensorField xg = random_tensor(g, 21u + n);
    const TensorField A = cofactor(xg);
    const ScalarField J = jacobian(xg);
    for (std::size_t q = 0; q < g.point_count(); ++q)
      for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < n; ++kk) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += A.comp(i, j)[q] * xg.comp(kk, j)[q];
          CHECK(std::fabs(s - (i == kk ? J[q] : 0.0)) < 1e-12);
        }
  }
}

TEST_CASE("cofactor_rate matches finite differences of the cofactor") {
  for (int n : {2, 3}) {
    const LabelGrid g = LabelGrid::unit_box(n, 8, 4);
    const TensorField xg = random_tensor(g, 3u + n);
    const TensorField v = random_tensor(g, 17u + n, 0.2);
    const double h = 1e-6;
    TensorField xp = xg, xm = xg;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        xp.comp(i, j).axpy(h, v.comp(i, j));
        xm.comp(i, j).axpy(-h, v.comp(i, j));
      }
    const TensorField Ap = cofactor(xp), Am = cofactor(xm);
    const TensorField At = cofactor_rate(xg, v);
    for (std::size_t q = 0; q < g.point_count(); ++q)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double fd = (Ap.comp(i, j)[q] - Am.comp(i, j)[q]) / (2 * h);
          CHECK(std::fabs(fd - At.comp(i, j)[q]) < 1e-8);
        }
  }
}

TEST_CASE("piola divergence vanishes at the discretization order") {
  const LabelGrid g = LabelGrid::unit_box(2, 16, 4);
  CHECK(piola_divergence(cofactor(TensorField::identity(g))).max_abs() == 0.0);
  for (int order : {2, 4}) {
    auto err_at = [order](int npts) {
      const LabelGrid gg = LabelGrid::unit_box(2, npts, order);
      const TensorField xg = deformation_gradient(smooth_displacement(gg, 0.05));
      return piola_divergence(cofactor(xg)).max_abs();
    };
    const double ratio = err_at(16) / err_at(32);
    CHECK(ratio > std::pow(2.0, order) * 0.75);
    CHECK(ratio < std::pow(2.0, order) * 1.25);
  }
}

TEST_CASE("inverse gradient") {
  for (int n : {2, 3}) {
    const LabelGrid g = LabelGrid::unit_box(n, 8, 4);
    const TensorField xg = random_tensor(g, 4u + n);
    const ScalarField J = jacobian(xg);
    const TensorField y = inverse_gradient(xg, J);
    for (std::size_t q = 0; q < g.point_count(); ++q)
      for (int i = 0; i < n; ++i)
        for (int kk = 0; kk < n; ++kk) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += xg.comp(i, j)[q] * y.comp(j, kk)[q];
          CHECK(std::fabs(s - (i == kk ? 1.0 : 0.0)) < 1e-12);
        }
  }
  const LabelGrid g = LabelGrid::unit_box(2, 8, 4);
  TensorField two_i(g);
  for (int i = 0; i < 2; ++i)
    for (std::size_t q = 0; q < g.point_count(); ++q) two_i.comp(i, i)[q] = 2.0;
  const TensorField y = inverse_gradient(two_i, jacobian(two_i));
  CHECK(y.comp(0, 0)[0] == 0.5);
  CHECK(y.comp(0, 1)[0] == 0.0);
  ScalarField Jbad = jacobian(two_i);
  Jbad[5] = 0.0;
  CHECK_THROWS_WITH_AS(inverse_gradient(two_i, Jbad), doctest::Contains("point 5"),
                       std::runtime_error);
}

TEST_CASE("eulerian gradient through the map") {
  // f = x^1 as a field: gradient is (1, 0) up to FD error of the map. x^1 is
  // not periodic, so the identity column is added analytically, exactly as
  // the displacement convention prescribes.
  const LabelGrid g = LabelGrid::unit_box(2, 32, 4);
  const VectorField disp = smooth_displacement(g, 0.04);
  const TensorField xg = deformation_gradient(disp);
  const TensorField y = inverse_gradient(xg, jacobian(xg));
  const ScalarField d0 = label_derivative(disp.comp(0), 0);
  const ScalarField d1 = label_derivative(disp.comp(0), 1);
  for (std::size_t q = 0; q < g.point_count(); ++q) {
    const double gx = y.comp(0, 0)[q] * (1.0 + d0[q]) + y.comp(1, 0)[q] * d1[q];
    const double gy = y.comp(0, 1)[q] * (1.0 + d0[q]) + y.comp(1, 1)[q] * d1[q];
    CHECK(std::fabs(gx - 1.0) < 1e-10);
    CHECK(std::fabs(gy) < 1e-10);
  }
  CHECK(eulerian_gradient(ScalarField(g, 2.0), y).max_abs() == 0.0);
  auto err_at = [](int npts) {
    const LabelGrid gg = LabelGrid::unit_box(2, npts, 4);
    const TensorField II = TensorField::identity(gg);
    const TensorField yy = inverse_gradient(II, jacobian(II));
    const ScalarField ff = ScalarField::sample(gg, [](const std::array<double, 3>& m) {
      return std::sin(kTwoPi * m[0]) * std::cos(kTwoPi * m[1]);
    });
    const VectorField gr = eulerian_gradient(ff, yy);
    double err = 0.0;
    for (std::size_t q = 0; q < gg.point_count(); ++q) {
      const auto m = gg.label(q);
      err = std::max(err, std::fabs(gr.comp(0)[q] - kTwoPi * std::cos(kTwoPi * m[0]) *
                                                        std::cos(kTwoPi * m[1])));
    }
    return err;
  };
  CHECK(std::log2(err_at(16) / err_at(32)) > 3.6);
}

TEST_CASE("base vectors and the cross identity") {
  const LabelGrid g = LabelGrid::unit_box(3, 8, 4);
  const TensorField xg = random_tensor(g, 11);
  const ScalarField J = jacobian(xg);
  const TensorField y = inverse_gradient(xg, J);
  TensorField e_lo, e_up;
  base_vectors(xg, y, e_lo, e_up);
  // e_a x e_b = J eps_{abc} e^c at every point, pure algebra.
  for (std::size_t q = 0; q < g.point_count(); ++q) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const int c = 3 - a - b;
        const double eps = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
        double cross[3];
        cross[0] = e_lo.comp(a, 1)[q] * e_lo.comp(b, 2)[q] -
                   e_lo.comp(a, 2)[q] * e_lo.comp(b, 1)[q];
        cross[1] = e_lo.comp(a, 2)[q] * e_lo.comp(b, 0)[q] -
                   e_lo.comp(a, 0)[q] * e_lo.comp(b, 2)[q];
        cross[2] = e_lo.comp(a, 0)[q] * e_lo.comp(b, 1)[q] -
                   e_lo.comp(a, 1)[q] * e_lo.comp(b, 0)[q];
        for (int i = 0; i < 3; ++i)
          CHECK(std::fabs(cross[i] - J[q] * eps * e_up.comp(c, i)[q]) < 1e-12);
      }
  }
  TensorField e1, e2;
  const TensorField I3 = TensorField::identity(g);
  base_vectors(I3, inverse_gradient(I3, jacobian(I3)), e1, e2);
  CHECK(e1.comp(0, 0)[0] == 1.0);
  CHECK(e2.comp(2, 2)[0] == 1.0);
}

TEST_CASE("curl: uniform, rigid rotation, gradient field") {
  const LabelGrid g = LabelGrid::unit_box(3, 16, 4);
  const TensorField I = TensorField::identity(g);
  const TensorField y = inverse_gradient(I, jacobian(I));
  CHECK(curl3(VectorField(g, 0.7), y).max_abs() == 0.0);
  // Rigid rotation u = Omega0 x x on the identity map: the centered stencils
  // are exact on linear fields away from the periodic wrap, where the curl
  // equals 2 Omega0.
  const Point3 Om{0.3, -0.2, 0.5};
  VectorField u(g);
  for (std::size_t q = 0; q < g.point_count(); ++q) {
    const auto m = g.label(q);
    u.comp(0)[q] = Om[1] * m[2] - Om[2] * m[1];
    u.comp(1)[q] = Om[2] * m[0] - Om[0] * m[2];
    u.comp(2)[q] = Om[0] * m[1] - Om[1] * m[0];
  }
  const VectorField w = curl3(u, y);
  for (std::size_t q = 0; q < g.point_count(); ++q) {
    const auto c = g.coords(q);
    bool interior = true;
    for (int a = 0; a < 3; ++a) interior = interior && c[a] >= 2 && c[a] < g.sizes[a] - 2;
    if (!interior) continue;
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(w.comp(i)[q] - 2.0 * Om[i]) < 1e-12);
  }
  // Gradient fields are curl-free at the discretization order.
  auto graderr = [](int npts) {
    const LabelGrid gg = LabelGrid::unit_box(3, npts, 4);
    const TensorField II = TensorField::identity(gg);
    const TensorField yy = inverse_gradient(II, jacobian(II));
    const ScalarField phi = ScalarField::sample(gg, [](const std::array<double, 3>& m) {
      return std::sin(kTwoPi * m[0]) * std::cos(kTwoPi * m[1]) * std::sin(kTwoPi * m[2]);
    });
    return curl3(eulerian_gradient(phi, yy), yy).max_abs();
  };
  CHECK(std::log2(graderr(8) / graderr(16)) > 3.5);
  // n=2 scalar curl of a known field.
  const LabelGrid g2 = LabelGrid::unit_box(2, 64, 4);
  const TensorField I2 = TensorField::identity(g2);
  const TensorField y2 = inverse_gradient(I2, jacobian(I2));
  VectorField u2(g2);
  u2.comp(0) = ScalarField::sample(
      g2, [](const std::array<double, 3>& m) { return std::cos(kTwoPi * m[1]); });
  u2.comp(1) = ScalarField::sample(
      g2, [](const std::array<double, 3>& m) { return std::sin(kTwoPi * m[0]); });
  const ScalarField wz = curl2(u2, y2);
  double err = 0.0;
  for (std::size_t q = 0; q < g2.point_count(); ++q) {
    const auto m = g2.label(q);
    const double exact =
        kTwoPi * std::cos(kTwoPi * m[0]) + kTwoPi * std::sin(kTwoPi * m[1]);
    err = std::max(err, std::fabs(wz[q] - exact));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("singular_count reports near-singular points") {
  const LabelGrid g = LabelGrid::unit_box(2, 8, 4);
  ScalarField J(g, 1.0);
  CHECK(singular_count(J) == 0);
  J[3] = 0.0;
  J[9] = -2.0;
  CHECK(singular_count(J) == 2);
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
  const LabelGrid g = LabelGrid::unit_box(3, 12, 4);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (std::size_t q = 0; q < g.point_count(); ++q) f[q] = u(rng);
  const TensorField xg = random_tensor(g, 42);
  const ScalarField J = jacobian(xg);
  const TensorField y = inverse_gradient(xg, J);

  for (int axis = 0; axis < 3; ++axis) {
    const ScalarField a = label_derivative(f, axis);
    const ScalarField b = ref::label_derivative(f, axis);
    for (std::size_t q = 0; q < g.point_count(); ++q) CHECK(a[q] == b[q]);
  }
  const TensorField A1 = cofactor(xg), A2 = ref::cofactor(xg);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (std::size_t q = 0; q < g.point_count(); ++q)
        CHECK(A1.comp(i, j)[q] == A2.comp(i, j)[q]);
  const ScalarField J2 = ref::jacobian(xg);
  for (std::size_t q = 0; q < g.point_count(); ++q) CHECK(J[q] == J2[q]);
  const VectorField g1 = eulerian_gradient(f, y), g2 = ref::eulerian_gradient(f, y);
  for (int c = 0; c < 3; ++c)
    for (std::size_t q = 0; q < g.point_count(); ++q)
      CHECK(g1.comp(c)[q] == g2.comp(c)[q]);
}
