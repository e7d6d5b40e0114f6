// Kernel benchmark: OpenMP grid kernels against the serial reference
// implementations on a 3D grid.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "gas/geometry.hpp"
#include "gas/par.hpp"
#include "gas/reference.hpp"

using namespace gas;

namespace {

template <class F>
double time_ms(int iters, F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / iters;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap_from_env();
  int npts = 48;
  int iters = 20;
  if (argc > 1) npts = std::atoi(argv[1]);
  if (argc > 2) iters = std::atoi(argv[2]);

  const LabelGrid g = LabelGrid::unit_box(3, npts, 4);
  VectorField disp(g);
  for (int c = 0; c < 3; ++c)
    disp.comp(c) = ScalarField::sample(g, [c](const std::array<double, 3>& m) {
      return 0.03 * std::sin(2 * M_PI * (m[0] + 0.5 * m[(c + 1) % 3]));
    });
  const TensorField xg = deformation_gradient(disp);
  const ScalarField f = ScalarField::sample(g, [](const std::array<double, 3>& m) {
    return std::sin(2 * M_PI * m[0]) * std::cos(2 * M_PI * m[1]) +
           std::sin(2 * M_PI * m[2]);
  });
  const ScalarField J = jacobian(xg);
  const TensorField y = inverse_gradient(xg, J);

  std::printf("grid %d^3 (%zu points), %d threads, %d iterations per kernel\n", npts,
              g.point_count(), worker_threads(), iters);
  std::printf("%-20s %12s %12s %8s\n", "kernel", "serial[ms]", "parallel[ms]",
              "speedup");

  struct Row {
    const char* name;
    double ts, tp;
  };
  Row rows[] = {
      {"label_derivative",
       time_ms(iters, [&] { ref::label_derivative(f, 0); }),
       time_ms(iters, [&] { label_derivative(f, 0); })},
      {"cofactor", time_ms(iters, [&] { ref::cofactor(xg); }),
       time_ms(iters, [&] { cofactor(xg); })},
      {"jacobian", time_ms(iters, [&] { ref::jacobian(xg); }),
       time_ms(iters, [&] { jacobian(xg); })},
      {"eulerian_gradient",
       time_ms(iters, [&] { ref::eulerian_gradient(f, y); }),
       time_ms(iters, [&] { eulerian_gradient(f, y); })},
  };
  for (const Row& r : rows)
    std::printf("%-20s %12.3f %12.3f %8.2f\n", r.name, r.ts, r.tp, r.ts / r.tp);

  // Consistency: the parallel kernels must reproduce the serial reference
  // bitwise (each point is an independent map).
  const ScalarField d1 = label_derivative(f, 1);
  const ScalarField d2 = ref::label_derivative(f, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i)
    worst = std::max(worst, std::fabs(d1[i] - d2[i]));
  std::printf("parallel vs serial max difference: %.1e\n", worst);
  return worst == 0.0 ? 0 : 1;
}
