#pragma once

#include "gas/field.hpp"

namespace gas::ref {

// Serial reference implementations of the hot grid kernels. Plain loops,
// identical arithmetic per point, so results must match the parallel
// versions bitwise. Kept for testing and for the kernel benchmark.

ScalarField label_derivative(const ScalarField& f, int axis);
TensorField cofactor(const TensorField& xg);
ScalarField jacobian(const TensorField& xg);
VectorField eulerian_gradient(const ScalarField& f, const TensorField& y);

}  // namespace gas::ref
