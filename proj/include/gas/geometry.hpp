#pragma once

#include "gas/field.hpp"

namespace gas {

/// Centered periodic finite difference d/dm^axis of the chosen grid order
/// (2: (f_{k+1}-f_{k-1})/2dm, 4: (-f_{k+2}+8f_{k+1}-8f_{k-1}+f_{k-2})/12dm).
ScalarField label_derivative(const ScalarField& f, int axis);

/// Label gradient of a vector field: out(i,j) = dv^i/dm^j.
TensorField vector_label_gradient(const VectorField& v);

/// Deformation gradient x_{ij} = dx^i/dm^j of the map x = m + displacement.
/// Takes the periodic displacement so the non-periodic identity part is
/// handled exactly: x_{ij} = delta_{ij} + d(disp^i)/dm^j.
TensorField deformation_gradient(const VectorField& displacement);

/// Pointwise determinant of a square tensor field.
ScalarField jacobian(const TensorField& xg);

/// Number of points where J <= tol (near-singular map).
std::size_t singular_count(const ScalarField& J, double tol = 1e-12);

/// Pointwise cofactor matrix A of xg; satisfies A_{ij} x_{kj} = J delta_{ik}.
TensorField cofactor(const TensorField& xg);

/// d/dt of the cofactor given xg and the label gradient of the velocity
/// ug(i,j) = du^i/dm^j (uses d(x_{ij})/dt = du^i/dm^j).
TensorField cofactor_rate(const TensorField& xg, const TensorField& ug);

/// Discrete dA_{ij}/dm^j; analytically zero, discretely O(dm^fd_order).
VectorField piola_divergence(const TensorField& A);

/// Inverse map gradient y_{ij} = dm^i/dx^j = A_{ji}/J. Throws when any point
/// has J <= 1e-12, listing the first offending indices.
TensorField inverse_gradient(const TensorField& xg, const ScalarField& J);

/// Eulerian gradient (df/dx^k) = y_{jk} df/dm^j.
VectorField eulerian_gradient(const ScalarField& f, const TensorField& y);

/// Eulerian Jacobian of a vector field: out(i,j) = dw^j/dx^i.
TensorField eulerian_jacobian(const VectorField& w, const TensorField& y);

/// Holonomic base vectors: e_lo row a = e_a = dx/dm^a (components x_{ia}),
/// e_up row a = e^a = dm^a/dx (components y_{ai}).
void base_vectors(const TensorField& xg, const TensorField& y, TensorField& e_lo,
                  TensorField& e_up);

/// Eulerian curl for n=3 (vector) and n=2 (scalar omega^z = du^y/dx - du^x/dy).
VectorField curl3(const VectorField& u, const TensorField& y);
ScalarField curl2(const VectorField& u, const TensorField& y);

/// Pointwise cross products of vector fields.
VectorField cross3(const VectorField& a, const VectorField& b);
ScalarField cross2_z(const VectorField& a, const VectorField& b);

}  // namespace gas
