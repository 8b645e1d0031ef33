#pragma once

#include "saltda/fields/grid.hpp"

namespace saltda::fields {

/// Solves the 5-point discrete Poisson problem Δ_h ψ = f at interior nodes
/// with ψ = 0 on the boundary. Boundary values of f are ignored.
///
/// Both this solve and helmholtz_inverse diagonalise the operator in the
/// discrete sine basis (DST-I in each direction), so the result is exact up
/// to round-off.
ScalarField poisson_solve(const ScalarField& f);

/// Returns g with (I - Δ_h / k²) g = f at interior nodes and g = 0 on the boundary.
ScalarField helmholtz_inverse(const ScalarField& f, double k);

/// 5-point Laplacian at interior nodes; boundary nodes are set to zero.
ScalarField discrete_laplacian(const ScalarField& f);

/// Coefficients of the interior values in the orthogonal sine basis
/// sin(pπx) sin(qπy), p,q = 1..n-1, stored row-major with q outer.
/// Normalised so that a pure (p,q) mode of unit amplitude has coefficient 1.
std::vector<double> sine_coefficients(const ScalarField& f);

}  // namespace saltda::fields
