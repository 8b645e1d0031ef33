#pragma once

#include "saltda/fields/grid.hpp"

namespace saltda::fields {

/// Nodal subsampling onto a coarser grid whose cell count divides the fine one.
ScalarField restrict_to(const ScalarField& fine, const Grid& coarse);

/// Helmholtz-filtered stream function H Δ⁻¹ω on the fine grid, with k the
/// filter wavenumber (conventionally the coarse cell count).
ScalarField filtered_stream(const ScalarField& fine_vorticity, double k);

/// Coarse-grained vorticity on the coarse grid: the filtered stream function
/// is restricted to the coarse grid and its coarse 5-point Laplacian forms the
/// interior values; boundary values are the restricted fine vorticity.
/// poisson_solve of the result reproduces the restricted filtered stream function.
ScalarField coarse_grain_vorticity(const ScalarField& fine_vorticity, const Grid& coarse);

/// Velocity of the filtered stream function on the fine grid.
VectorField filtered_velocity(const ScalarField& fine_vorticity, const Grid& coarse);

/// Velocity of a vorticity field on its own grid (Poisson solve + perp_grad).
VectorField velocity_of(const ScalarField& vorticity);

}  // namespace saltda::fields
