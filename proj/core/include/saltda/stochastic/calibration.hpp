#pragma once

#include <vector>

#include "saltda/dynamics/euler.hpp"
#include "saltda/stochastic/noise_basis.hpp"

namespace saltda::stochastic {

struct EofResult {
    NoiseBasis basis;
    /// Every nonzero covariance eigenvalue, descending.
    std::vector<double> eigenvalues;
    double total_variance = 0.0;
    double explained_fraction = 0.0;
};

/// Principal components of residual stream functions about their mean.
/// Keeps the smallest m whose cumulative explained variance reaches
/// `fraction`, scaling unit-norm eigenvector i by √(λ_i / dt).
EofResult eof_basis_from_residuals(const std::vector<ScalarField>& residual_streams, double fraction, double dt);

/// One-step residual EOF calibration. Consecutive fine vorticity snapshots
/// spaced by one coarse step are coarse-grained; the residual between the
/// coarse-grained state at t + dt and one deterministic coarse step from the
/// coarse-grained state at t is converted to a stream function and fed to
/// eof_basis_from_residuals.
EofResult calibrate_xi_detailed(const std::vector<ScalarField>& fine_snapshots, const Grid& coarse,
                                const dynamics::ModelParams& coarse_params, double fraction);

NoiseBasis calibrate_xi(const std::vector<ScalarField>& fine_snapshots, const Grid& coarse,
                        const dynamics::ModelParams& coarse_params, double fraction);

}  // namespace saltda::stochastic
