#pragma once

#include <span>
#include <vector>

#include "saltda/dynamics/euler.hpp"
#include "saltda/stochastic/brownian.hpp"
#include "saltda/stochastic/noise_basis.hpp"

namespace saltda::stochastic {

using dynamics::ModelParams;

/// One SSP-RK3 step of the SALT vorticity equation. The transport stream
/// function is ψ̃(q) + Σ ζ_i dW_i/dt: ψ̃ is recomputed on every stage while the
/// noise part stays frozen across the step. All-zero increments reproduce
/// dynamics::ssprk3_step bit for bit.
ScalarField spde_step(const ScalarField& q, std::span<const double> dW, const NoiseBasis& basis,
                      const ModelParams& params);

/// Composition of path.n_sub spde_steps, substep j driven by column j.
ScalarField propagate_window(const ScalarField& parent, const PathIncrements& path, const NoiseBasis& basis,
                             const ModelParams& params);

}  // namespace saltda::stochastic
