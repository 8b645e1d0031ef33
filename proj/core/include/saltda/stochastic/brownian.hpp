#pragma once

#include <span>
#include <vector>

#include "saltda/random.hpp"

namespace saltda::stochastic {

/// Brownian increments for m modes over n_sub substeps, stored mode-major:
/// dW[i * n_sub + j] is the increment of mode i over substep j.
struct PathIncrements {
    int m = 0;
    int n_sub = 0;
    std::vector<double> dW;

    PathIncrements() = default;
    PathIncrements(int modes, int substeps);

    [[nodiscard]] double operator()(int mode, int substep) const {
        return dW[static_cast<std::size_t>(mode) * n_sub + substep];
    }
    double& operator()(int mode, int substep) { return dW[static_cast<std::size_t>(mode) * n_sub + substep]; }
    /// The m increments driving one substep.
    [[nodiscard]] std::vector<double> column(int substep) const;

    friend bool operator==(const PathIncrements&, const PathIncrements&) = default;
};

/// i.i.d. Normal(0, dt) increments.
PathIncrements brownian_increments(RandomStream& rng, int m, int n_sub, double dt);

/// ρW + √(1-ρ²) Z, entrywise. ρ = 1 returns W exactly.
PathIncrements blend_paths(const PathIncrements& w, const PathIncrements& z, double rho);

}  // namespace saltda::stochastic
