#pragma once

#include <cstdint>
#include <vector>

#include "saltda/dynamics/euler.hpp"
#include "saltda/fields/grid.hpp"
#include "saltda/parallel.hpp"
#include "saltda/random.hpp"

namespace saltda::ensembles {

using fields::Grid;
using fields::ScalarField;

struct DeformationConfig {
    /// Variance of the scaling β.
    double epsilon = 0.25;
    /// Fine time steps of the linear advection.
    long n_steps = 104;
    /// Equilibrium fine vorticity fields the advecting velocity is drawn from.
    std::vector<ScalarField> snapshot_pool;

    void validate() const;
};

/// Substeps per fine step that keep |β|·max|u|·dt_sub ≤ 0.5h.
int deformation_substeps(double beta, double max_speed, double dt, double h);

/// Integrates ∂_t ω + β u·∇ω = 0 with u = ∇⊥ψ_sample frozen, for n_steps
/// fine steps of params.dt (Arakawa + SSP-RK3, no forcing or damping),
/// refining the step when β makes it CFL-unstable. Returns the fine result.
ScalarField deform_fine(const ScalarField& omega, const ScalarField& psi_sample, double beta, long n_steps,
                        const dynamics::ModelParams& params);

/// deform_fine followed by Helmholtz coarse-graining onto `coarse`.
ScalarField deform(const ScalarField& omega_truth, const ScalarField& psi_sample, double beta, long n_steps,
                   const dynamics::ModelParams& params, const Grid& coarse);

struct MemberDraw {
    int member = 0;
    double beta = 0.0;
    std::size_t pool_index = 0;
    long n_steps = 0;
    std::uint64_t seed = 0;
};

struct InitialEnsemble {
    std::vector<ScalarField> members;
    std::vector<MemberDraw> draws;
};

/// N independent deformations of `reference`: member m draws its pool index
/// uniformly and β ~ Normal(0, ε) from key.child(m).
InitialEnsemble sample_initial_ensemble(const DeformationConfig& cfg, const ScalarField& reference, int n,
                                        const StreamKey& key, const dynamics::ModelParams& fine_params,
                                        const Grid& coarse, const Executor& exec);

}  // namespace saltda::ensembles
