#include "saltda/ensembles/deformation.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "saltda/errors.hpp"
#include "saltda/fields/coarse_graining.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/fields/operators.hpp"

namespace saltda::ensembles {

void DeformationConfig::validate() const {
    require_parameter(epsilon > 0.0, "deformation epsilon must be > 0");
    require_parameter(n_steps >= 0, "deformation n_steps must be >= 0");
    require_input(!snapshot_pool.empty(), "deformation snapshot pool is empty");
}

int deformation_substeps(double beta, double max_speed, double dt, double h) {
    const double courant = std::abs(beta) * max_speed * dt / (0.5 * h);
    return std::max(1, static_cast<int>(std::ceil(courant)));
}

ScalarField deform_fine(const ScalarField& omega, const ScalarField& psi_sample, double beta, long n_steps,
                        const dynamics::ModelParams& params) {
    fields::require_same_grid(omega.grid(), psi_sample.grid(), "deform");
    require_parameter(n_steps >= 0, "deform: n_steps must be >= 0");
    require_input(std::isfinite(beta), "deform: non-finite beta");
    if (beta == 0.0 || n_steps == 0) return omega;

    ScalarField advecting = beta * psi_sample;
    advecting.impose_dirichlet_zero();
    const Grid& grid = omega.grid();
    const int substeps = deformation_substeps(beta, fields::max_speed(psi_sample), params.dt, grid.spacing());
    if (substeps > 1) {
        spdlog::debug("deform: beta = {:.4f} needs {} substeps per step", beta, substeps);
    }
    dynamics::ModelParams sub = params;
    sub.dt = params.dt / substeps;
    sub.a = 0.0;
    sub.r = 0.0;
    const dynamics::StreamSolver frozen = [&advecting](const ScalarField&) { return advecting; };
    ScalarField out = omega;
    const long total = n_steps * substeps;
    for (long s = 0; s < total; ++s) {
        out = dynamics::ssprk3_step(out, sub, frozen, dynamics::Sources{false, false});
    }
    return out;
}

ScalarField deform(const ScalarField& omega_truth, const ScalarField& psi_sample, double beta, long n_steps,
                   const dynamics::ModelParams& params, const Grid& coarse) {
    return fields::coarse_grain_vorticity(deform_fine(omega_truth, psi_sample, beta, n_steps, params), coarse);
}

InitialEnsemble sample_initial_ensemble(const DeformationConfig& cfg, const ScalarField& reference, int n,
                                        const StreamKey& key, const dynamics::ModelParams& fine_params,
                                        const Grid& coarse, const Executor& exec) {
    cfg.validate();
    require_parameter(n >= 1, "initial ensemble size must be >= 1");
    const auto count = static_cast<std::size_t>(n);

    std::vector<ScalarField> pool_streams;
    pool_streams.reserve(cfg.snapshot_pool.size());
    for (const ScalarField& w : cfg.snapshot_pool) {
        fields::require_same_grid(reference.grid(), w.grid(), "deformation pool");
        pool_streams.push_back(fields::poisson_solve(w));
    }

    InitialEnsemble out;
    out.draws.resize(count);
    for (std::size_t m = 0; m < count; ++m) {
        const StreamKey member_key = key.child(StreamPurpose::Deformation).child(m);
        RandomStream rng(member_key);
        MemberDraw& d = out.draws[m];
        d.member = static_cast<int>(m);
        d.pool_index = rng.index(cfg.snapshot_pool.size());
        d.beta = rng.normal(0.0, std::sqrt(cfg.epsilon));
        d.n_steps = cfg.n_steps;
        d.seed = member_key.digest();
    }

    std::vector<ScalarField> members(count, ScalarField(coarse, fields::BoundaryCondition::Free));
    exec.for_each(count, [&](std::size_t m) {
        const MemberDraw& d = out.draws[m];
        members[m] = deform(reference, pool_streams[d.pool_index], d.beta, d.n_steps, fine_params, coarse);
    });
    out.members = std::move(members);
    return out;
}

}  // namespace saltda::ensembles
