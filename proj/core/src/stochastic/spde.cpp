#include "saltda/stochastic/spde.hpp"

#include <algorithm>

#include "saltda/errors.hpp"
#include "saltda/fields/elliptic.hpp"

namespace saltda::stochastic {

ScalarField spde_step(const ScalarField& q, std::span<const double> dW, const NoiseBasis& basis,
                      const ModelParams& params) {
    fields::require_same_grid(q.grid(), basis.grid(), "spde_step");
    require_input(static_cast<int>(dW.size()) == basis.modes(), "spde_step: increment count differs from mode count");
    if (std::all_of(dW.begin(), dW.end(), [](double w) { return w == 0.0; })) {
        return dynamics::ssprk3_step(q, params);
    }
    std::vector<double> rates(dW.begin(), dW.end());
    for (double& r : rates) r /= params.dt;
    const ScalarField noise_stream = basis.combine(rates);
    return dynamics::ssprk3_step(q, params, [&noise_stream](const ScalarField& w) {
        ScalarField psi = fields::poisson_solve(w);
        psi += noise_stream;
        return psi;
    });
}

ScalarField propagate_window(const ScalarField& parent, const PathIncrements& path, const NoiseBasis& basis,
                             const ModelParams& params) {
    require_input(path.n_sub >= 1, "propagate_window: path needs at least one substep");
    require_input(path.m == basis.modes(), "propagate_window: path mode count differs from basis");
    ScalarField state = parent;
    std::vector<double> column(static_cast<std::size_t>(path.m));
    for (int j = 0; j < path.n_sub; ++j) {
        for (int i = 0; i < path.m; ++i) column[i] = path(i, j);
        state = spde_step(state, column, basis, params);
    }
    return state;
}

}  // namespace saltda::stochastic
