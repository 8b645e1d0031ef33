#include "saltda/experiments/salt_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saltda/errors.hpp"
#include "saltda/stochastic/spde.hpp"

namespace saltda::experiments {

SaltPropagator::SaltPropagator(stochastic::NoiseBasis basis, dynamics::ModelParams params, int steps_per_window,
                               const observations::StationSet& stations, observations::ObsNoise noise)
    : basis_(std::move(basis)),
      params_(params),
      steps_(steps_per_window),
      h_(basis_.grid(), stations),
      noise_(std::move(noise)) {
    params_.validate();
    require_parameter(steps_ >= 1, "SaltPropagator: need at least one step per window");
    noise_.validate(stations.observation_size());
}

ScalarField SaltPropagator::propagate(const State& parent, const Path& path) const {
    return stochastic::propagate_window(parent, path, basis_, params_);
}

stochastic::PathIncrements SaltPropagator::fresh_path(RandomStream& rng) const {
    if (basis_.modes() == 0) return Path(0, steps_);
    return stochastic::brownian_increments(rng, basis_.modes(), steps_, params_.dt);
}

stochastic::PathIncrements SaltPropagator::blend(const Path& w, const Path& z, double rho) const {
    return stochastic::blend_paths(w, z, rho);
}

double SaltPropagator::log_likelihood(const State& state, const Observation& y) const {
    const std::vector<double> predicted = h_.apply_vorticity(state);
    if (!std::all_of(predicted.begin(), predicted.end(), [](double v) { return std::isfinite(v); })) {
        return -std::numeric_limits<double>::infinity();
    }
    return observations::log_likelihood(predicted, y, noise_);
}

std::vector<double> SaltPropagator::observe_clean(const State& state) const { return h_.apply_vorticity(state); }

}  // namespace saltda::experiments
