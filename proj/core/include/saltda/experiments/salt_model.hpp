#pragma once

#include <memory>

#include "saltda/dynamics/euler.hpp"
#include "saltda/observations/stations.hpp"
#include "saltda/random.hpp"
#include "saltda/stochastic/brownian.hpp"
#include "saltda/stochastic/noise_basis.hpp"

namespace saltda::experiments {

using fields::ScalarField;

/// The coarse SALT SPDE over one assimilation window, observed at stations.
class SaltPropagator {
public:
    using State = ScalarField;
    using Path = stochastic::PathIncrements;
    using Observation = observations::Observation;

    SaltPropagator(stochastic::NoiseBasis basis, dynamics::ModelParams params, int steps_per_window,
                   const observations::StationSet& stations, observations::ObsNoise noise);

    [[nodiscard]] State propagate(const State& parent, const Path& path) const;
    [[nodiscard]] Path fresh_path(RandomStream& rng) const;
    [[nodiscard]] Path blend(const Path& w, const Path& z, double rho) const;
    [[nodiscard]] double log_likelihood(const State& state, const Observation& y) const;

    /// Station-major (u_x, u_y) values of the state's velocity.
    [[nodiscard]] std::vector<double> observe_clean(const State& state) const;

    [[nodiscard]] const stochastic::NoiseBasis& basis() const { return basis_; }
    [[nodiscard]] const dynamics::ModelParams& params() const { return params_; }
    [[nodiscard]] int steps_per_window() const { return steps_; }
    [[nodiscard]] const observations::ObsNoise& noise() const { return noise_; }

private:
    stochastic::NoiseBasis basis_;
    dynamics::ModelParams params_;
    int steps_;
    observations::ObservationOperator h_;
    observations::ObsNoise noise_;
};

}  // namespace saltda::experiments
