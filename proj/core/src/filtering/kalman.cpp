#include "saltda/filtering/kalman.hpp"

#include "saltda/errors.hpp"

namespace saltda::filtering {

void LinearGaussianModel::validate() const {
    require_parameter(Q >= 0.0 && std::isfinite(Q), "linear-Gaussian model: Q must be non-negative");
    require_parameter(R > 0.0 && std::isfinite(R), "linear-Gaussian model: R must be positive");
    require_parameter(P0 > 0.0 && std::isfinite(P0), "linear-Gaussian model: P0 must be positive");
    require_parameter(std::isfinite(A) && std::isfinite(H) && std::isfinite(m0),
                      "linear-Gaussian model: non-finite coefficient");
}

Gaussian1D kalman_update(const LinearGaussianModel& model, Gaussian1D prior, double y, double phi) {
    require_parameter(prior.variance > 0.0, "kalman_update: prior variance must be positive");
    require_parameter(phi >= 0.0, "kalman_update: phi must be non-negative");
    // Tempering by φ is an update with observation variance R/φ.
    const double precision = 1.0 / prior.variance + phi * model.H * model.H / model.R;
    const double variance = 1.0 / precision;
    const double mean = variance * (prior.mean / prior.variance + phi * model.H * y / model.R);
    return {mean, variance};
}

std::vector<Gaussian1D> kalman_filter(const LinearGaussianModel& model, const std::vector<double>& observations) {
    model.validate();
    std::vector<Gaussian1D> out;
    out.reserve(observations.size());
    Gaussian1D state{model.m0, model.P0};
    for (double y : observations) {
        const Gaussian1D predicted{model.A * state.mean, model.A * model.A * state.variance + model.Q};
        const double s = model.H * model.H * predicted.variance + model.R;
        const double gain = predicted.variance * model.H / s;
        state.mean = predicted.mean + gain * (y - model.H * predicted.mean);
        state.variance = (1.0 - gain * model.H) * predicted.variance;
        out.push_back(state);
    }
    return out;
}

LinearGaussianRun simulate_linear_gaussian(const LinearGaussianModel& model, int steps, RandomStream& rng) {
    model.validate();
    require_parameter(steps >= 0, "simulate_linear_gaussian: negative step count");
    LinearGaussianRun run;
    double x = rng.normal(model.m0, std::sqrt(model.P0));
    for (int k = 0; k < steps; ++k) {
        x = model.A * x + std::sqrt(model.Q) * rng.normal();
        run.truth.push_back(x);
        run.observations.push_back(model.H * x + std::sqrt(model.R) * rng.normal());
    }
    return run;
}

}  // namespace saltda::filtering
