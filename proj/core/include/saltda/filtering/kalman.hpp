#pragma once

#include <cmath>
#include <vector>

#include "saltda/random.hpp"

namespace saltda::filtering {

/// Scalar linear-Gaussian state-space model
///   x_k = A x_{k-1} + N(0, Q),   y_k = H x_k + N(0, R),   x_0 ~ N(m0, P0).
struct LinearGaussianModel {
    double A = 1.0;
    double Q = 1.0;
    double H = 1.0;
    double R = 1.0;
    double m0 = 0.0;
    double P0 = 1.0;

    void validate() const;
};

struct Gaussian1D {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact predict/update recursion; entry k is the filtering law after y_{k+1}.
std::vector<Gaussian1D> kalman_filter(const LinearGaussianModel& model, const std::vector<double>& observations);

/// Single update of a N(mean, variance) prior by y with weight φ on the
/// likelihood, i.e. the tempered posterior ∝ prior · p(y|x)^φ.
Gaussian1D kalman_update(const LinearGaussianModel& model, Gaussian1D prior, double y, double phi = 1.0);

struct LinearGaussianRun {
    std::vector<double> truth;
    std::vector<double> observations;
};

LinearGaussianRun simulate_linear_gaussian(const LinearGaussianModel& model, int steps, RandomStream& rng);

/// Adapter exposing the model to the particle filter. Paths are single
/// standard normal draws.
struct LinearGaussianPropagator {
    using State = double;
    using Path = double;
    using Observation = double;

    LinearGaussianModel model;

    [[nodiscard]] State propagate(State x, Path w) const { return model.A * x + std::sqrt(model.Q) * w; }
    [[nodiscard]] Path fresh_path(RandomStream& rng) const { return rng.normal(); }
    [[nodiscard]] Path blend(Path w, Path z, double rho) const {
        if (rho == 1.0) return w;
        return rho * w + std::sqrt(1.0 - rho * rho) * z;
    }
    [[nodiscard]] double log_likelihood(State x, Observation y) const {
        const double r = y - model.H * x;
        return -0.5 * r * r / model.R;
    }
};

}  // namespace saltda::filtering
