#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "saltda/errors.hpp"
#include "saltda/fields/grid.hpp"

namespace saltda::diagnostics {

using fields::ScalarField;
using fields::VectorField;

/// Trapezoid-weighted discrete L² norm: sqrt(h² Σ w_ij (u_x² + u_y²)) with
/// half weights on edges, so a unit constant field has norm exactly 1.
double l2_norm(const VectorField& u);

/// ‖a - b‖ in the l2_norm sense.
double rmse(const VectorField& mean_field, const VectorField& verification);

VectorField ensemble_mean(const std::vector<VectorField>& ensemble);

/// sqrt(1/(N-1) Σ ‖X_n - mean‖²).
double spread(const std::vector<VectorField>& ensemble);

/// Trapezoid-weighted spatial mean of the pointwise speed |u|.
double mean_speed(const VectorField& u);

/// τ = l / mean_speed.
double eddy_turnover_time(double mean_speed, double l = 0.5);

struct DiagnosticsRecord {
    long step = 0;
    double time = 0.0;
    double rmse_posterior = 0.0;
    double rmse_forecast = 0.0;
    double rmse_forecast_vs_noisyobs = 0.0;
    double rmse_prior = 0.0;
    double spread_posterior = 0.0;
    double spread_forecast = 0.0;
    double spread_prior = 0.0;
    double ess = 0.0;
    int n_temperatures = 0;
    long propagator_evals = 0;
};

struct ForecastPoint {
    int j = 0;
    double rmse = 0.0;
    double spread = 0.0;
};

/// Propagates every member j_max windows without assimilation and records
/// the rmse of the ensemble mean against truth[j-1] and the spread at each
/// lead j = 1..j_max. `step(state, member, j)` advances one member one window.
template <class State>
std::vector<ForecastPoint> forecast_reliability(std::vector<State> ensemble,
                                                const std::function<State(const State&, std::size_t, int)>& step,
                                                const std::function<VectorField(const State&)>& velocity,
                                                const std::vector<VectorField>& truth, int j_max) {
    require_parameter(j_max >= 0, "forecast_reliability: negative horizon");
    require_input(static_cast<std::size_t>(j_max) <= truth.size(), "forecast horizon exceeds the truth trajectory");
    require_input(ensemble.size() >= 2 || j_max == 0, "forecast_reliability: need at least two members");
    std::vector<ForecastPoint> out;
    for (int j = 1; j <= j_max; ++j) {
        std::vector<VectorField> velocities;
        velocities.reserve(ensemble.size());
        for (std::size_t n = 0; n < ensemble.size(); ++n) {
            ensemble[n] = step(ensemble[n], n, j);
            velocities.push_back(velocity(ensemble[n]));
        }
        out.push_back({j, rmse(ensemble_mean(velocities), truth[static_cast<std::size_t>(j - 1)]),
                       spread(velocities)});
    }
    return out;
}

}  // namespace saltda::diagnostics
