#include <cmath>
#include <string>

#include "saltda/errors.hpp"
#include "saltda/fields/coarse_graining.hpp"
#include "saltda/fields/operators.hpp"
#include "saltda/observations/stations.hpp"

namespace saltda::observations {
namespace {

std::vector<int> coarse_cell_of_fine_nodes(const fields::Grid& fine, const fields::Grid& coarse) {
    const int nf = fine.cells();
    const int nc = coarse.cells();
    if (nf % nc != 0) {
        throw ParameterError("fine cell count " + std::to_string(nf) + " is not a multiple of " + std::to_string(nc));
    }
    const int r = nf / nc;
    const auto cell = [r](int i) { return i == 0 ? 0 : (i - 1) / r; };
    std::vector<int> out(fine.node_count());
    for (int j = 0; j <= nf; ++j)
        for (int i = 0; i <= nf; ++i) out[fine.index(i, j)] = cell(j) * nc + cell(i);
    return out;
}

}  // namespace

std::vector<double> absolute_group_deviations(std::span<const double> values, std::span<const int> group_of) {
    require_input(values.size() == group_of.size(), "group assignment length mismatch");
    int groups = 0;
    for (int g : group_of) {
        require_input(g >= 0, "negative group id");
        groups = std::max(groups, g + 1);
    }
    std::vector<double> sum(static_cast<std::size_t>(groups), 0.0);
    std::vector<double> count(static_cast<std::size_t>(groups), 0.0);
    for (std::size_t k = 0; k < values.size(); ++k) {
        sum[group_of[k]] += values[k];
        count[group_of[k]] += 1.0;
    }
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        out[k] = std::abs(values[k] - sum[group_of[k]] / count[group_of[k]]);
    }
    return out;
}

VectorField cell_variability(const std::vector<VectorField>& fine_snapshots, const fields::Grid& coarse,
                             double lambda) {
    require_input(!fine_snapshots.empty(), "observation noise calibration needs at least one snapshot");
    require_parameter(lambda > 0.0, "lambda must be positive");
    const fields::Grid fine = fine_snapshots.front().grid();
    const std::vector<int> cells = coarse_cell_of_fine_nodes(fine, coarse);
    ScalarField sx(fine, fields::BoundaryCondition::Free);
    ScalarField sy(fine, fields::BoundaryCondition::Free);
    for (const VectorField& snap : fine_snapshots) {
        fields::require_same_grid(fine, snap.grid(), "observation noise snapshot");
        const auto dx = absolute_group_deviations(snap.x.values(), cells);
        const auto dy = absolute_group_deviations(snap.y.values(), cells);
        auto vx = sx.values();
        auto vy = sy.values();
        for (std::size_t k = 0; k < dx.size(); ++k) {
            vx[k] += dx[k];
            vy[k] += dy[k];
        }
    }
    const double scale = lambda / static_cast<double>(fine_snapshots.size());
    sx *= scale;
    sy *= scale;
    return {std::move(sx), std::move(sy)};
}

ObsNoise calibrate_obs_noise(const std::vector<VectorField>& fine_snapshots, const fields::Grid& coarse,
                             const StationSet& stations, double lambda, double sigma_floor) {
    require_parameter(sigma_floor > 0.0, "sigma floor must be positive");
    const VectorField gamma = cell_variability(fine_snapshots, coarse, lambda);
    const auto at_stations = fields::sample_at(gamma, stations.coords());
    ObsNoise noise;
    noise.lambda = lambda;
    noise.sigma_floor = sigma_floor;
    noise.sigmas.reserve(2 * at_stations.size());
    for (const auto& v : at_stations) {
        noise.sigmas.push_back(std::max(v.x, sigma_floor));
        noise.sigmas.push_back(std::max(v.y, sigma_floor));
    }
    return noise;
}

Observation observe(const VectorField& truth, const StationSet& stations, const ObsNoise& noise,
                    const StreamKey& key) {
    noise.validate(stations.observation_size());
    const auto clean = fields::sample_at(truth, stations.coords());
    Observation y;
    y.values.resize(stations.observation_size());
    for (std::size_t s = 0; s < stations.size(); ++s) {
        RandomStream rng(key.child(stations.station_key(s)));
        y.values[2 * s] = clean[s].x + noise.sigmas[2 * s] * rng.normal();
        y.values[2 * s + 1] = clean[s].y + noise.sigmas[2 * s + 1] * rng.normal();
    }
    return y;
}

double log_likelihood(std::span<const double> predicted, const Observation& y, const ObsNoise& noise) {
    require_input(predicted.size() == y.values.size() && noise.sigmas.size() == y.values.size(),
                  "log_likelihood: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        const double z = (predicted[j] - y.values[j]) / noise.sigmas[j];
        s += z * z;
    }
    return -0.5 * s;
}

double log_likelihood(const ScalarField& vorticity, const Observation& y, const StationSet& stations,
                      const ObsNoise& noise) {
    require_input(y.values.size() == stations.observation_size(), "log_likelihood: observation length mismatch");
    const auto predicted = fields::sample_at(fields::velocity_of(vorticity), stations.coords());
    std::vector<double> flat;
    flat.reserve(2 * predicted.size());
    for (const auto& v : predicted) {
        flat.push_back(v.x);
        flat.push_back(v.y);
    }
    return log_likelihood(flat, y, noise);
}

std::vector<double> ObservationOperator::apply_vorticity(const ScalarField& vorticity) const {
    return apply(fields::velocity_of(vorticity));
}

}  // namespace saltda::observations
