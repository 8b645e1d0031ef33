#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "saltda/fields/grid.hpp"
#include "saltda/fields/operators.hpp"
#include "saltda/random.hpp"

namespace saltda::observations {

using fields::Point;
using fields::ScalarField;
using fields::VectorField;

/// Weather stations on the s×s vertex lattice (i/(s-1), j/(s-1)), ordered
/// with j outer. d_y = s² stations, each observing both velocity components.
class StationSet {
public:
    explicit StationSet(int per_side);

    [[nodiscard]] int per_side() const { return s_; }
    [[nodiscard]] std::size_t size() const { return coords_.size(); }
    [[nodiscard]] std::span<const Point> coords() const { return coords_; }
    /// Length of an observation vector: 2 entries (x then y) per station.
    [[nodiscard]] std::size_t observation_size() const { return 2 * coords_.size(); }
    /// Key identifying a station by position, shared by nested station sets.
    [[nodiscard]] std::uint64_t station_key(std::size_t station) const;

private:
    int s_;
    std::vector<Point> coords_;
};

StationSet make_stations(int per_side);

/// Per-station, per-component standard deviations (station-major, x then y).
struct ObsNoise {
    std::vector<double> sigmas;
    double lambda = 0.6;
    double sigma_floor = 1e-6;

    void validate(std::size_t expected_size) const;
};

struct Observation {
    long step = 0;
    double time = 0.0;
    /// 2·d_y values, station-major, x component then y component.
    std::vector<double> values;
};

/// Mean over snapshots of the pointwise absolute deviation of each fine node
/// from the mean of its coarse cell, times λ, per velocity component. Fine
/// nodes on a coarse-cell edge belong to the cell on their lower-left.
VectorField cell_variability(const std::vector<VectorField>& fine_snapshots, const fields::Grid& coarse,
                             double lambda);

/// Per-node absolute deviation from the node's group mean, for an arbitrary
/// grouping; the building block of cell_variability.
std::vector<double> absolute_group_deviations(std::span<const double> values, std::span<const int> group_of);

ObsNoise calibrate_obs_noise(const std::vector<VectorField>& fine_snapshots, const fields::Grid& coarse,
                             const StationSet& stations, double lambda, double sigma_floor);

/// Precomputed bilinear stencils of every station on one grid.
class ObservationOperator {
public:
    ObservationOperator(const fields::Grid& grid, const StationSet& stations);

    [[nodiscard]] const fields::Grid& grid() const { return grid_; }
    /// h(u): station-major (u_x, u_y) values of a velocity field.
    [[nodiscard]] std::vector<double> apply(const VectorField& velocity) const;
    /// h applied to the velocity of a vorticity field (Poisson + perp_grad).
    [[nodiscard]] std::vector<double> apply_vorticity(const ScalarField& vorticity) const;

private:
    fields::Grid grid_;
    std::vector<fields::BilinearStencil> stencils_;
};

/// Interpolated truth plus independent Normal(0, σ_j²) noise. Each station
/// draws from its own stream key.child(station_key), so shared stations of
/// nested sets see identical noise.
Observation observe(const VectorField& truth, const StationSet& stations, const ObsNoise& noise,
                    const StreamKey& key);

/// -½ Σ_j ((h_j - y_j)/σ_j)², the Gaussian log-density without its constant.
double log_likelihood(std::span<const double> predicted, const Observation& y, const ObsNoise& noise);
double log_likelihood(const ScalarField& vorticity, const Observation& y, const StationSet& stations,
                      const ObsNoise& noise);

}  // namespace saltda::observations
