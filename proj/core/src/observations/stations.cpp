#include "saltda/observations/stations.hpp"

#include <cmath>

#include "saltda/errors.hpp"
#include "saltda/fields/operators.hpp"

namespace saltda::observations {

StationSet::StationSet(int per_side) : s_(per_side) {
    require_parameter(per_side >= 2, "station lattice needs at least 2 stations per side");
    coords_.reserve(static_cast<std::size_t>(per_side) * per_side);
    const double denom = per_side - 1;
    for (int j = 0; j < per_side; ++j)
        for (int i = 0; i < per_side; ++i) coords_.push_back({i / denom, j / denom});
}

std::uint64_t StationSet::station_key(std::size_t station) const {
    // Quantise on a 2^24 lattice: nested lattices give bit-identical keys.
    const Point p = coords_.at(station);
    const auto qx = static_cast<std::uint64_t>(std::llround(p.x * 16777216.0));
    const auto qy = static_cast<std::uint64_t>(std::llround(p.y * 16777216.0));
    return (qy << 32) | qx;
}

StationSet make_stations(int per_side) { return StationSet(per_side); }

void ObsNoise::validate(std::size_t expected_size) const {
    require_input(sigmas.size() == expected_size, "observation noise size does not match station count");
    require_parameter(sigma_floor > 0.0, "sigma floor must be positive");
    for (double s : sigmas) require_input(std::isfinite(s) && s >= sigma_floor, "sigma below floor");
}

ObservationOperator::ObservationOperator(const fields::Grid& grid, const StationSet& stations) : grid_(grid) {
    stencils_.reserve(stations.size());
    for (const Point& p : stations.coords()) stencils_.push_back(fields::bilinear_stencil(grid, p));
}

std::vector<double> ObservationOperator::apply(const VectorField& velocity) const {
    fields::require_same_grid(grid_, velocity.grid(), "observation operator");
    std::vector<double> out;
    out.reserve(2 * stencils_.size());
    for (const auto& s : stencils_) {
        out.push_back(s.apply(velocity.x.values()));
        out.push_back(s.apply(velocity.y.values()));
    }
    return out;
}

}  // namespace saltda::observations
