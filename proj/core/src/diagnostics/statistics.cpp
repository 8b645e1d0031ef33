#include "saltda/diagnostics/statistics.hpp"

#include <cmath>

namespace saltda::diagnostics {
namespace {

double node_weight(int i, int j, int n) {
    const double wi = (i == 0 || i == n) ? 0.5 : 1.0;
    const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
    return wi * wj;
}

template <class F>
double weighted_sum(const fields::Grid& grid, F&& f) {
    const int n = grid.cells();
    double total = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) total += node_weight(i, j, n) * f(grid.index(i, j));
    const double h = grid.spacing();
    return h * h * total;
}

void check_pair(const VectorField& a, const VectorField& b) {
    fields::require_same_grid(a.grid(), b.grid(), "rmse");
}

}  // namespace

double l2_norm(const VectorField& u) {
    const auto x = u.x.values();
    const auto y = u.y.values();
    return std::sqrt(weighted_sum(u.grid(), [&](std::size_t k) { return x[k] * x[k] + y[k] * y[k]; }));
}

double rmse(const VectorField& mean_field, const VectorField& verification) {
    check_pair(mean_field, verification);
    const auto ax = mean_field.x.values();
    const auto ay = mean_field.y.values();
    const auto bx = verification.x.values();
    const auto by = verification.y.values();
    return std::sqrt(weighted_sum(mean_field.grid(), [&](std::size_t k) {
        const double dx = ax[k] - bx[k];
        const double dy = ay[k] - by[k];
        return dx * dx + dy * dy;
    }));
}

VectorField ensemble_mean(const std::vector<VectorField>& ensemble) {
    require_input(!ensemble.empty(), "ensemble_mean: empty ensemble");
    VectorField mean = ensemble.front();
    for (std::size_t n = 1; n < ensemble.size(); ++n) {
        fields::require_same_grid(mean.grid(), ensemble[n].grid(), "ensemble_mean");
        mean.x += ensemble[n].x;
        mean.y += ensemble[n].y;
    }
    const double inv = 1.0 / static_cast<double>(ensemble.size());
    mean.x *= inv;
    mean.y *= inv;
    return mean;
}

double spread(const std::vector<VectorField>& ensemble) {
    require_input(ensemble.size() >= 2, "spread: need at least two members");
    const VectorField mean = ensemble_mean(ensemble);
    double total = 0.0;
    for (const VectorField& member : ensemble) {
        const double d = rmse(member, mean);
        total += d * d;
    }
    return std::sqrt(total / static_cast<double>(ensemble.size() - 1));
}

double mean_speed(const VectorField& u) {
    const auto x = u.x.values();
    const auto y = u.y.values();
    return weighted_sum(u.grid(), [&](std::size_t k) { return std::hypot(x[k], y[k]); });
}

double eddy_turnover_time(double mean_speed, double l) {
    require_input(mean_speed > 0.0 && std::isfinite(mean_speed), "eddy_turnover_time: mean speed must be positive");
    require_parameter(l >= 0.0, "eddy_turnover_time: length scale must be non-negative");
    return l / mean_speed;
}

}  // namespace saltda::diagnostics
