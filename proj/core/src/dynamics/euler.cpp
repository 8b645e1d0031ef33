#include "saltda/dynamics/euler.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "saltda/errors.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/fields/operators.hpp"

namespace saltda::dynamics {

using fields::BoundaryCondition;

void ModelParams::validate() const {
    require_parameter(a >= 0.0, "forcing strength a must be >= 0");
    require_parameter(b >= 1, "gyre count b must be >= 1");
    require_parameter(r > 0.0, "damping rate r must be > 0");
    require_parameter(dt > 0.0, "time step dt must be > 0");
    require_parameter(cfl_limit > 0.0, "CFL limit must be > 0");
}

ScalarField forcing_field(const Grid& grid, double a, int b) {
    const int n = grid.cells();
    std::vector<double> column(static_cast<std::size_t>(n + 1));
    for (int i = 0; i <= n; ++i) column[i] = a * std::sin(b * std::numbers::pi * grid.x(i));
    ScalarField q(grid, BoundaryCondition::Free);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) q(i, j) = column[i];
    return q;
}

ScalarField arakawa_jacobian(const ScalarField& psi, const ScalarField& omega) {
    fields::require_same_grid(psi.grid(), omega.grid(), "arakawa_jacobian");
    const fields::Grid& g = psi.grid();
    const int n = g.cells();
    const double scale = 1.0 / (12.0 * g.spacing() * g.spacing());
    ScalarField out(g, BoundaryCondition::Free);
    const auto P = [&](int i, int j) { return psi(i, j); };
    const auto W = [&](int i, int j) { return omega(i, j); };
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const double jpp = (P(i + 1, j) - P(i - 1, j)) * (W(i, j + 1) - W(i, j - 1)) -
                               (P(i, j + 1) - P(i, j - 1)) * (W(i + 1, j) - W(i - 1, j));
            const double jpx = P(i + 1, j) * (W(i + 1, j + 1) - W(i + 1, j - 1)) -
                               P(i - 1, j) * (W(i - 1, j + 1) - W(i - 1, j - 1)) -
                               P(i, j + 1) * (W(i + 1, j + 1) - W(i - 1, j + 1)) +
                               P(i, j - 1) * (W(i + 1, j - 1) - W(i - 1, j - 1));
            const double jxp = P(i + 1, j + 1) * (W(i, j + 1) - W(i + 1, j)) -
                               P(i - 1, j - 1) * (W(i - 1, j) - W(i, j - 1)) -
                               P(i - 1, j + 1) * (W(i, j + 1) - W(i - 1, j)) +
                               P(i + 1, j - 1) * (W(i + 1, j) - W(i, j - 1));
            out(i, j) = (jpp + jpx + jxp) * scale;
        }
    return out;
}

namespace {

ScalarField evaluate_tendency(const ScalarField& omega, const ScalarField& psi, const ScalarField* forcing,
                              double damping) {
    ScalarField f = arakawa_jacobian(psi, omega);
    auto fv = f.values();
    const auto wv = omega.values();
    if (forcing != nullptr) {
        const auto qv = forcing->values();
        for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = -fv[k] + qv[k] - damping * wv[k];
    } else {
        for (std::size_t k = 0; k < fv.size(); ++k) fv[k] = -fv[k] - damping * wv[k];
    }
    return f;
}

}  // namespace

ScalarField tendency(const ScalarField& omega, const ScalarField& psi, const ModelParams& params) {
    fields::require_same_grid(omega.grid(), psi.grid(), "tendency");
    require_input(psi.bc() == BoundaryCondition::DirichletZero, "tendency: stream function must be DirichletZero");
    const ScalarField q = forcing_field(omega.grid(), params.a, params.b);
    return evaluate_tendency(omega, psi, &q, params.r);
}

double check_cfl(const ScalarField& psi, const ModelParams& params) {
    const double cfl = params.dt * fields::max_speed(psi) / psi.grid().spacing();
    if (cfl > params.cfl_limit) {
        const std::string msg = "CFL number " + std::to_string(cfl) + " exceeds limit " +
                                std::to_string(params.cfl_limit) + " (dt = " + std::to_string(params.dt) + ")";
        if (params.abort_on_cfl) throw CflViolation(msg);
        spdlog::warn("{}", msg);
    }
    return cfl;
}

ScalarField ssprk3_step(const ScalarField& omega, const ModelParams& params) {
    return ssprk3_step(omega, params, fields::poisson_solve);
}

ScalarField ssprk3_step(const ScalarField& omega, const ModelParams& params, const StreamSolver& stream_solver,
                        Sources sources) {
    const double dt = params.dt;
    const double damping = sources.damping ? params.r : 0.0;
    std::optional<ScalarField> q;
    if (sources.forcing) q = forcing_field(omega.grid(), params.a, params.b);
    const ScalarField* qp = q ? &*q : nullptr;

    // Shu–Osher stages written as increments of ω:
    //   ω¹ = ω + dt k1,  ω² = ω + dt/4 (k1 + k2),  ω' = ω + dt/6 (k1 + k2 + 4 k3)
    // which equals ¾ω + ¼(ω¹ + dt F(ω¹)) and ⅓ω + ⅔(ω² + dt F(ω²)).
    const ScalarField psi0 = stream_solver(omega);
    check_cfl(psi0, params);
    const ScalarField k1 = evaluate_tendency(omega, psi0, qp, damping);
    ScalarField w1 = omega;
    w1.axpy(dt, k1);

    const ScalarField k2 = evaluate_tendency(w1, stream_solver(w1), qp, damping);
    ScalarField w2 = omega;
    {
        auto v2 = w2.values();
        const auto a1 = k1.values();
        const auto a2 = k2.values();
        for (std::size_t k = 0; k < v2.size(); ++k) v2[k] += 0.25 * dt * (a1[k] + a2[k]);
    }

    const ScalarField k3 = evaluate_tendency(w2, stream_solver(w2), qp, damping);
    ScalarField w3 = omega;
    {
        auto v3 = w3.values();
        const auto a1 = k1.values();
        const auto a2 = k2.values();
        const auto a3 = k3.values();
        for (std::size_t k = 0; k < v3.size(); ++k) v3[k] += dt / 6.0 * (a1[k] + a2[k] + 4.0 * a3[k]);
    }
    w3.retag(omega.bc());
    return w3;
}

double energy(const ScalarField& omega, const ScalarField& psi) {
    const double h = omega.grid().spacing();
    double s = 0.0;
    const auto w = omega.values();
    const auto p = psi.values();
    for (std::size_t k = 0; k < w.size(); ++k) s += p[k] * w[k];
    // ½∫|u|² = -½∫ψω for ψ vanishing on the boundary.
    return -0.5 * s * h * h;
}

double enstrophy(const ScalarField& omega) {
    const double h = omega.grid().spacing();
    double s = 0.0;
    for (double w : omega.values()) s += w * w;
    return 0.5 * s * h * h;
}

double circulation(const ScalarField& omega) {
    const double h = omega.grid().spacing();
    double s = 0.0;
    for (double w : omega.values()) s += w;
    return s * h * h;
}

ScalarField spinup_initial_condition(const Grid& grid) {
    using std::numbers::pi;
    return ScalarField::sample(grid, BoundaryCondition::Free, [](double x, double y) {
        return std::sin(8 * pi * x) * std::sin(8 * pi * y) + 0.4 * std::cos(6 * pi * x) * std::cos(6 * pi * y) +
               0.3 * std::cos(10 * pi * x) * std::cos(4 * pi * y) + 0.02 * std::sin(2 * pi * y) +
               0.02 * std::sin(2 * pi * x);
    });
}

SpinupResult integrate(ScalarField omega, const ModelParams& params, long n_steps, long first_step,
                       const SnapshotObserver& observer) {
    params.validate();
    require_parameter(n_steps >= 0, "step count must be >= 0");
    SpinupResult result{std::move(omega), {}};
    result.series.reserve(static_cast<std::size_t>(n_steps + 1));
    auto record = [&](long step) {
        const double t = static_cast<double>(step) * params.dt;
        const ScalarField psi = fields::poisson_solve(result.omega);
        result.series.push_back({step, t, energy(result.omega, psi), enstrophy(result.omega)});
        if (observer) observer(step, t, result.omega);
    };
    record(first_step);
    for (long s = 1; s <= n_steps; ++s) {
        result.omega = ssprk3_step(result.omega, params);
        require_input(result.omega.all_finite(), "integration produced non-finite vorticity");
        record(first_step + s);
    }
    return result;
}

SpinupResult spinup(const Grid& grid, const ModelParams& params, double t_end, const SnapshotObserver& observer) {
    require_parameter(t_end >= 0.0, "spin-up end time must be >= 0");
    const long steps = std::lround(t_end / params.dt);
    return integrate(spinup_initial_condition(grid), params, steps, 0, observer);
}

double trailing_energy_change(const std::vector<EnergySample>& series, double fraction) {
    require_input(series.size() >= 2, "energy series too short");
    require_parameter(fraction > 0.0 && fraction <= 1.0, "fraction must lie in (0,1]");
    const std::size_t last = series.size() - 1;
    const auto span = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(last)));
    const double e0 = series[last - std::min(span, last)].energy;
    const double e1 = series[last].energy;
    return std::abs(e1 - e0) / std::abs(e1);
}

}  // namespace saltda::dynamics
