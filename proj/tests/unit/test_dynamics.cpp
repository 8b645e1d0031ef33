#include <doctest.h>

#include <cmath>
#include <numbers>

#include "saltda/dynamics/euler.hpp"
#include "saltda/errors.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/fields/operators.hpp"
#include "test_support.hpp"

using namespace saltda;
using namespace saltda::dynamics;
using fields::BoundaryCondition;
using saltda::testing::max_abs;
using saltda::testing::max_abs_diff;
using saltda::testing::sine_mode;
using std::numbers::pi;

namespace {

double weighted_sum(const ScalarField& a, const ScalarField* b = nullptr) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) s += a.values()[k] * (b ? b->values()[k] : 1.0);
    return s;
}

double abs_sum(const ScalarField& a, const ScalarField* b = nullptr) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) s += std::fabs(a.values()[k] * (b ? b->values()[k] : 1.0));
    return s;
}

ScalarField zero_stream(const ScalarField& w) { return ScalarField(w.grid(), BoundaryCondition::DirichletZero); }

}  // namespace

TEST_CASE("forcing field") {
    const Grid g(64);
    CHECK(max_abs(forcing_field(g, 0.0, 8)) == 0.0);

    // Trapezoid integral of sin(bπx) over [0,1] vanishes for even b.
    const ScalarField q = forcing_field(g, 0.1, 8);
    double s = 0.0;
    for (int i = 0; i <= 64; ++i) s += (i == 0 || i == 64 ? 0.5 : 1.0) * q(i, 10);
    CHECK(std::fabs(s / 64.0) < 1e-15);
    CHECK(q(16, 0) == doctest::Approx(0.1 * std::sin(8 * pi * 0.25) + 0.0).epsilon(1e-12));
}

TEST_CASE("tendency special cases") {
    const Grid g(16);
    ModelParams p;
    p.a = 0.0;

    SUBCASE("constant vorticity without sources") {
        p.r = 0.0;
        const ScalarField w = ScalarField::sample(g, BoundaryCondition::Free, [](double, double) { return 2.0; });
        RandomStream rng(StreamKey(5, {1}));
        const ScalarField psi = testing::random_sine_field(g, rng);
        CHECK(max_abs(tendency(w, psi, p)) < 1e-12);
    }
    SUBCASE("pure damping") {
        p.r = 0.3;
        RandomStream rng(StreamKey(5, {2}));
        const ScalarField w = testing::random_sine_field(g, rng);
        const ScalarField f = tendency(w, ScalarField(g, BoundaryCondition::DirichletZero), p);
        for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(f.values()[k] == -0.3 * w.values()[k]);
    }
}

TEST_CASE("arakawa identities on interior-supported fields") {
    const Grid g(64);
    RandomStream rng(StreamKey(5, {3}));
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField psi = testing::random_bump_field(g, rng);
        const ScalarField w = testing::random_bump_field(g, rng);
        const ScalarField j = arakawa_jacobian(psi, w);
        CHECK(std::fabs(weighted_sum(j)) <= 1e-10 * abs_sum(j));
        CHECK(std::fabs(weighted_sum(j, &w)) <= 1e-10 * abs_sum(j, &w));
        CHECK(std::fabs(weighted_sum(j, &psi)) <= 1e-10 * abs_sum(j, &psi));
    }
}

TEST_CASE("arakawa: energy and enstrophy identities with wall data") {
    // ψ vanishes on the walls: Σψ J = 0 always; Σω J = 0 when ω does too.
    const Grid g(32);
    RandomStream rng(StreamKey(5, {4}));
    const ScalarField psi = testing::random_sine_field(g, rng, 6);
    ScalarField w(g, BoundaryCondition::DirichletZero);
    for (int jj = 1; jj < 32; ++jj)
        for (int i = 1; i < 32; ++i) w(i, jj) = rng.normal();
    const ScalarField j = arakawa_jacobian(psi, w);
    CHECK(std::fabs(weighted_sum(j, &psi)) <= 1e-12 * abs_sum(j, &psi));
    CHECK(std::fabs(weighted_sum(j, &w)) <= 1e-12 * abs_sum(j, &w));
}

TEST_CASE("arakawa approximates the continuous jacobian") {
    auto err = [](int n) {
        const Grid g(n);
        const ScalarField psi = sine_mode(g, 1, 2);
        const ScalarField w = sine_mode(g, 2, 1);
        const ScalarField exact = ScalarField::sample(g, BoundaryCondition::DirichletZero, [](double x, double y) {
            const double px = pi * std::cos(pi * x) * std::sin(2 * pi * y);
            const double py = 2 * pi * std::sin(pi * x) * std::cos(2 * pi * y);
            const double wx = 2 * pi * std::cos(2 * pi * x) * std::sin(pi * y);
            const double wy = pi * std::sin(2 * pi * x) * std::cos(pi * y);
            return px * wy - py * wx;
        });
        return max_abs_diff(arakawa_jacobian(psi, w), exact);
    };
    CHECK(std::log2(err(32) / err(64)) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("ssprk3: zero tendency is bit-identical") {
    const Grid g(16);
    ModelParams p;
    p.a = 0.0;
    p.r = 0.0;
    const ScalarField w = ScalarField::sample(g, BoundaryCondition::Free, [](double, double) { return 1.5; });
    CHECK(ssprk3_step(w, p) == w);
}

TEST_CASE("ssprk3: pure decay follows the cubic Taylor polynomial") {
    const Grid g(16);
    ModelParams p;
    p.a = 0.0;
    p.r = 0.7;
    p.dt = 0.1;
    RandomStream rng(StreamKey(5, {5}));
    const ScalarField w = testing::random_sine_field(g, rng);
    const ScalarField out = ssprk3_step(w, p, zero_stream);
    const double z = p.r * p.dt;
    const double factor = 1.0 - z + z * z / 2.0 - z * z * z / 6.0;
    for (std::size_t k = 0; k < w.values().size(); ++k)
        CHECK(out.values()[k] == doctest::Approx(factor * w.values()[k]).epsilon(1e-14));
}

TEST_CASE("ssprk3: third-order temporal self-convergence") {
    const Grid g(32);
    ModelParams p;
    p.a = 0.5;
    p.b = 2;
    p.r = 0.1;
    const ScalarField w0 = fields::discrete_laplacian(sine_mode(g, 1, 1) + 0.4 * sine_mode(g, 2, 3));
    auto run = [&](int steps) {
        ModelParams q = p;
        q.dt = 0.2 / steps;
        ScalarField w = w0;
        for (int s = 0; s < steps; ++s) w = ssprk3_step(w, q);
        return w;
    };
    const ScalarField a = run(40);
    const ScalarField b = run(80);
    const ScalarField c = run(160);
    const double order = std::log2(max_abs_diff(a, b) / max_abs_diff(b, c));
    CHECK(order >= 2.9);
}

TEST_CASE("unforced, undamped flow conserves energy and enstrophy at CFL 0.5") {
    const Grid g(64);
    const ScalarField psi0 = sine_mode(g, 1, 1) + sine_mode(g, 2, 3) + sine_mode(g, 4, 1);
    ScalarField w = fields::discrete_laplacian(psi0);
    ModelParams p;
    p.a = 0.0;
    p.r = 0.0;
    p.cfl_limit = 1.0;
    p.dt = 0.5 * g.spacing() / fields::max_speed(fields::poisson_solve(w));
    const double e0 = energy(w, fields::poisson_solve(w));
    const double z0 = enstrophy(w);
    for (int s = 0; s < 100; ++s) w = ssprk3_step(w, p);
    CHECK(std::fabs(energy(w, fields::poisson_solve(w)) - e0) / e0 <= 1e-6);
    CHECK(std::fabs(enstrophy(w) - z0) / z0 <= 1e-6);
}

TEST_CASE("energy of a sine mode") {
    const Grid g(128);
    const ScalarField w = fields::discrete_laplacian(sine_mode(g, 1, 1));
    CHECK(energy(w, fields::poisson_solve(w)) == doctest::Approx(pi * pi / 4.0).epsilon(1e-3));
    CHECK(enstrophy(ScalarField::sample(g, BoundaryCondition::Free, [](double, double) { return 1.0; })) ==
          doctest::Approx(0.5 * (1.0 + 2.0 / 128 + 1.0 / (128.0 * 128.0))));
}

TEST_CASE("cfl check") {
    const Grid g(16);
    ModelParams p;
    p.dt = 1.0;
    p.abort_on_cfl = true;
    const ScalarField psi = sine_mode(g, 1, 1);
    CHECK_THROWS_AS(check_cfl(psi, p), CflViolation);
    p.abort_on_cfl = false;
    CHECK(check_cfl(psi, p) > p.cfl_limit);
}

TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.r = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = ModelParams{};
    p.b = 0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = ModelParams{};
    p.dt = -1.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);
}

TEST_CASE("spin-up") {
    const Grid g(16);
    ModelParams p;
    SUBCASE("t_end = 0 returns the initial configuration") {
        const SpinupResult r = spinup(g, p, 0.0);
        CHECK(r.omega == spinup_initial_condition(g));
        CHECK(r.series.size() == 1);
    }
    SUBCASE("observer sees every step") {
        long seen = 0;
        const SpinupResult r = spinup(g, p, 10 * p.dt, [&](long, double, const ScalarField&) { ++seen; });
        CHECK(seen == 11);
        CHECK(r.series.back().step == 10);
    }
}

TEST_CASE("trailing energy change") {
    std::vector<EnergySample> s;
    for (int k = 0; k <= 100; ++k) s.push_back({k, 0.1 * k, k <= 90 ? 1.0 + k : 95.0, 0.0});
    CHECK(trailing_energy_change(s, 0.1) == doctest::Approx(std::fabs(95.0 - 91.0) / 95.0));
}
