#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "saltda/errors.hpp"
#include "saltda/fields/coarse_graining.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/fields/field_io.hpp"
#include "saltda/fields/operators.hpp"
#include "test_support.hpp"

using namespace saltda;
using namespace saltda::fields;
using saltda::testing::max_abs;
using saltda::testing::max_abs_diff;
using saltda::testing::sine_mode;
using std::numbers::pi;

namespace {

double interior_residual(const ScalarField& lhs, const ScalarField& rhs) {
    const int n = lhs.grid().cells();
    double m = 0.0;
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) m = std::max(m, std::fabs(lhs(i, j) - rhs(i, j)));
    return m;
}

double poisson_error(int n) {
    const Grid g(n);
    const ScalarField f = -2.0 * pi * pi * sine_mode(g, 1, 1);
    return max_abs_diff(poisson_solve(f), sine_mode(g, 1, 1));
}

double helmholtz_error(int n, double k) {
    const Grid g(n);
    const ScalarField f = sine_mode(g, 1, 1);
    const ScalarField expected = (1.0 / (1.0 + 2.0 * pi * pi / (k * k))) * sine_mode(g, 1, 1);
    return max_abs_diff(helmholtz_inverse(f, k), expected);
}

}  // namespace

TEST_CASE("grid geometry") {
    for (int n : {4, 7, 32, 128}) {
        const Grid g(n);
        CHECK(g.spacing() * n == 1.0);
        CHECK(g.x(n) == 1.0);
        CHECK(g.node_count() == static_cast<std::size_t>((n + 1) * (n + 1)));
    }
    CHECK_THROWS_AS(Grid(3), ParameterError);
}

TEST_CASE("dirichlet fields validate their boundary") {
    const Grid g(8);
    ScalarField f(g, BoundaryCondition::DirichletZero);
    CHECK_NOTHROW(f.validate());
    f(0, 3) = 1.0;
    CHECK_THROWS_AS(f.validate(), InputError);
    f.impose_dirichlet_zero();
    f(2, 2) = std::nan("");
    CHECK_THROWS_AS(f.validate(), InputError);
}

TEST_CASE("poisson: sine eigenfunction, second order") {
    const double e32 = poisson_error(32);
    const double e64 = poisson_error(64);
    const double e128 = poisson_error(128);
    CHECK(std::log2(e32 / e64) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(e64 / e128) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(e64 < 1e-3);
}

TEST_CASE("poisson: discrete residual at round-off") {
    RandomStream rng(StreamKey(3, {1}));
    const Grid g(64);
    ScalarField f(g, BoundaryCondition::DirichletZero);
    for (int j = 1; j < 64; ++j)
        for (int i = 1; i < 64; ++i) f(i, j) = rng.normal();
    const ScalarField psi = poisson_solve(f);
    CHECK(interior_residual(discrete_laplacian(psi), f) <= 1e-10);
    CHECK(psi.bc() == BoundaryCondition::DirichletZero);
    CHECK_NOTHROW(psi.validate());
}

TEST_CASE("poisson: zero and linearity") {
    const Grid g(32);
    CHECK(max_abs(poisson_solve(ScalarField(g, BoundaryCondition::DirichletZero))) == 0.0);

    RandomStream rng(StreamKey(3, {2}));
    const ScalarField f = testing::random_sine_field(g, rng);
    const ScalarField h = testing::random_sine_field(g, rng);
    const ScalarField lhs = poisson_solve(2.5 * f + (-0.75) * h);
    const ScalarField rhs = 2.5 * poisson_solve(f) + (-0.75) * poisson_solve(h);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * max_abs(rhs));
}

TEST_CASE("helmholtz: sine eigenvalue with k = 8") {
    const double e32 = helmholtz_error(32, 8.0);
    const double e64 = helmholtz_error(64, 8.0);
    const double e128 = helmholtz_error(128, 8.0);
    CHECK(std::log2(e32 / e64) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(e64 / e128) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("helmholtz: residual, zero and large-k limit") {
    const Grid g(64);
    RandomStream rng(StreamKey(3, {3}));
    const ScalarField f = testing::random_sine_field(g, rng, 6);
    const ScalarField h = helmholtz_inverse(f, 10.0);
    ScalarField lhs = h;
    lhs.axpy(-1.0 / 100.0, discrete_laplacian(h));
    CHECK(interior_residual(lhs, f) <= 1e-10);

    CHECK(max_abs(helmholtz_inverse(ScalarField(g, BoundaryCondition::DirichletZero), 5.0)) == 0.0);
    CHECK(max_abs_diff(helmholtz_inverse(f, 1e6), f) <= 1e-4 * max_abs(f));
    CHECK_THROWS_AS(helmholtz_inverse(f, 0.0), ParameterError);
}

TEST_CASE("sine coefficients pick out a mode") {
    const Grid g(16);
    const ScalarField f = 0.5 * sine_mode(g, 2, 3) + sine_mode(g, 1, 1);
    const auto c = sine_coefficients(f);
    CHECK(c[(3 - 1) * 15 + (2 - 1)] == doctest::Approx(0.5));
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(std::fabs(c[1]) < 1e-12);
}

TEST_CASE("perp_grad: exact on linear fields") {
    const Grid g(16);
    const ScalarField psi = ScalarField::sample(g, BoundaryCondition::Free, [](double, double y) { return y; });
    const VectorField u = perp_grad(psi);
    for (double v : u.x.values()) CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
    for (double v : u.y.values()) CHECK(std::fabs(v) < 1e-12);

    const ScalarField c = ScalarField::sample(g, BoundaryCondition::Free, [](double, double) { return 3.0; });
    const VectorField z = perp_grad(c);
    CHECK(max_abs(z.x) == 0.0);
    CHECK(max_abs(z.y) == 0.0);
}

TEST_CASE("perp_grad: second-order on a sine mode") {
    auto err = [](int n) {
        const Grid g(n);
        const VectorField u = perp_grad(sine_mode(g, 1, 1));
        const ScalarField ux = ScalarField::sample(
            g, BoundaryCondition::Free, [](double x, double y) { return -pi * std::sin(pi * x) * std::cos(pi * y); });
        const ScalarField uy = ScalarField::sample(
            g, BoundaryCondition::Free, [](double x, double y) { return pi * std::cos(pi * x) * std::sin(pi * y); });
        return std::max(max_abs_diff(u.x, ux), max_abs_diff(u.y, uy));
    };
    const double e1 = err(32);
    const double e2 = err(64);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("normal velocity vanishes on the walls") {
    const Grid g(32);
    RandomStream rng(StreamKey(3, {4}));
    const VectorField u = perp_grad(testing::random_sine_field(g, rng));
    for (int k = 0; k <= 32; ++k) {
        CHECK(std::fabs(u.x(0, k)) < 1e-12);
        CHECK(std::fabs(u.x(32, k)) < 1e-12);
        CHECK(std::fabs(u.y(k, 0)) < 1e-12);
        CHECK(std::fabs(u.y(k, 32)) < 1e-12);
    }
}

TEST_CASE("bilinear sampling") {
    const Grid g(8);
    RandomStream rng(StreamKey(3, {5}));
    ScalarField f(g, BoundaryCondition::Free);
    for (double& v : f.values()) v = rng.normal();

    SUBCASE("nodes are exact") {
        for (int j = 0; j <= 8; ++j)
            for (int i = 0; i <= 8; ++i) CHECK(sample_at(f, {g.x(i), g.y(j)}) == f(i, j));
    }
    SUBCASE("cell centre is the mean of four nodes") {
        const double expected = 0.25 * (f(2, 5) + f(3, 5) + f(2, 6) + f(3, 6));
        CHECK(sample_at(f, {2.5 / 8, 5.5 / 8}) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("linear fields are reproduced") {
        const ScalarField lin =
            ScalarField::sample(g, BoundaryCondition::Free, [](double x, double y) { return 2.0 - 3.0 * x + 0.5 * y; });
        for (int k = 0; k < 50; ++k) {
            const Point p{rng.uniform(), rng.uniform()};
            CHECK(sample_at(lin, p) == doctest::Approx(2.0 - 3.0 * p.x + 0.5 * p.y).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(sample_at(f, {1.2, 0.5}), InputError);
}

TEST_CASE("field io round trip and corruption") {
    const Grid g(8);
    RandomStream rng(StreamKey(3, {6}));
    const ScalarField f = testing::random_sine_field(g, rng);
    std::stringstream s;
    write_scalar_field(s, f);
    const ScalarField back = read_scalar_field(s);
    CHECK(back == f);

    const VectorField u = perp_grad(f);
    std::stringstream v;
    write_vector_field(v, u);
    CHECK(read_vector_field(v) == u);

    std::string bytes = s.str();
    bytes[0] = 'X';
    std::stringstream bad(bytes);
    CHECK_THROWS_AS(read_scalar_field(bad), FormatError);

    std::stringstream truncated(s.str().substr(0, s.str().size() - 8));
    CHECK_THROWS_AS(read_scalar_field(truncated), FormatError);
}

TEST_CASE("coarse graining") {
    const Grid fine(64);
    const Grid coarse(16);
    RandomStream rng(StreamKey(3, {7}));
    const ScalarField omega = discrete_laplacian(testing::random_sine_field(fine, rng, 6));

    SUBCASE("restriction samples coincident nodes") {
        const ScalarField r = restrict_to(omega, coarse);
        for (int j = 0; j <= 16; ++j)
            for (int i = 0; i <= 16; ++i) CHECK(r(i, j) == omega(4 * i, 4 * j));
        CHECK_THROWS_AS(restrict_to(omega, Grid(24)), ParameterError);
    }
    SUBCASE("coarse vorticity reproduces the filtered stream function") {
        const ScalarField wc = coarse_grain_vorticity(omega, coarse);
        const ScalarField psi_c = restrict_to(filtered_stream(omega, 16.0), coarse);
        CHECK(max_abs_diff(poisson_solve(wc), psi_c) <= 1e-12 * max_abs(psi_c));
    }
    SUBCASE("filtering damps a sine mode by the Helmholtz factor") {
        const ScalarField w = discrete_laplacian(sine_mode(fine, 1, 1));
        const auto c0 = sine_coefficients(poisson_solve(w));
        const auto c1 = sine_coefficients(filtered_stream(w, 16.0));
        CHECK(c1[0] / c0[0] == doctest::Approx(1.0 / (1.0 + 2.0 * pi * pi / 256.0)).epsilon(0.01));
    }
}
