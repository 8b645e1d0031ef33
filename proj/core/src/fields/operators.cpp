#include "saltda/fields/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "saltda/errors.hpp"

namespace saltda::fields {
namespace {

// d/dx at node (i,j); second order everywhere.
double ddx(const ScalarField& f, int i, int j, int n, double inv_2h) {
    if (i == 0) return (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) * inv_2h;
    if (i == n) return (3.0 * f(n, j) - 4.0 * f(n - 1, j) + f(n - 2, j)) * inv_2h;
    return (f(i + 1, j) - f(i - 1, j)) * inv_2h;
}

double ddy(const ScalarField& f, int i, int j, int n, double inv_2h) {
    if (j == 0) return (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) * inv_2h;
    if (j == n) return (3.0 * f(i, n) - 4.0 * f(i, n - 1) + f(i, n - 2)) * inv_2h;
    return (f(i, j + 1) - f(i, j - 1)) * inv_2h;
}

// Lower-left ownership: a coordinate on an interior cell edge maps to the
// cell below/left of it; clamped into [0, n-1].
int owning_cell(double t, int n) {
    const double s = t * n;
    int c = static_cast<int>(std::ceil(s)) - 1;
    return std::clamp(c, 0, n - 1);
}

}  // namespace

VectorField perp_grad(const ScalarField& psi) {
    require_input(psi.all_finite(), "perp_grad: non-finite input values");
    const Grid& g = psi.grid();
    const int n = g.cells();
    const double inv_2h = 0.5 * n;
    ScalarField ux(g, BoundaryCondition::Free);
    ScalarField uy(g, BoundaryCondition::Free);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            ux(i, j) = -ddy(psi, i, j, n, inv_2h);
            uy(i, j) = ddx(psi, i, j, n, inv_2h);
        }
    return {std::move(ux), std::move(uy)};
}

double max_speed(const ScalarField& psi) {
    const int n = psi.grid().cells();
    const double inv_2h = 0.5 * n;
    double best = 0.0;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const double u = ddy(psi, i, j, n, inv_2h);
            const double v = ddx(psi, i, j, n, inv_2h);
            best = std::max(best, u * u + v * v);
        }
    return std::sqrt(best);
}

BilinearStencil bilinear_stencil(const Grid& grid, Point p) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
        throw InputError("sample point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                         ") lies outside the unit square");
    }
    const int n = grid.cells();
    const int ci = owning_cell(p.x, n);
    const int cj = owning_cell(p.y, n);
    const double fx = p.x * n - ci;
    const double fy = p.y * n - cj;
    BilinearStencil s{};
    s.nodes[0] = grid.index(ci, cj);
    s.nodes[1] = grid.index(ci + 1, cj);
    s.nodes[2] = grid.index(ci, cj + 1);
    s.nodes[3] = grid.index(ci + 1, cj + 1);
    s.weights[0] = (1.0 - fx) * (1.0 - fy);
    s.weights[1] = fx * (1.0 - fy);
    s.weights[2] = (1.0 - fx) * fy;
    s.weights[3] = fx * fy;
    return s;
}

double sample_at(const ScalarField& field, Point p) {
    return bilinear_stencil(field.grid(), p).apply(field.values());
}

std::vector<Vec2> sample_at(const VectorField& field, std::span<const Point> points) {
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (const Point& p : points) {
        const BilinearStencil s = bilinear_stencil(field.grid(), p);
        out.push_back({s.apply(field.x.values()), s.apply(field.y.values())});
    }
    return out;
}

}  // namespace saltda::fields
