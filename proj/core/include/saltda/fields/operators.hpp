#pragma once

#include <span>
#include <vector>

#include "saltda/fields/grid.hpp"

namespace saltda::fields {

/// u = ∇⊥ψ = (-∂_y ψ, ∂_x ψ). Central differences inside, one-sided
/// second-order differences on boundary nodes.
VectorField perp_grad(const ScalarField& psi);

/// Bilinear interpolation of both components at each point. Points lying on a
/// cell edge belong to the cell on their lower-left, except on the top/right
/// domain boundary. Throws InputError for points outside [0,1]².
std::vector<Vec2> sample_at(const VectorField& field, std::span<const Point> points);
double sample_at(const ScalarField& field, Point p);

/// Precomputed bilinear stencil of one point: four node indices and weights.
struct BilinearStencil {
    std::size_t nodes[4];
    double weights[4];
    [[nodiscard]] double apply(std::span<const double> values) const {
        return weights[0] * values[nodes[0]] + weights[1] * values[nodes[1]] +
               weights[2] * values[nodes[2]] + weights[3] * values[nodes[3]];
    }
};

BilinearStencil bilinear_stencil(const Grid& grid, Point p);

/// Largest nodal speed |∇⊥ψ| using the same stencils as perp_grad.
double max_speed(const ScalarField& psi);

}  // namespace saltda::fields
