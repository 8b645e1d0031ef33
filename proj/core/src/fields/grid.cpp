#include "saltda/fields/grid.hpp"

#include <cmath>
#include <string>

#include "saltda/errors.hpp"

namespace saltda::fields {

Grid::Grid(int cells) : n_(cells) {
    require_parameter(cells >= 4, "grid needs at least 4 cells per side, got " + std::to_string(cells));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) {
        throw InputError(std::string(what) + ": grid mismatch (" + std::to_string(a.cells()) +
                         " vs " + std::to_string(b.cells()) + " cells)");
    }
}

ScalarField::ScalarField(const Grid& grid, BoundaryCondition bc)
    : grid_(grid), bc_(bc), values_(grid.node_count(), 0.0) {}

ScalarField::ScalarField(const Grid& grid, BoundaryCondition bc, std::vector<double> values)
    : grid_(grid), bc_(bc), values_(std::move(values)) {
    require_input(values_.size() == grid_.node_count(), "field value count does not match grid");
    validate();
}

bool ScalarField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void ScalarField::validate() const {
    require_input(all_finite(), "field contains non-finite values");
    if (bc_ != BoundaryCondition::DirichletZero) return;
    const int n = grid_.cells();
    for (int k = 0; k <= n; ++k) {
        require_input((*this)(k, 0) == 0.0 && (*this)(k, n) == 0.0 && (*this)(0, k) == 0.0 &&
                          (*this)(n, k) == 0.0,
                      "DirichletZero field has non-zero boundary values");
    }
}

void ScalarField::impose_dirichlet_zero() {
    const int n = grid_.cells();
    for (int k = 0; k <= n; ++k) {
        (*this)(k, 0) = 0.0;
        (*this)(k, n) = 0.0;
        (*this)(0, k) = 0.0;
        (*this)(n, k) = 0.0;
    }
    bc_ = BoundaryCondition::DirichletZero;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field addition");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field subtraction");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(ScalarField x_component, ScalarField y_component)
    : x(std::move(x_component)), y(std::move(y_component)) {
    require_same_grid(x.grid(), y.grid(), "vector field components");
}

}  // namespace saltda::fields
