#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace saltda::fields {

/// Uniform square grid on [0,1]^2 with n cells (n+1 nodes) per side.
class Grid {
public:
    explicit Grid(int cells);

    [[nodiscard]] int cells() const { return n_; }
    [[nodiscard]] int nodes_per_side() const { return n_ + 1; }
    [[nodiscard]] std::size_t node_count() const {
        return static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 1);
    }
    [[nodiscard]] double spacing() const { return 1.0 / n_; }
    [[nodiscard]] double x(int i) const { return static_cast<double>(i) / n_; }
    [[nodiscard]] double y(int j) const { return static_cast<double>(j) / n_; }
    /// Row-major, y index outer.
    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1) +
               static_cast<std::size_t>(i);
    }
    [[nodiscard]] bool on_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == n_ || j == n_;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int n_;
};

enum class BoundaryCondition : unsigned { DirichletZero = 0, Free = 1 };

/// Nodal scalar field. DirichletZero fields are zero on every boundary node.
class ScalarField {
public:
    ScalarField(const Grid& grid, BoundaryCondition bc);
    ScalarField(const Grid& grid, BoundaryCondition bc, std::vector<double> values);

    template <class F>
    static ScalarField sample(const Grid& grid, BoundaryCondition bc, F&& f) {
        ScalarField out(grid, bc);
        const int n = grid.cells();
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i)
                if (bc == BoundaryCondition::Free || !grid.on_boundary(i, j))
                    out.values_[grid.index(i, j)] = f(grid.x(i), grid.y(j));
        return out;
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] BoundaryCondition bc() const { return bc_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

    /// Throws InputError on NaN/Inf or non-zero boundary data for DirichletZero fields.
    void validate() const;
    [[nodiscard]] bool all_finite() const;
    /// Zeroes boundary nodes and retags as DirichletZero.
    void impose_dirichlet_zero();
    void retag(BoundaryCondition bc) { bc_ = bc; }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);
    /// this += s * other
    ScalarField& axpy(double s, const ScalarField& other);

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    Grid grid_;
    BoundaryCondition bc_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Velocity-like pair of scalar fields on one grid.
struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField(ScalarField x_component, ScalarField y_component);
    [[nodiscard]] const Grid& grid() const { return x.grid(); }
    friend bool operator==(const VectorField&, const VectorField&) = default;
};

struct Point {
    double x;
    double y;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Vec2 {
    double x;
    double y;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace saltda::fields
