#include "saltda/fields/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "saltda/errors.hpp"

namespace saltda::fields {
namespace {

// fftw_plan creation is not thread-safe; execution through the new-array
// interface is. Plans are cached per interior size and never destroyed.
fftw_plan sine_plan(int m) {
    static std::mutex mutex;
    static std::map<int, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(m);
    if (it != plans.end()) return it->second;
    std::vector<double> scratch(static_cast<std::size_t>(m) * m);
    fftw_plan plan = fftw_plan_r2r_2d(m, m, scratch.data(), scratch.data(), FFTW_RODFT00,
                                      FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw: failed to create DST-I plan");
    plans.emplace(m, plan);
    return plan;
}

std::vector<double> interior_values(const ScalarField& f) {
    const Grid& g = f.grid();
    const int n = g.cells();
    const int m = n - 1;
    std::vector<double> out(static_cast<std::size_t>(m) * m);
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i)
            out[static_cast<std::size_t>(j - 1) * m + (i - 1)] = f(i, j);
    return out;
}

// 1D eigenvalues of the second-difference operator: (2cos(pπ/n) - 2)/h².
std::vector<double> second_difference_eigenvalues(const Grid& g) {
    const int n = g.cells();
    const double h = g.spacing();
    std::vector<double> lam(static_cast<std::size_t>(n - 1));
    for (int p = 1; p < n; ++p)
        lam[p - 1] = (2.0 * std::cos(std::numbers::pi * p / n) - 2.0) / (h * h);
    return lam;
}

// Applies the diagonal symbol in sine space and maps back to nodal values.
template <class Symbol>
ScalarField solve_diagonal(const ScalarField& f, Symbol&& inverse_symbol) {
    require_input(f.all_finite(), "elliptic solve: non-finite input values");
    const Grid& g = f.grid();
    const int n = g.cells();
    const int m = n - 1;
    fftw_plan plan = sine_plan(m);
    std::vector<double> buf = interior_values(f);
    std::vector<double> spec(buf.size());
    fftw_execute_r2r(plan, buf.data(), spec.data());
    const std::vector<double> lam = second_difference_eigenvalues(g);
    // Forward followed by inverse DST-I scales by (2n)^2 overall.
    const double norm = 1.0 / (4.0 * n * n);
    for (int q = 0; q < m; ++q)
        for (int p = 0; p < m; ++p) {
            auto& c = spec[static_cast<std::size_t>(q) * m + p];
            c *= inverse_symbol(lam[p] + lam[q]) * norm;
        }
    fftw_execute_r2r(plan, spec.data(), buf.data());
    ScalarField out(g, BoundaryCondition::DirichletZero);
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i)
            out(i, j) = buf[static_cast<std::size_t>(j - 1) * m + (i - 1)];
    return out;
}

}  // namespace

ScalarField poisson_solve(const ScalarField& f) {
    return solve_diagonal(f, [](double lambda) { return 1.0 / lambda; });
}

ScalarField helmholtz_inverse(const ScalarField& f, double k) {
    require_parameter(k > 0.0 && std::isfinite(k), "helmholtz_inverse: k must be positive");
    const double inv_k2 = 1.0 / (k * k);
    return solve_diagonal(f, [inv_k2](double lambda) { return 1.0 / (1.0 - lambda * inv_k2); });
}

ScalarField discrete_laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    const int n = g.cells();
    const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
    ScalarField out(g, BoundaryCondition::Free);
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i)
            out(i, j) = (f(i + 1, j) + f(i - 1, j) + f(i, j + 1) + f(i, j - 1) - 4.0 * f(i, j)) * inv_h2;
    return out;
}

std::vector<double> sine_coefficients(const ScalarField& f) {
    require_input(f.all_finite(), "sine_coefficients: non-finite input values");
    const int n = f.grid().cells();
    std::vector<double> buf = interior_values(f);
    std::vector<double> spec(buf.size());
    fftw_execute_r2r(sine_plan(n - 1), buf.data(), spec.data());
    // Σ_j sin²(pπj/n) = n/2 per direction; the transform carries a factor 2 each.
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (double& c : spec) c *= norm;
    return spec;
}

}  // namespace saltda::fields
