#include "saltda/fields/coarse_graining.hpp"

#include <string>

#include "saltda/errors.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/fields/operators.hpp"

namespace saltda::fields {

ScalarField restrict_to(const ScalarField& fine, const Grid& coarse) {
    const int nf = fine.grid().cells();
    const int nc = coarse.cells();
    if (nf % nc != 0) {
        throw ParameterError("fine cell count " + std::to_string(nf) +
                             " is not a multiple of coarse cell count " + std::to_string(nc));
    }
    const int r = nf / nc;
    ScalarField out(coarse, fine.bc());
    for (int j = 0; j <= nc; ++j)
        for (int i = 0; i <= nc; ++i) out(i, j) = fine(i * r, j * r);
    return out;
}

ScalarField filtered_stream(const ScalarField& fine_vorticity, double k) {
    return helmholtz_inverse(poisson_solve(fine_vorticity), k);
}

ScalarField coarse_grain_vorticity(const ScalarField& fine_vorticity, const Grid& coarse) {
    const ScalarField psi =
        restrict_to(filtered_stream(fine_vorticity, static_cast<double>(coarse.cells())), coarse);
    ScalarField omega = discrete_laplacian(psi);
    const ScalarField boundary = restrict_to(fine_vorticity, coarse);
    const int n = coarse.cells();
    for (int k = 0; k <= n; ++k) {
        omega(k, 0) = boundary(k, 0);
        omega(k, n) = boundary(k, n);
        omega(0, k) = boundary(0, k);
        omega(n, k) = boundary(n, k);
    }
    return omega;
}

VectorField filtered_velocity(const ScalarField& fine_vorticity, const Grid& coarse) {
    return perp_grad(filtered_stream(fine_vorticity, static_cast<double>(coarse.cells())));
}

VectorField velocity_of(const ScalarField& vorticity) {
    return perp_grad(poisson_solve(vorticity));
}

}  // namespace saltda::fields
