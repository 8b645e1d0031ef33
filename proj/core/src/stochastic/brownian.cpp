#include "saltda/stochastic/brownian.hpp"

#include <cmath>

#include "saltda/errors.hpp"

namespace saltda::stochastic {

PathIncrements::PathIncrements(int modes, int substeps)
    : m(modes), n_sub(substeps), dW(static_cast<std::size_t>(modes) * static_cast<std::size_t>(substeps), 0.0) {
    require_parameter(modes >= 0 && substeps >= 1, "path needs m >= 0 modes and n_sub >= 1 substeps");
}

std::vector<double> PathIncrements::column(int substep) const {
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out[i] = (*this)(i, substep);
    return out;
}

PathIncrements brownian_increments(RandomStream& rng, int m, int n_sub, double dt) {
    require_parameter(m >= 1, "brownian_increments: m must be >= 1");
    require_parameter(n_sub >= 1, "brownian_increments: n_sub must be >= 1");
    require_parameter(dt > 0.0, "brownian_increments: dt must be > 0");
    PathIncrements out(m, n_sub);
    const double sd = std::sqrt(dt);
    for (double& v : out.dW) v = sd * rng.normal();
    return out;
}

PathIncrements blend_paths(const PathIncrements& w, const PathIncrements& z, double rho) {
    require_input(w.m == z.m && w.n_sub == z.n_sub, "blend_paths: shape mismatch");
    require_parameter(rho >= 0.0 && rho <= 1.0, "blend_paths: rho must lie in [0,1]");
    if (rho == 1.0) return w;
    if (rho == 0.0) return z;
    const double c = std::sqrt(1.0 - rho * rho);
    PathIncrements out(w.m, w.n_sub);
    for (std::size_t k = 0; k < out.dW.size(); ++k) out.dW[k] = rho * w.dW[k] + c * z.dW[k];
    return out;
}

}  // namespace saltda::stochastic
