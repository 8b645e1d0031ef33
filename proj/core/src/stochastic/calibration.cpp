#include "saltda/stochastic/calibration.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "saltda/errors.hpp"
#include "saltda/fields/coarse_graining.hpp"
#include "saltda/fields/elliptic.hpp"

namespace saltda::stochastic {

EofResult eof_basis_from_residuals(const std::vector<ScalarField>& residual_streams, double fraction, double dt) {
    require_parameter(fraction > 0.0 && fraction <= 1.0, "EOF fraction must lie in (0,1]");
    require_parameter(dt > 0.0, "EOF time step must be > 0");
    require_input(residual_streams.size() >= 2, "EOF calibration needs at least two residuals");
    const Grid grid = residual_streams.front().grid();
    const auto d = static_cast<Eigen::Index>(grid.node_count());
    const auto samples = static_cast<Eigen::Index>(residual_streams.size());

    Eigen::MatrixXd x(d, samples);
    for (Eigen::Index s = 0; s < samples; ++s) {
        const ScalarField& r = residual_streams[static_cast<std::size_t>(s)];
        fields::require_same_grid(grid, r.grid(), "EOF residual");
        require_input(r.all_finite(), "EOF residual contains non-finite values");
        x.col(s) = Eigen::Map<const Eigen::VectorXd>(r.values().data(), d);
    }
    const double raw_scale = x.squaredNorm() / static_cast<double>(samples);
    const Eigen::VectorXd mean = x.rowwise().mean();
    x.colwise() -= mean;

    // Method of snapshots: eigenpairs of the M×M Gram matrix give those of the
    // d×d covariance X Xᵀ/(M-1).
    const double norm = 1.0 / static_cast<double>(samples - 1);
    const Eigen::MatrixXd gram = (x.transpose() * x) * norm;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw std::runtime_error("EOF eigendecomposition failed");
    const Eigen::VectorXd evals = solver.eigenvalues().reverse();
    const Eigen::MatrixXd evecs = solver.eigenvectors().rowwise().reverse();

    const double largest = evals.size() > 0 ? evals(0) : 0.0;
    // Identical residuals leave only round-off after centring.
    if (!(largest > 1e-20 * raw_scale)) throw InputError("EOF calibration: residuals are degenerate (rank 0)");
    const double cutoff = largest * 1e-12;

    std::vector<double> kept_values;
    double total = 0.0;
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
        if (evals(k) > cutoff) {
            kept_values.push_back(evals(k));
            total += evals(k);
        }
    }

    std::size_t m = 0;
    double cumulative = 0.0;
    while (m < kept_values.size()) {
        cumulative += kept_values[m];
        ++m;
        if (cumulative >= fraction * total * (1.0 - 1e-12)) break;
    }

    std::vector<ScalarField> zetas;
    std::vector<double> spectrum;
    zetas.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto idx = static_cast<Eigen::Index>(k);
        Eigen::VectorXd mode = x * evecs.col(idx);
        mode /= mode.norm();
        // Deterministic sign: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        mode.cwiseAbs().maxCoeff(&arg);
        if (mode(arg) < 0.0) mode = -mode;
        mode *= std::sqrt(kept_values[k] / dt);
        ScalarField z(grid, fields::BoundaryCondition::Free,
                      std::vector<double>(mode.data(), mode.data() + mode.size()));
        z.impose_dirichlet_zero();
        zetas.push_back(std::move(z));
        spectrum.push_back(kept_values[k]);
    }

    EofResult result{NoiseBasis(grid, std::move(zetas), std::move(spectrum)), kept_values, total,
                     cumulative / total};
    return result;
}

EofResult calibrate_xi_detailed(const std::vector<ScalarField>& fine_snapshots, const Grid& coarse,
                                const dynamics::ModelParams& coarse_params, double fraction) {
    require_input(fine_snapshots.size() >= 2, "calibrate_xi needs at least two snapshots");
    coarse_params.validate();
    std::vector<ScalarField> coarse_states;
    coarse_states.reserve(fine_snapshots.size());
    for (const ScalarField& w : fine_snapshots) coarse_states.push_back(fields::coarse_grain_vorticity(w, coarse));

    std::vector<ScalarField> residuals;
    residuals.reserve(coarse_states.size() - 1);
    for (std::size_t t = 0; t + 1 < coarse_states.size(); ++t) {
        ScalarField r = coarse_states[t + 1];
        r -= dynamics::ssprk3_step(coarse_states[t], coarse_params);
        residuals.push_back(fields::poisson_solve(r));
    }
    if (residuals.size() < 2) {
        // A single residual has no spread about its mean.
        throw InputError("calibrate_xi: need at least three snapshots for a nonzero residual covariance");
    }
    return eof_basis_from_residuals(residuals, fraction, coarse_params.dt);
}

NoiseBasis calibrate_xi(const std::vector<ScalarField>& fine_snapshots, const Grid& coarse,
                        const dynamics::ModelParams& coarse_params, double fraction) {
    return calibrate_xi_detailed(fine_snapshots, coarse, coarse_params, fraction).basis;
}

}  // namespace saltda::stochastic
