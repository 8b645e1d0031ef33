#pragma once

#include <functional>
#include <vector>

#include "saltda/fields/grid.hpp"

namespace saltda::dynamics {

using fields::Grid;
using fields::ScalarField;

/// Damped and forced Euler parameters: Q = a sin(bπx), damping r, step dt.
struct ModelParams {
    double a = 0.1;
    int b = 8;
    double r = 0.01;
    double dt = 0.02;
    /// dt must satisfy dt <= cfl_limit * h / max|u|.
    double cfl_limit = 0.5;
    /// Throw CflViolation instead of logging a warning.
    bool abort_on_cfl = false;

    void validate() const;
};

ScalarField forcing_field(const Grid& grid, double a, int b);

/// Arakawa's 9-point Jacobian J(ψ, ω) = ψ_x ω_y - ψ_y ω_x at interior nodes,
/// zero on boundary nodes. Equals u·∇ω for u = ∇⊥ψ.
ScalarField arakawa_jacobian(const ScalarField& psi, const ScalarField& omega);

/// -J(ψ, ω) + Q - rω. Boundary nodes carry only Q - rω.
ScalarField tendency(const ScalarField& omega, const ScalarField& psi, const ModelParams& params);

/// Maps a vorticity to the stream function that advects it.
using StreamSolver = std::function<ScalarField(const ScalarField&)>;

/// Forcing and damping switches used by the linear deformation flow.
struct Sources {
    bool forcing = true;
    bool damping = true;
};

/// Shu–Osher SSP-RK3 step. The stream solver is re-evaluated on every stage;
/// the default is poisson_solve.
ScalarField ssprk3_step(const ScalarField& omega, const ModelParams& params);
ScalarField ssprk3_step(const ScalarField& omega, const ModelParams& params,
                        const StreamSolver& stream_solver, Sources sources = {});

/// Checks dt against the CFL bound for the given stream function; logs a
/// warning or throws CflViolation. Returns the CFL number dt·max|u|/h.
double check_cfl(const ScalarField& psi, const ModelParams& params);

double energy(const ScalarField& omega, const ScalarField& psi);
double enstrophy(const ScalarField& omega);
/// Σω·h² over all nodes.
double circulation(const ScalarField& omega);

/// The spin-up configuration sin(8πx)sin(8πy) + 0.4cos(6πx)cos(6πy)
/// + 0.3cos(10πx)cos(4πy) + 0.02sin(2πy) + 0.02sin(2πx).
ScalarField spinup_initial_condition(const Grid& grid);

struct EnergySample {
    long step;
    double time;
    double energy;
    double enstrophy;
};

struct SpinupResult {
    ScalarField omega;
    std::vector<EnergySample> series;
};

using SnapshotObserver = std::function<void(long step, double time, const ScalarField& omega)>;

/// Integrates from the spin-up configuration to t_end (rounded to whole steps).
SpinupResult spinup(const Grid& grid, const ModelParams& params, double t_end,
                    const SnapshotObserver& observer = {});

/// Continues an existing state for n_steps, sampling energy every step.
SpinupResult integrate(ScalarField omega, const ModelParams& params, long n_steps,
                       long first_step = 0, const SnapshotObserver& observer = {});

/// Relative energy change over the trailing fraction of a series:
/// |E_end - E_start| / |E_end|.
double trailing_energy_change(const std::vector<EnergySample>& series, double fraction = 0.1);

}  // namespace saltda::dynamics
