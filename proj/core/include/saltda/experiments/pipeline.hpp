#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "saltda/diagnostics/ranks.hpp"
#include "saltda/diagnostics/statistics.hpp"
#include "saltda/ensembles/deformation.hpp"
#include "saltda/experiments/config.hpp"
#include "saltda/filtering/kalman.hpp"
#include "saltda/filtering/particle_filter.hpp"
#include "saltda/observations/stations.hpp"
#include "saltda/parallel.hpp"
#include "saltda/stochastic/calibration.hpp"

namespace saltda::experiments {

/// File layout of one experiment directory.
class RunPaths {
public:
    explicit RunPaths(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path& root() const { return root_; }
    [[nodiscard]] std::filesystem::path spinup_state() const { return root_ / "spinup.sfld"; }
    [[nodiscard]] std::filesystem::path energy_csv() const { return root_ / "energy.csv"; }
    [[nodiscard]] std::filesystem::path pool_dir() const { return root_ / "pool"; }
    [[nodiscard]] std::filesystem::path calibration_dir() const { return root_ / "calibration"; }
    [[nodiscard]] std::filesystem::path noise_basis() const { return root_ / "xi.eof"; }
    [[nodiscard]] std::filesystem::path eof_spectrum_csv() const { return root_ / "eof_spectrum.csv"; }
    [[nodiscard]] std::filesystem::path obs_noise_csv() const { return root_ / "obs_noise.csv"; }
    [[nodiscard]] std::filesystem::path ensemble_dir() const { return root_ / "ensemble"; }
    [[nodiscard]] std::filesystem::path truth_dir() const { return root_ / "truth"; }
    [[nodiscard]] std::filesystem::path observations_csv() const { return root_ / "observations.csv"; }
    [[nodiscard]] std::filesystem::path diagnostics_csv() const { return root_ / "diagnostics.csv"; }
    [[nodiscard]] std::filesystem::path step_diagnostics_csv() const { return root_ / "step_diagnostics.csv"; }
    [[nodiscard]] std::filesystem::path checkpoints_dir() const { return root_ / "checkpoints"; }
    [[nodiscard]] std::filesystem::path checkpoint_dir(int window) const;
    [[nodiscard]] std::filesystem::path ranks_csv(fields::Point probe) const;
    [[nodiscard]] std::filesystem::path trajectory_csv(fields::Point probe) const;
    [[nodiscard]] std::filesystem::path forecast_csv(long start_step) const;
    [[nodiscard]] std::filesystem::path rank_summary_csv() const { return root_ / "rank_summary.csv"; }
    [[nodiscard]] std::filesystem::path truth_file(int window) const;

private:
    std::filesystem::path root_;
};

struct SpinupSummary {
    double final_time = 0.0;
    double energy = 0.0;
    /// Relative energy change over the last 10% of the run.
    double trailing_energy_change = 0.0;
    double mean_speed = 0.0;
    double eddy_turnover_time = 0.0;
};

/// Fine-grid spin-up from the reference configuration to cfg.spinup_time.
/// Writes the final state, the energy series, the deformation pool (pool_size
/// states spaced pool_interval fine steps before the end) and the
/// calibration snapshots (the last calibration_snapshots states spaced one
/// coarse step, ending at the final state).
SpinupSummary run_spinup(const ExperimentConfig& cfg, const RunPaths& paths);

std::vector<fields::ScalarField> load_calibration_snapshots(const ExperimentConfig& cfg, const RunPaths& paths);

stochastic::EofResult run_calibrate_xi(const ExperimentConfig& cfg, const RunPaths& paths);
observations::ObsNoise run_calibrate_noise(const ExperimentConfig& cfg, const RunPaths& paths);

/// Deformation ensemble of cfg.ensemble_size members around the spin-up
/// state, written to the ensemble directory. `deformation_steps` overrides
/// the configured advection length.
ensembles::InitialEnsemble run_init_ensemble(const ExperimentConfig& cfg, const RunPaths& paths, const Executor& exec,
                                             std::optional<long> deformation_steps = std::nullopt);

/// Coarse truth vorticity at windows 0..total_windows + forecast_horizon and
/// the noisy observations at windows 1.. of it. Perfect scenario: one SPDE
/// path from a deformation draw. Imperfect: the fine PDE from the spin-up
/// state, coarse-grained at every window.
void run_truth(const ExperimentConfig& cfg, const RunPaths& paths);

struct AssimilationResult {
    std::vector<diagnostics::DiagnosticsRecord> records;
    std::vector<filtering::StepDiagnostics> steps;
};

/// The filtering loop over cfg.total_windows windows plus the no-assimilation
/// prior ensemble. With `resume`, continues from the latest complete
/// checkpoint and rewrites output rows after it.
AssimilationResult run_assimilation(const ExperimentConfig& cfg, const RunPaths& paths, const Executor& exec,
                                    bool resume = false);

/// Forecast reliability curve of the posterior checkpointed at `window`
/// (the latest checkpoint when absent) over cfg.forecast_horizon windows.
std::vector<diagnostics::ForecastPoint> run_forecast(const ExperimentConfig& cfg, const RunPaths& paths,
                                                     const Executor& exec, std::optional<int> window = std::nullopt);

struct ProbeRankSummary {
    fields::Point probe;
    diagnostics::RankHistogram histogram;
    std::size_t samples = 0;
};

struct DiagnoseSummary {
    std::vector<ProbeRankSummary> probes;
    /// Windows after the first five with posterior rmse below prior rmse.
    double fraction_posterior_better = 0.0;
    std::size_t windows = 0;
};

/// Rank histogram χ² tests per probe and rmse summaries from the CSV outputs;
/// writes rank_summary.csv.
DiagnoseSummary run_diagnose(const ExperimentConfig& cfg, const RunPaths& paths);

struct KalmanCheckRow {
    int step = 0;
    double kalman_mean = 0.0;
    double kalman_variance = 0.0;
    double filter_mean = 0.0;
    double filter_variance = 0.0;
    /// ESS of the step's untempered importance weights.
    double n_eff = 0.0;
    bool mean_ok = false;
    bool variance_ok = false;
};

/// The tempered, jittered particle filter on a scalar linear-Gaussian model
/// against the exact Kalman recursion. Means must agree within
/// 3·sqrt(P/N_eff) and variances within 10% relative.
std::vector<KalmanCheckRow> kalman_check(const filtering::LinearGaussianModel& model,
                                         const filtering::FilterConfig& filter, int steps, std::uint64_t seed,
                                         const Executor& exec);
void write_kalman_check(const std::filesystem::path& path, const std::vector<KalmanCheckRow>& rows);

/// Index of the station located at `p`; InputError when none is.
std::size_t station_at(const observations::StationSet& stations, fields::Point p);

}  // namespace saltda::experiments
