#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "saltda/dynamics/euler.hpp"
#include "saltda/fields/grid.hpp"
#include "saltda/filtering/particle_filter.hpp"

namespace saltda::experiments {

enum class Scenario { Perfect, Imperfect };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& text);

struct ExperimentConfig {
    Scenario scenario = Scenario::Perfect;

    // [model]
    double a = 0.1;
    int b = 8;
    double r = 0.01;
    double cfl_limit = 0.5;
    bool abort_on_cfl = false;

    // [grid]
    int fine_n = 128;
    int coarse_n = 32;
    double dt_fine = 0.005;
    double dt_coarse = 0.02;

    // [filter]
    filtering::FilterConfig filter{.ensemble_size = 24};

    // [observations]
    int stations_s = 9;
    double lambda = 0.6;
    double sigma_floor = 1e-6;
    /// Probe points for rank histograms and trajectories, as x,y pairs.
    std::vector<fields::Point> probes = default_probes();

    // [experiment]
    /// Coarse steps per assimilation window.
    int assimilation_interval = 5;
    int total_windows = 50;
    std::uint64_t seed = 1;
    /// Fine-model time integrated from the spin-up configuration.
    double spinup_time = 50.0;
    /// Trailing fine steps of the spin-up from which the deformation pool is taken.
    int pool_size = 20;
    long pool_interval = 100;
    /// Consecutive coarse-step snapshots used by both calibrations.
    int calibration_snapshots = 100;
    double eof_fraction = 0.9;
    /// Multiplies the calibrated noise basis.
    double noise_scale = 1.0;
    double deformation_epsilon = 0.25;
    long deformation_steps = 104;
    /// Windows in the forecast reliability runs.
    int forecast_horizon = 10;
    /// Checkpoint the assimilation state every this many windows (0: never).
    int checkpoint_every = 10;
    /// Members written to the trajectory files.
    int trajectory_members = 15;

    [[nodiscard]] dynamics::ModelParams fine_params() const;
    [[nodiscard]] dynamics::ModelParams coarse_params() const;
    [[nodiscard]] fields::Grid fine_grid() const { return fields::Grid(fine_n); }
    [[nodiscard]] fields::Grid coarse_grid() const { return fields::Grid(coarse_n); }
    /// dt_coarse / dt_fine, validated to be a whole number.
    [[nodiscard]] int fine_steps_per_coarse() const;
    [[nodiscard]] double window_length() const { return assimilation_interval * dt_coarse; }

    void validate() const;

    static std::vector<fields::Point> default_probes();
};

/// Parses `key = value` lines under [model] [grid] [filter] [observations]
/// [experiment] headers on top of the defaults. Unknown sections or keys,
/// malformed values and keys outside a section are ParameterErrors.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every setting in parse_config's format.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace saltda::experiments
