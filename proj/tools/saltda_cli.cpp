#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "saltda/errors.hpp"
#include "saltda/experiments/config.hpp"
#include "saltda/experiments/csv.hpp"
#include "saltda/experiments/pipeline.hpp"
#include "saltda/parallel.hpp"

namespace {

using namespace saltda;
using namespace saltda::experiments;

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string out_dir = ".";
    bool resume = false;
    std::string log_level = "info";
};

ExperimentConfig resolve_config(const GlobalOptions& g) {
    ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
    if (g.seed) cfg.seed = *g.seed;
    cfg.validate();
    return cfg;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParameterError*>(&e) != nullptr) return 2;
    if (dynamic_cast<const InputError*>(&e) != nullptr || dynamic_cast<const FormatError*>(&e) != nullptr) return 3;
    if (dynamic_cast<const DegenerateEnsembleError*>(&e) != nullptr) return 4;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SALT particle-filter data assimilation for damped, forced 2D Euler flow"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Experiment config file ([model] [grid] [filter] [observations] [experiment])")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed, overriding [experiment] seed");
    app.add_option("--workers", g.workers, "Worker threads for per-particle work")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "Experiment directory holding all artifacts");
    app.add_flag("--resume", g.resume, "Continue `assimilate` from the latest checkpoint");
    app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off");

    auto* spinup = app.add_subcommand("spinup", "Spin up the fine model; write the pool and calibration snapshots");
    auto* truth = app.add_subcommand("truth", "Generate the truth trajectory and noisy observations");
    auto* calib_xi = app.add_subcommand("calibrate-xi", "Estimate the SALT noise basis from calibration snapshots");
    auto* calib_noise = app.add_subcommand("calibrate-noise", "Estimate per-station observation noise");
    auto* init = app.add_subcommand("init-ensemble", "Sample the deformation initial ensemble");
    std::optional<long> deformation_steps;
    init->add_option("--deformation-steps", deformation_steps, "Override [experiment] deformation_steps");
    auto* assimilate = app.add_subcommand("assimilate", "Run the particle filter over all windows");
    auto* forecast = app.add_subcommand("forecast", "Forecast reliability from an assimilation checkpoint");
    std::optional<int> forecast_window;
    forecast->add_option("--window", forecast_window, "Checkpoint window (default: latest)");
    auto* diagnose = app.add_subcommand("diagnose", "Rank histogram tests and rmse summary from run outputs");
    auto* kalman = app.add_subcommand("kalman-check", "Particle filter against the exact Kalman filter");
    int kalman_particles = 10000;
    int kalman_steps = 20;
    filtering::LinearGaussianModel lg{.A = 0.9, .Q = 0.5, .H = 1.0, .R = 0.25, .m0 = 0.0, .P0 = 1.0};
    kalman->add_option("--particles", kalman_particles, "Ensemble size")->check(CLI::PositiveNumber);
    kalman->add_option("--steps", kalman_steps, "Assimilation steps")->check(CLI::NonNegativeNumber);
    kalman->add_option("--A", lg.A, "State transition");
    kalman->add_option("--Q", lg.Q, "Model noise variance");
    kalman->add_option("--H", lg.H, "Observation coefficient");
    kalman->add_option("--R", lg.R, "Observation noise variance");

    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(g.log_level));
    try {
        const ExperimentConfig cfg = resolve_config(g);
        const RunPaths paths(g.out_dir);
        std::filesystem::create_directories(paths.root());
        const Executor exec(g.workers);

        if (spinup->parsed()) {
            const SpinupSummary s = run_spinup(cfg, paths);
            fmt::print("final_time={} energy={} trailing_energy_change={} mean_speed={} eddy_turnover_time={}\n",
                       s.final_time, s.energy, s.trailing_energy_change, s.mean_speed, s.eddy_turnover_time);
        } else if (calib_xi->parsed()) {
            const auto eof = run_calibrate_xi(cfg, paths);
            fmt::print("modes={} explained_fraction={}\n", eof.basis.modes(), eof.explained_fraction);
        } else if (calib_noise->parsed()) {
            const auto noise = run_calibrate_noise(cfg, paths);
            fmt::print("stations={} lambda={}\n", noise.sigmas.size() / 2, noise.lambda);
        } else if (init->parsed()) {
            const auto ens = run_init_ensemble(cfg, paths, exec, deformation_steps);
            fmt::print("members={}\n", ens.members.size());
        } else if (truth->parsed()) {
            run_truth(cfg, paths);
            fmt::print("windows={}\n", cfg.total_windows + cfg.forecast_horizon);
        } else if (assimilate->parsed()) {
            const auto result = run_assimilation(cfg, paths, exec, g.resume);
            fmt::print("windows={}\n", result.steps.size());
        } else if (forecast->parsed()) {
            const auto curve = run_forecast(cfg, paths, exec, forecast_window);
            for (const auto& p : curve) fmt::print("{}\n", forecast_row(p));
        } else if (diagnose->parsed()) {
            const DiagnoseSummary s = run_diagnose(cfg, paths);
            for (const auto& p : s.probes) {
                fmt::print("probe ({}, {}): samples={} chi2={:.4f} critical={:.4f} {}\n", p.probe.x, p.probe.y,
                           p.samples, p.histogram.chi2, p.histogram.critical_value,
                           p.histogram.rejected ? "rejected" : "not rejected");
            }
            fmt::print("posterior_better_fraction={} over {} windows\n", s.fraction_posterior_better, s.windows);
        } else if (kalman->parsed()) {
            filtering::FilterConfig fc = cfg.filter;
            fc.ensemble_size = kalman_particles;
            const auto rows = kalman_check(lg, fc, kalman_steps, cfg.seed, exec);
            write_kalman_check(paths.root() / "kalman_check.csv", rows);
            bool ok = true;
            for (const auto& r : rows) ok = ok && r.mean_ok && r.variance_ok;
            fmt::print("kalman-check: {} ({} steps)\n", ok ? "PASS" : "FAIL", rows.size());
            return ok ? 0 : 5;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_code_for(e);
    }
    return 0;
}
