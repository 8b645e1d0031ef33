#include "saltda/experiments/pipeline.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "saltda/ensembles/checkpoint.hpp"
#include "saltda/errors.hpp"
#include "saltda/experiments/csv.hpp"
#include "saltda/experiments/salt_model.hpp"
#include "saltda/fields/coarse_graining.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/fields/field_io.hpp"
#include "saltda/fields/operators.hpp"
#include "saltda/observations/obs_io.hpp"
#include "saltda/stochastic/spde.hpp"

namespace saltda::experiments {

using fields::Point;
using fields::ScalarField;
using fields::VectorField;
using Particle = filtering::Particle<ScalarField, stochastic::PathIncrements>;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_artifact(const std::filesystem::path& p, const char* producer) {
    if (!std::filesystem::exists(p)) {
        throw InputError(fmt::format("missing {} (run `{}` first)", p.string(), producer));
    }
}

StreamKey root_key(const ExperimentConfig& cfg) { return StreamKey(cfg.seed); }

observations::StationSet stations_of(const ExperimentConfig& cfg) { return observations::StationSet(cfg.stations_s); }

stochastic::NoiseBasis load_basis(const ExperimentConfig& cfg, const RunPaths& paths) {
    require_artifact(paths.noise_basis(), "calibrate-xi");
    stochastic::NoiseBasis basis = stochastic::load_noise_basis(paths.noise_basis());
    fields::require_same_grid(basis.grid(), cfg.coarse_grid(), "noise basis");
    return cfg.noise_scale == 1.0 ? basis : basis.scaled(cfg.noise_scale);
}

observations::ObsNoise load_noise(const ExperimentConfig& cfg, const RunPaths& paths) {
    require_artifact(paths.obs_noise_csv(), "calibrate-noise");
    observations::ObsNoise noise = observations::load_obs_noise(paths.obs_noise_csv());
    noise.validate(stations_of(cfg).observation_size());
    return noise;
}

SaltPropagator make_propagator(const ExperimentConfig& cfg, const RunPaths& paths) {
    return SaltPropagator(load_basis(cfg, paths), cfg.coarse_params(), cfg.assimilation_interval, stations_of(cfg),
                          load_noise(cfg, paths));
}

std::vector<ScalarField> load_pool(const RunPaths& paths, int count) {
    require_artifact(paths.pool_dir(), "spinup");
    return ensembles::load_fields(paths.pool_dir(), "pool", static_cast<std::size_t>(count));
}

std::vector<VectorField> velocities(const std::vector<ScalarField>& states, const Executor& exec) {
    if (states.empty()) return {};
    const fields::Grid& g = states.front().grid();
    const ScalarField blank(g, fields::BoundaryCondition::Free);
    std::vector<VectorField> out(states.size(), VectorField(blank, blank));
    exec.for_each(states.size(), [&](std::size_t n) { out[n] = fields::velocity_of(states[n]); });
    return out;
}

double station_rmse(std::span<const double> predicted, std::span<const double> observed) {
    double s = 0.0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        const double d = predicted[k] - observed[k];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(predicted.size() / 2));
}

double probe_ux(const VectorField& u, Point p) { return fields::sample_at(u.x, p); }

double probe_mean(const std::vector<VectorField>& ensemble, Point p) {
    double s = 0.0;
    for (const VectorField& u : ensemble) s += probe_ux(u, p);
    return s / static_cast<double>(ensemble.size());
}

long window_step(const ExperimentConfig& cfg, int window) {
    return static_cast<long>(window) * cfg.assimilation_interval;
}

double step_time(const ExperimentConfig& cfg, long step) { return static_cast<double>(step) * cfg.dt_coarse; }

struct CheckpointState {
    int window = 0;
    std::vector<Particle> particles;
    std::vector<ScalarField> prior;
};

void save_checkpoint(const RunPaths& paths, const CheckpointState& state) {
    const auto dir = paths.checkpoint_dir(state.window);
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir / "state.csv");
    std::vector<ScalarField> members;
    std::vector<ScalarField> parents;
    for (std::size_t n = 0; n < state.particles.size(); ++n) {
        members.push_back(state.particles[n].state);
        parents.push_back(state.particles[n].parent);
        ensembles::save_path(dir / ensembles::member_file_name("member", n, "path"), state.particles[n].path);
    }
    ensembles::save_fields(dir, "member", members);
    ensembles::save_fields(dir, "parent", parents);
    ensembles::save_fields(dir, "prior", state.prior);
    // Written last: a checkpoint without state.csv is incomplete.
    std::ofstream out(dir / "state.csv", std::ios::trunc);
    out << "member,log_weight\n";
    for (std::size_t n = 0; n < state.particles.size(); ++n) {
        out << fmt::format("{},{}\n", n, state.particles[n].log_weight);
    }
    if (!out) throw FormatError("failed writing checkpoint in " + dir.string());
}

CheckpointState load_checkpoint(const RunPaths& paths, int window, std::size_t n) {
    const auto dir = paths.checkpoint_dir(window);
    std::ifstream in(dir / "state.csv");
    if (!in) throw FormatError("incomplete checkpoint " + dir.string());
    std::string line;
    if (!std::getline(in, line) || line != "member,log_weight") throw FormatError(dir.string() + ": bad state.csv");
    CheckpointState state;
    state.window = window;
    const auto members = ensembles::load_fields(dir, "member", n);
    const auto parents = ensembles::load_fields(dir, "parent", n);
    state.prior = ensembles::load_fields(dir, "prior", n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::getline(in, line)) throw FormatError(dir.string() + ": state.csv has too few rows");
        const auto comma = line.find(',');
        if (comma == std::string::npos || std::stoul(line.substr(0, comma)) != k) {
            throw FormatError(dir.string() + ": malformed state.csv row");
        }
        Particle p{parents[k], ensembles::load_path(dir / ensembles::member_file_name("member", k, "path")),
                   members[k], std::stod(line.substr(comma + 1)), 0.0};
        state.particles.push_back(std::move(p));
    }
    return state;
}

std::optional<int> latest_checkpoint(const RunPaths& paths, int max_window) {
    std::optional<int> best;
    if (!std::filesystem::exists(paths.checkpoints_dir())) return best;
    for (const auto& entry : std::filesystem::directory_iterator(paths.checkpoints_dir())) {
        const std::string name = entry.path().filename().string();
        int w = -1;
        if (std::sscanf(name.c_str(), "window_%d", &w) != 1 || w > max_window) continue;
        if (!std::filesystem::exists(entry.path() / "state.csv")) continue;
        if (!best || w > *best) best = w;
    }
    return best;
}

void dump_degenerate(const RunPaths& paths, int window, const std::vector<Particle>& ensemble) {
    const auto dir = paths.root() / fmt::format("degenerate_window_{:04d}", window);
    std::vector<ScalarField> states;
    std::vector<ScalarField> parents;
    for (const Particle& p : ensemble) {
        states.push_back(p.state);
        parents.push_back(p.parent);
    }
    ensembles::save_fields(dir, "member", states);
    ensembles::save_fields(dir, "parent", parents);
    spdlog::error("degenerate ensemble at window {}; state dumped to {}", window, dir.string());
}

}  // namespace

RunPaths::RunPaths(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path RunPaths::checkpoint_dir(int window) const {
    return checkpoints_dir() / fmt::format("window_{:04d}", window);
}

std::filesystem::path RunPaths::ranks_csv(Point p) const { return root_ / ("ranks_" + probe_tag(p.x, p.y) + ".csv"); }

std::filesystem::path RunPaths::trajectory_csv(Point p) const {
    return root_ / ("trajectory_" + probe_tag(p.x, p.y) + ".csv");
}

std::filesystem::path RunPaths::forecast_csv(long start_step) const {
    return root_ / fmt::format("forecast_{}.csv", start_step);
}

std::filesystem::path RunPaths::truth_file(int window) const {
    return truth_dir() / ensembles::member_file_name("truth", static_cast<std::size_t>(window), "sfld");
}

std::size_t station_at(const observations::StationSet& stations, Point p) {
    const auto coords = stations.coords();
    for (std::size_t s = 0; s < coords.size(); ++s) {
        if (std::abs(coords[s].x - p.x) <= 1e-12 && std::abs(coords[s].y - p.y) <= 1e-12) return s;
    }
    throw InputError(fmt::format("probe ({}, {}) is not a station of the {}x{} station grid", p.x, p.y,
                                 stations.per_side(), stations.per_side()));
}

SpinupSummary run_spinup(const ExperimentConfig& cfg, const RunPaths& paths) {
    cfg.validate();
    const auto params = cfg.fine_params();
    const long total = std::lround(cfg.spinup_time / params.dt);
    const long ratio = cfg.fine_steps_per_coarse();
    const long calib_span = static_cast<long>(cfg.calibration_snapshots - 1) * ratio;
    const long pool_span = static_cast<long>(cfg.pool_size) * cfg.pool_interval;
    require_parameter(total >= calib_span && total >= pool_span,
                      fmt::format("spinup_time covers {} fine steps; the pool needs {} and calibration needs {}",
                                  total, pool_span, calib_span));
    std::filesystem::create_directories(paths.root());
    std::filesystem::create_directories(paths.pool_dir());
    std::filesystem::create_directories(paths.calibration_dir());

    const auto observer = [&](long step, double, const ScalarField& omega) {
        const long before_end = total - step;
        if (before_end > 0 && before_end <= pool_span && before_end % cfg.pool_interval == 0) {
            const long k = cfg.pool_size - before_end / cfg.pool_interval;
            fields::save_scalar_field(paths.pool_dir() / ensembles::member_file_name("pool", k, "sfld"), omega);
        }
        if (before_end <= calib_span && before_end % ratio == 0) {
            const long k = (calib_span - before_end) / ratio;
            fields::save_scalar_field(paths.calibration_dir() / ensembles::member_file_name("snapshot", k, "sfld"),
                                      omega);
        }
    };
    spdlog::info("spin-up: {} fine steps of dt = {} on {}x{}", total, params.dt, cfg.fine_n, cfg.fine_n);
    const dynamics::SpinupResult result = dynamics::spinup(cfg.fine_grid(), params, cfg.spinup_time, observer);
    fields::save_scalar_field(paths.spinup_state(), result.omega);
    write_energy_csv(paths.energy_csv(), result.series);

    SpinupSummary summary;
    summary.final_time = result.series.back().time;
    summary.energy = result.series.back().energy;
    summary.trailing_energy_change =
        result.series.size() >= 2 ? dynamics::trailing_energy_change(result.series) : 0.0;
    summary.mean_speed = diagnostics::mean_speed(fields::velocity_of(result.omega));
    summary.eddy_turnover_time = summary.mean_speed > 0.0 ? diagnostics::eddy_turnover_time(summary.mean_speed) : kNaN;
    spdlog::info("spin-up done: E = {:.6g}, trailing change {:.3g}, mean speed {:.4g}, ett {:.4g}", summary.energy,
                 summary.trailing_energy_change, summary.mean_speed, summary.eddy_turnover_time);
    return summary;
}

std::vector<ScalarField> load_calibration_snapshots(const ExperimentConfig& cfg, const RunPaths& paths) {
    require_artifact(paths.calibration_dir(), "spinup");
    auto snaps = ensembles::load_fields(paths.calibration_dir(), "snapshot",
                                        static_cast<std::size_t>(cfg.calibration_snapshots));
    for (const auto& s : snaps) fields::require_same_grid(s.grid(), cfg.fine_grid(), "calibration snapshot");
    return snaps;
}

stochastic::EofResult run_calibrate_xi(const ExperimentConfig& cfg, const RunPaths& paths) {
    cfg.validate();
    const auto snaps = load_calibration_snapshots(cfg, paths);
    stochastic::EofResult eof =
        stochastic::calibrate_xi_detailed(snaps, cfg.coarse_grid(), cfg.coarse_params(), cfg.eof_fraction);
    stochastic::save_noise_basis(paths.noise_basis(), eof.basis);
    CsvWriter spectrum(paths.eof_spectrum_csv(), "mode,eigenvalue,cumulative_fraction,kept");
    double cumulative = 0.0;
    for (std::size_t k = 0; k < eof.eigenvalues.size(); ++k) {
        cumulative += eof.eigenvalues[k];
        spectrum.row(fmt::format("{},{},{},{}", k, eof.eigenvalues[k], cumulative / eof.total_variance,
                                 static_cast<int>(k) < eof.basis.modes() ? 1 : 0));
    }
    spdlog::info("calibrate-xi: kept {} of {} modes ({:.4f} of the variance)", eof.basis.modes(),
                 eof.eigenvalues.size(), eof.explained_fraction);
    return eof;
}

observations::ObsNoise run_calibrate_noise(const ExperimentConfig& cfg, const RunPaths& paths) {
    cfg.validate();
    const auto snaps = load_calibration_snapshots(cfg, paths);
    std::vector<VectorField> fine_velocities;
    fine_velocities.reserve(snaps.size());
    for (const auto& w : snaps) fine_velocities.push_back(fields::velocity_of(w));
    observations::ObsNoise noise = observations::calibrate_obs_noise(fine_velocities, cfg.coarse_grid(),
                                                                     stations_of(cfg), cfg.lambda, cfg.sigma_floor);
    observations::save_obs_noise(paths.obs_noise_csv(), noise);
    const auto [lo, hi] = std::minmax_element(noise.sigmas.begin(), noise.sigmas.end());
    spdlog::info("calibrate-noise: {} sigmas in [{:.4g}, {:.4g}]", noise.sigmas.size(), *lo, *hi);
    return noise;
}

ensembles::InitialEnsemble run_init_ensemble(const ExperimentConfig& cfg, const RunPaths& paths, const Executor& exec,
                                             std::optional<long> deformation_steps) {
    cfg.validate();
    require_artifact(paths.spinup_state(), "spinup");
    const ScalarField reference = fields::load_scalar_field(paths.spinup_state());
    ensembles::DeformationConfig dcfg{cfg.deformation_epsilon, deformation_steps.value_or(cfg.deformation_steps),
                                      load_pool(paths, cfg.pool_size)};
    ensembles::InitialEnsemble ensemble =
        ensembles::sample_initial_ensemble(dcfg, reference, cfg.filter.ensemble_size, root_key(cfg),
                                           cfg.fine_params(), cfg.coarse_grid(), exec);
    ensembles::save_ensemble(paths.ensemble_dir(), ensemble);
    return ensemble;
}

void run_truth(const ExperimentConfig& cfg, const RunPaths& paths) {
    cfg.validate();
    require_artifact(paths.spinup_state(), "spinup");
    const int windows = cfg.total_windows + cfg.forecast_horizon;
    const auto stations = stations_of(cfg);
    const auto noise = load_noise(cfg, paths);
    const StreamKey root = root_key(cfg);
    std::filesystem::create_directories(paths.truth_dir());
    const ScalarField reference = fields::load_scalar_field(paths.spinup_state());
    observations::ObservationLogWriter log(paths.observations_csv(), stations);

    const auto emit = [&](int w, const ScalarField& coarse_truth) {
        fields::save_scalar_field(paths.truth_file(w), coarse_truth);
        if (w == 0) return;
        const VectorField u = fields::velocity_of(coarse_truth);
        const long step = window_step(cfg, w);
        observations::Observation y =
            observations::observe(u, stations, noise, root.child(StreamPurpose::Observation).child(w));
        y.step = step;
        y.time = step_time(cfg, step);
        const auto clean = fields::sample_at(u, stations.coords());
        std::vector<double> flat;
        for (const auto& v : clean) {
            flat.push_back(v.x);
            flat.push_back(v.y);
        }
        log.write(y, flat);
    };

    if (cfg.scenario == Scenario::Perfect) {
        const stochastic::NoiseBasis basis = load_basis(cfg, paths);
        const auto pool = load_pool(paths, cfg.pool_size);
        RandomStream draw(root.child(StreamPurpose::Truth).child(0));
        const std::size_t pool_index = draw.index(pool.size());
        const double beta = draw.normal(0.0, std::sqrt(cfg.deformation_epsilon));
        ScalarField state = ensembles::deform(reference, fields::poisson_solve(pool[pool_index]), beta,
                                              cfg.deformation_steps, cfg.fine_params(), cfg.coarse_grid());
        spdlog::info("truth (perfect): SPDE path from deformation draw beta = {:.4f}, pool member {}", beta,
                     pool_index);
        emit(0, state);
        for (int w = 1; w <= windows; ++w) {
            RandomStream rng(root.child(StreamPurpose::Truth).child(1).child(w));
            const auto path = basis.modes() == 0
                                  ? stochastic::PathIncrements(0, cfg.assimilation_interval)
                                  : stochastic::brownian_increments(rng, basis.modes(), cfg.assimilation_interval,
                                                                    cfg.dt_coarse);
            state = stochastic::propagate_window(state, path, basis, cfg.coarse_params());
            require_input(state.all_finite(), fmt::format("truth SPDE run diverged at window {}", w));
            emit(w, state);
        }
    } else {
        const auto params = cfg.fine_params();
        const long fine_steps = static_cast<long>(cfg.assimilation_interval) * cfg.fine_steps_per_coarse();
        ScalarField fine = reference;
        spdlog::info("truth (imperfect): fine PDE, {} fine steps per window", fine_steps);
        emit(0, fields::coarse_grain_vorticity(fine, cfg.coarse_grid()));
        for (int w = 1; w <= windows; ++w) {
            for (long s = 0; s < fine_steps; ++s) fine = dynamics::ssprk3_step(fine, params);
            require_input(fine.all_finite(), fmt::format("truth PDE run diverged at window {}", w));
            emit(w, fields::coarse_grain_vorticity(fine, cfg.coarse_grid()));
        }
    }
}

AssimilationResult run_assimilation(const ExperimentConfig& cfg, const RunPaths& paths, const Executor& exec,
                                    bool resume) {
    cfg.validate();
    const SaltPropagator prop = make_propagator(cfg, paths);
    const auto stations = stations_of(cfg);
    const auto n = static_cast<std::size_t>(cfg.filter.ensemble_size);
    const StreamKey root = root_key(cfg);

    require_artifact(paths.observations_csv(), "truth");
    require_artifact(paths.ensemble_dir(), "init-ensemble");
    const auto logged = observations::load_observation_log(paths.observations_csv(), stations);
    require_input(logged.size() >= static_cast<std::size_t>(cfg.total_windows),
                  "observation log shorter than total_windows");
    std::vector<std::size_t> probe_station;
    for (const Point& p : cfg.probes) probe_station.push_back(station_at(stations, p));

    CheckpointState state;
    std::optional<int> resumed;
    if (resume) resumed = latest_checkpoint(paths, cfg.total_windows);
    if (resumed) {
        state = load_checkpoint(paths, *resumed, n);
        for (Particle& p : state.particles) p.loglike = 0.0;
        const long last = window_step(cfg, *resumed);
        for (const auto& f : {paths.diagnostics_csv(), paths.step_diagnostics_csv()}) truncate_csv_after_step(f, last);
        for (const Point& p : cfg.probes) {
            truncate_csv_after_step(paths.ranks_csv(p), last);
            truncate_csv_after_step(paths.trajectory_csv(p), last);
        }
        spdlog::info("resuming from checkpoint at window {}", *resumed);
    } else {
        const ensembles::InitialEnsemble initial = ensembles::load_ensemble(paths.ensemble_dir());
        require_input(initial.members.size() == n, "initial ensemble size differs from filter.ensemble_size");
        for (const ScalarField& m : initial.members) {
            fields::require_same_grid(m.grid(), cfg.coarse_grid(), "initial ensemble");
            state.particles.push_back(Particle{m, stochastic::PathIncrements(prop.basis().modes(),
                                                                              cfg.assimilation_interval),
                                               m, 0.0, 0.0});
        }
        state.prior = initial.members;
    }
    const bool append = resumed.has_value();

    const int shown = std::min<int>(cfg.trajectory_members, static_cast<int>(n));
    std::string trajectory_header = "step,truth,truth_plus_noise,posterior_mean,prior_mean";
    for (int k = 0; k < shown; ++k) trajectory_header += fmt::format(",member_{}", k);

    CsvWriter diag_out(paths.diagnostics_csv(), kDiagnosticsHeader, append);
    CsvWriter step_out(paths.step_diagnostics_csv(), kStepDiagnosticsHeader, append);
    std::vector<CsvWriter> rank_out;
    std::vector<CsvWriter> traj_out;
    for (const Point& p : cfg.probes) {
        rank_out.emplace_back(paths.ranks_csv(p), kRanksHeader, append);
        traj_out.emplace_back(paths.trajectory_csv(p), trajectory_header, append);
    }

    AssimilationResult result;
    const auto posterior_states = [&] {
        std::vector<ScalarField> out;
        out.reserve(n);
        for (const Particle& p : state.particles) out.push_back(p.state);
        return out;
    };
    // Trajectory rows hold u_x at each probe; obs is null before the first window.
    const auto write_trajectories = [&](long step, const VectorField& truth_u, const std::vector<double>* obs,
                                        const std::vector<VectorField>& post, const std::vector<VectorField>& prior) {
        for (std::size_t k = 0; k < cfg.probes.size(); ++k) {
            const Point p = cfg.probes[k];
            const double noisy = obs != nullptr ? (*obs)[2 * probe_station[k]] : kNaN;
            std::string row = fmt::format("{},{},{},{},{}", step, probe_ux(truth_u, p), noisy, probe_mean(post, p),
                                          probe_mean(prior, p));
            for (int m = 0; m < shown; ++m) row += fmt::format(",{}", probe_ux(post[static_cast<std::size_t>(m)], p));
            traj_out[k].row(row);
        }
    };

    if (!resumed) {
        require_artifact(paths.truth_file(0), "truth");
        const VectorField truth_u = fields::velocity_of(fields::load_scalar_field(paths.truth_file(0)));
        const auto post = velocities(posterior_states(), exec);
        const double r0 = diagnostics::rmse(diagnostics::ensemble_mean(post), truth_u);
        const double s0 = n >= 2 ? diagnostics::spread(post) : 0.0;
        diagnostics::DiagnosticsRecord rec{0, 0.0, r0, r0, kNaN, r0, s0, s0, s0, static_cast<double>(n), 0, 0};
        diag_out.row(diagnostics_row(rec));
        result.records.push_back(rec);
        write_trajectories(0, truth_u, nullptr, post, post);
        if (cfg.checkpoint_every > 0) save_checkpoint(paths, state);
    }

    for (int w = state.window + 1; w <= cfg.total_windows; ++w) {
        const auto& obs = logged[static_cast<std::size_t>(w - 1)];
        const long step = window_step(cfg, w);
        require_input(obs.observation.step == step,
                      fmt::format("observation log step {} does not match window {}", obs.observation.step, w));
        require_artifact(paths.truth_file(w), "truth");
        const VectorField truth_u = fields::velocity_of(fields::load_scalar_field(paths.truth_file(w)));

        std::vector<ScalarField> forecast;
        filtering::StepDiagnostics sd;
        try {
            sd = filtering::assimilate_step(state.particles, obs.observation, prop, cfg.filter,
                                            filtering::AssimilationKeys{root.child(StreamPurpose::Filter).child(w)},
                                            exec, &forecast);
        } catch (const DegenerateEnsembleError&) {
            dump_degenerate(paths, w, state.particles);
            throw;
        }
        exec.for_each(n, [&](std::size_t k) {
            RandomStream rng(root.child(StreamPurpose::PriorEnsemble).child(w).child(k));
            state.prior[k] = prop.propagate(state.prior[k], prop.fresh_path(rng));
        });
        state.window = w;

        const auto post = velocities(posterior_states(), exec);
        const auto fc = velocities(forecast, exec);
        const auto pri = velocities(state.prior, exec);
        const VectorField fc_mean = diagnostics::ensemble_mean(fc);
        const observations::ObservationOperator h(cfg.coarse_grid(), stations);

        diagnostics::DiagnosticsRecord rec;
        rec.step = step;
        rec.time = step_time(cfg, step);
        rec.rmse_posterior = diagnostics::rmse(diagnostics::ensemble_mean(post), truth_u);
        rec.rmse_forecast = diagnostics::rmse(fc_mean, truth_u);
        rec.rmse_forecast_vs_noisyobs = station_rmse(h.apply(fc_mean), obs.observation.values);
        rec.rmse_prior = diagnostics::rmse(diagnostics::ensemble_mean(pri), truth_u);
        rec.spread_posterior = n >= 2 ? diagnostics::spread(post) : 0.0;
        rec.spread_forecast = n >= 2 ? diagnostics::spread(fc) : 0.0;
        rec.spread_prior = n >= 2 ? diagnostics::spread(pri) : 0.0;
        rec.ess = sd.ess_final();
        rec.n_temperatures = sd.n_temperatures();
        rec.propagator_evals = sd.propagator_evals;
        diag_out.row(diagnostics_row(rec));
        step_out.row(step_diagnostics_row(step, rec.time, sd));
        result.records.push_back(rec);

        for (std::size_t k = 0; k < cfg.probes.size(); ++k) {
            const Point p = cfg.probes[k];
            const std::size_t s = probe_station[k];
            const double y = obs.observation.values[2 * s];
            const double sigma = prop.noise().sigmas[2 * s];
            RandomStream rng(root.child(StreamPurpose::RankTies).child(w).child(k));
            std::vector<double> values(n);
            for (std::size_t m = 0; m < n; ++m) values[m] = probe_ux(fc[m], p) + sigma * rng.normal();
            rank_out[k].row(fmt::format("{},{}", step, diagnostics::rank(y, values, rng)));
        }
        write_trajectories(step, truth_u, &obs.observation.values, post, pri);
        result.steps.push_back(sd);
        spdlog::info("window {}/{}: rmse post {:.4g} prior {:.4g}, {} temperatures, {} evals", w, cfg.total_windows,
                     rec.rmse_posterior, rec.rmse_prior, rec.n_temperatures, rec.propagator_evals);

        if (cfg.checkpoint_every > 0 && (w % cfg.checkpoint_every == 0 || w == cfg.total_windows)) {
            save_checkpoint(paths, state);
        }
    }
    return result;
}

std::vector<diagnostics::ForecastPoint> run_forecast(const ExperimentConfig& cfg, const RunPaths& paths,
                                                     const Executor& exec, std::optional<int> window) {
    cfg.validate();
    const SaltPropagator prop = make_propagator(cfg, paths);
    const int w0 = window ? *window : latest_checkpoint(paths, std::numeric_limits<int>::max()).value_or(-1);
    require_input(w0 >= 0, "no assimilation checkpoint to forecast from (run `assimilate` first)");
    const auto n = static_cast<std::size_t>(cfg.filter.ensemble_size);
    const CheckpointState state = load_checkpoint(paths, w0, n);
    std::vector<ScalarField> members;
    for (const Particle& p : state.particles) members.push_back(p.state);

    std::vector<VectorField> truth;
    for (int j = 1; j <= cfg.forecast_horizon; ++j) {
        const auto file = paths.truth_file(w0 + j);
        require_input(std::filesystem::exists(file),
                      fmt::format("forecast horizon exceeds the truth run at window {}", w0 + j));
        truth.push_back(fields::velocity_of(fields::load_scalar_field(file)));
    }
    const StreamKey key = root_key(cfg).child(StreamPurpose::Forecast).child(w0);
    std::vector<diagnostics::ForecastPoint> curve;
    for (int j = 1; j <= cfg.forecast_horizon; ++j) {
        exec.for_each(n, [&](std::size_t m) {
            RandomStream rng(key.child(j).child(m));
            members[m] = prop.propagate(members[m], prop.fresh_path(rng));
        });
        const auto u = velocities(members, exec);
        curve.push_back({j, diagnostics::rmse(diagnostics::ensemble_mean(u), truth[static_cast<std::size_t>(j - 1)]),
                         n >= 2 ? diagnostics::spread(u) : 0.0});
    }
    CsvWriter out(paths.forecast_csv(window_step(cfg, w0)), kForecastHeader);
    for (const auto& p : curve) out.row(forecast_row(p));
    return curve;
}

DiagnoseSummary run_diagnose(const ExperimentConfig& cfg, const RunPaths& paths) {
    cfg.validate();
    DiagnoseSummary summary;
    const int n = cfg.filter.ensemble_size;
    CsvWriter out(paths.rank_summary_csv(), "probe_x,probe_y,samples,chi2,critical_value,rejected,enough_samples");
    for (const Point& p : cfg.probes) {
        require_artifact(paths.ranks_csv(p), "assimilate");
        std::vector<int> ranks;
        for (const auto& [step, r] : read_ranks_csv(paths.ranks_csv(p))) ranks.push_back(r);
        ProbeRankSummary s{p, diagnostics::rank_histogram_chi2(ranks, n), ranks.size()};
        out.row(fmt::format("{},{},{},{},{},{},{}", p.x, p.y, s.samples, s.histogram.chi2, s.histogram.critical_value,
                            s.histogram.rejected ? 1 : 0, s.histogram.enough_samples ? 1 : 0));
        summary.probes.push_back(std::move(s));
    }
    require_artifact(paths.diagnostics_csv(), "assimilate");
    const auto records = read_diagnostics_csv(paths.diagnostics_csv());
    std::size_t better = 0;
    for (const auto& r : records) {
        if (r.step <= window_step(cfg, 5)) continue;
        ++summary.windows;
        if (r.rmse_posterior < r.rmse_prior) ++better;
    }
    summary.fraction_posterior_better =
        summary.windows == 0 ? kNaN : static_cast<double>(better) / static_cast<double>(summary.windows);
    return summary;
}

std::vector<KalmanCheckRow> kalman_check(const filtering::LinearGaussianModel& model,
                                         const filtering::FilterConfig& filter, int steps, std::uint64_t seed,
                                         const Executor& exec) {
    model.validate();
    filter.validate();
    const StreamKey root(seed);
    RandomStream sim(root.child(StreamPurpose::Truth));
    const auto run = filtering::simulate_linear_gaussian(model, steps, sim);
    const auto kalman = filtering::kalman_filter(model, run.observations);

    using P = filtering::LinearGaussianPropagator;
    const P prop{model};
    std::vector<filtering::Particle<double, double>> ensemble(static_cast<std::size_t>(filter.ensemble_size));
    RandomStream init(root.child(StreamPurpose::PriorEnsemble));
    for (auto& p : ensemble) {
        p.state = init.normal(model.m0, std::sqrt(model.P0));
        p.parent = p.state;
    }
    std::vector<KalmanCheckRow> rows;
    for (int k = 0; k < steps; ++k) {
        const auto sd = filtering::assimilate_step(ensemble, run.observations[static_cast<std::size_t>(k)], prop, filter,
                                                   filtering::AssimilationKeys{root.child(StreamPurpose::Filter).child(k)},
                                                   exec);
        double mean = 0.0;
        for (const auto& p : ensemble) mean += p.state;
        mean /= static_cast<double>(ensemble.size());
        double var = 0.0;
        for (const auto& p : ensemble) var += (p.state - mean) * (p.state - mean);
        var /= static_cast<double>(ensemble.size() - 1);
        KalmanCheckRow row;
        row.step = k + 1;
        row.kalman_mean = kalman[static_cast<std::size_t>(k)].mean;
        row.kalman_variance = kalman[static_cast<std::size_t>(k)].variance;
        row.filter_mean = mean;
        row.filter_variance = var;
        row.n_eff = sd.ess_full_update;
        row.mean_ok = std::abs(mean - row.kalman_mean) <= 3.0 * std::sqrt(row.kalman_variance / row.n_eff);
        row.variance_ok = std::abs(var - row.kalman_variance) <= 0.1 * row.kalman_variance;
        rows.push_back(row);
    }
    return rows;
}

void write_kalman_check(const std::filesystem::path& path, const std::vector<KalmanCheckRow>& rows) {
    CsvWriter out(path, "step,kalman_mean,kalman_variance,filter_mean,filter_variance,n_eff,mean_ok,variance_ok");
    for (const auto& r : rows) {
        out.row(fmt::format("{},{},{},{},{},{},{},{}", r.step, r.kalman_mean, r.kalman_variance, r.filter_mean,
                            r.filter_variance, r.n_eff, r.mean_ok ? 1 : 0, r.variance_ok ? 1 : 0));
    }
}

}  // namespace saltda::experiments
