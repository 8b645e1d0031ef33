#include <doctest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "saltda/errors.hpp"
#include "saltda/experiments/config.hpp"
#include "saltda/experiments/csv.hpp"
#include "saltda/experiments/pipeline.hpp"
#include "saltda/experiments/salt_model.hpp"
#include "saltda/fields/elliptic.hpp"
#include "test_support.hpp"

using namespace saltda;
using namespace saltda::experiments;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig tiny_config() {
    return parse(
        "[grid]\nfine_n = 16\ncoarse_n = 8\n"
        "[filter]\nensemble_size = 6\n"
        "[observations]\nstations_s = 3\nprobes = 0.5 0.5\n"
        "[experiment]\nspinup_time = 2\npool_size = 3\npool_interval = 20\ncalibration_snapshots = 8\n"
        "total_windows = 4\nforecast_horizon = 2\ncheckpoint_every = 2\ndeformation_steps = 4\n"
        "trajectory_members = 2\n");
}

}  // namespace

TEST_CASE("config defaults") {
    const ExperimentConfig c = parse("");
    CHECK(c.a == 0.1);
    CHECK(c.b == 8);
    CHECK(c.r == 0.01);
    CHECK(c.fine_n == 128);
    CHECK(c.coarse_n == 32);
    CHECK(c.fine_steps_per_coarse() == 4);
    CHECK(c.stations_s == 9);
    CHECK(c.lambda == 0.6);
    CHECK(c.filter.ess_threshold_fraction == 0.8);
    CHECK(c.filter.rho == 0.9995);
    CHECK(c.probes.size() == 9);
    CHECK(c.window_length() == doctest::Approx(0.1));
}

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse(
        "[model]\nr = 0.02\nabort_on_cfl = yes\n[filter]\nensemble_size = 50\ncache_states = true\n"
        "[observations]\nprobes = 0.1 0.2; 0.3 0.4\n[experiment]\nscenario = imperfect\nseed = 42\n");
    CHECK(c.r == 0.02);
    CHECK(c.abort_on_cfl);
    CHECK(c.filter.ensemble_size == 50);
    CHECK(c.filter.cache_states);
    REQUIRE(c.probes.size() == 2);
    CHECK(c.probes[1] == fields::Point{0.3, 0.4});
    CHECK(c.scenario == Scenario::Imperfect);
    CHECK(c.seed == 42);

    CHECK_THROWS_AS(parse("[model]\nalpha = 1\n"), ParameterError);
    CHECK_THROWS_AS(parse("[solver]\nx = 1\n"), ParameterError);
    CHECK_THROWS_AS(parse("a = 1\n"), ParameterError);
    CHECK_THROWS_AS(parse("[model]\nr = fast\n"), ParameterError);
    CHECK_THROWS_AS(parse("[model]\nr = 0\n"), ParameterError);
    CHECK_THROWS_AS(parse("[grid]\nfine_n = 100\n"), ParameterError);
    CHECK_THROWS_AS(parse("[grid]\ndt_coarse = 0.013\n"), ParameterError);
    CHECK_THROWS_AS(parse("[experiment]\nscenario = perfectish\n"), ParameterError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ParameterError);
}

TEST_CASE("config round trip through format_config") {
    ExperimentConfig c;
    c.a = 0.123456789;
    c.filter.rho = 0.75;
    c.filter.final_resample_always = false;
    c.probes = {{0.125, 0.875}};
    c.noise_scale = 2.5;
    c.scenario = Scenario::Imperfect;
    const ExperimentConfig back = parse(format_config(c));
    CHECK(format_config(back) == format_config(c));
    CHECK(back.a == c.a);
    CHECK_FALSE(back.filter.final_resample_always);
}

TEST_CASE("csv helpers") {
    const auto dir = testing::scratch_dir("csv");
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(std::stod(fmt_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(probe_tag(0.25, 0.75) == "0.25_0.75");

    diagnostics::DiagnosticsRecord r;
    r.step = 5;
    r.time = 0.1;
    r.rmse_posterior = 1.0 / 7.0;
    r.ess = 19.5;
    r.n_temperatures = 3;
    r.propagator_evals = 123;
    {
        CsvWriter w(dir / "diag.csv", kDiagnosticsHeader);
        w.row(diagnostics_row(r));
        r.step = 10;
        w.row(diagnostics_row(r));
        r.step = 15;
        w.row(diagnostics_row(r));
    }
    const auto rows = read_diagnostics_csv(dir / "diag.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rmse_posterior == 1.0 / 7.0);
    CHECK(rows[2].propagator_evals == 123);

    truncate_csv_after_step(dir / "diag.csv", 10);
    CHECK(read_diagnostics_csv(dir / "diag.csv").size() == 2);
    {
        CsvWriter w(dir / "diag.csv", kDiagnosticsHeader, true);
        w.row(diagnostics_row(r));
    }
    const std::string text = slurp(dir / "diag.csv");
    CHECK(text.find(kDiagnosticsHeader) == 0);
    CHECK(text.find(kDiagnosticsHeader, 1) == std::string::npos);
    CHECK(read_diagnostics_csv(dir / "diag.csv").size() == 3);

    std::ofstream(dir / "ranks.csv") << kRanksHeader << "\n5,3\n10,0\n";
    const auto ranks = read_ranks_csv(dir / "ranks.csv");
    REQUIRE(ranks.size() == 2);
    CHECK(ranks[1] == std::pair<long, int>{10, 0});
}

TEST_CASE("station lookup") {
    const observations::StationSet s(3);
    CHECK(station_at(s, {0.5, 0.5}) == 4);
    CHECK(station_at(s, {1.0, 0.0}) == 2);
    CHECK_THROWS_AS(station_at(s, {0.3, 0.3}), InputError);
}

TEST_CASE("SALT propagator") {
    const fields::Grid g(8);
    RandomStream rng(StreamKey(23, {1}));
    std::vector<ScalarField> zetas{testing::random_sine_field(g, rng), testing::random_sine_field(g, rng)};
    const stochastic::NoiseBasis basis(g, zetas, {1.0, 0.5});
    const observations::StationSet stations(3);
    observations::ObsNoise noise;
    noise.sigmas.assign(stations.observation_size(), 0.2);
    const SaltPropagator prop(basis, dynamics::ModelParams{}, 5, stations, noise);
    const ScalarField w0 = fields::discrete_laplacian(testing::random_sine_field(g, rng));

    const auto path = prop.fresh_path(rng);
    CHECK(path.m == 2);
    CHECK(path.n_sub == 5);
    CHECK(prop.blend(path, prop.fresh_path(rng), 1.0).dW == path.dW);
    CHECK(prop.propagate(w0, path) == prop.propagate(w0, path));

    SUBCASE("a zero path is the deterministic model") {
        const stochastic::PathIncrements zero(2, 5);
        ScalarField w = w0;
        for (int k = 0; k < 5; ++k) w = dynamics::ssprk3_step(w, dynamics::ModelParams{});
        CHECK(testing::max_abs_diff(prop.propagate(w0, zero), w) <= 1e-13 * testing::max_abs(w));
    }
    SUBCASE("likelihood of its own clean observation is zero") {
        observations::Observation y;
        y.values = prop.observe_clean(w0);
        CHECK(prop.log_likelihood(w0, y) == 0.0);
    }
}

TEST_CASE("tiny pipeline: resume reproduces an uninterrupted run") {
    const ExperimentConfig cfg = tiny_config();
    const auto dir = testing::scratch_dir("pipeline");
    const RunPaths paths(dir / "run");
    const Executor exec(1);
    const SpinupSummary s = run_spinup(cfg, paths);
    CHECK(s.final_time == doctest::Approx(2.0));
    const auto eof = run_calibrate_xi(cfg, paths);
    CHECK(eof.explained_fraction >= cfg.eof_fraction);
    const auto noise = run_calibrate_noise(cfg, paths);
    CHECK(noise.sigmas.size() == 18);
    run_init_ensemble(cfg, paths, exec);
    run_truth(cfg, paths);
    const AssimilationResult full = run_assimilation(cfg, paths, exec);
    REQUIRE(full.records.size() == 5);
    REQUIRE(full.steps.size() == 4);
    for (const auto& st : full.steps) CHECK(st.temperatures.back() == 1.0);
    const std::string diag = slurp(paths.diagnostics_csv());
    const std::string steps = slurp(paths.step_diagnostics_csv());

    // Drop the last checkpoint so the resumed run redoes windows 3 and 4.
    std::filesystem::remove_all(paths.checkpoint_dir(4));
    const AssimilationResult resumed = run_assimilation(cfg, paths, exec, true);
    CHECK(resumed.steps.size() == 2);
    CHECK(slurp(paths.diagnostics_csv()) == diag);
    CHECK(slurp(paths.step_diagnostics_csv()) == steps);

    const auto curve = run_forecast(cfg, paths, exec);
    CHECK(curve.size() == 2);
    const DiagnoseSummary d = run_diagnose(cfg, paths);
    CHECK(d.probes.size() == 1);
}

TEST_CASE("kalman check on a short run") {
    filtering::FilterConfig f;
    f.ensemble_size = 2000;
    const auto rows = kalman_check(filtering::LinearGaussianModel{0.9, 0.5, 1.0, 0.5, 0.0, 1.0}, f, 5, 3, Executor(1));
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        CHECK(r.mean_ok);
        CHECK(r.variance_ok);
        CHECK(r.n_eff > 0.0);
    }
}
