#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "saltda/dynamics/euler.hpp"
#include "saltda/experiments/salt_model.hpp"
#include "saltda/fields/elliptic.hpp"
#include "saltda/filtering/particle_filter.hpp"

using namespace saltda;
using fields::BoundaryCondition;
using fields::Grid;
using fields::ScalarField;

namespace {

ScalarField smooth_field(const Grid& g) {
    using std::numbers::pi;
    return ScalarField::sample(g, BoundaryCondition::DirichletZero, [](double x, double y) {
        return std::sin(pi * x) * std::sin(2 * pi * y) + 0.3 * std::sin(3 * pi * x) * std::sin(pi * y);
    });
}

experiments::SaltPropagator coarse_propagator(const Grid& g, int modes) {
    std::vector<ScalarField> zetas;
    std::vector<double> spectrum;
    for (int k = 1; k <= modes; ++k) {
        using std::numbers::pi;
        zetas.push_back(ScalarField::sample(g, BoundaryCondition::DirichletZero, [k](double x, double y) {
            return 0.01 * std::sin(k * pi * x) * std::sin(pi * y);
        }));
        spectrum.push_back(1.0 / k);
    }
    const observations::StationSet stations(9);
    observations::ObsNoise noise;
    noise.sigmas.assign(stations.observation_size(), 0.05);
    return {stochastic::NoiseBasis(g, zetas, spectrum), dynamics::ModelParams{}, 5, stations, noise};
}

}  // namespace

static void BM_PoissonSolve(benchmark::State& state) {
    const Grid g(static_cast<int>(state.range(0)));
    const ScalarField f = smooth_field(g);
    for (auto _ : state) benchmark::DoNotOptimize(fields::poisson_solve(f));
}
BENCHMARK(BM_PoissonSolve)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

static void BM_EulerStep(benchmark::State& state) {
    const Grid g(static_cast<int>(state.range(0)));
    dynamics::ModelParams p;
    p.dt = 0.005;
    ScalarField w = fields::discrete_laplacian(smooth_field(g));
    for (auto _ : state) {
        w = dynamics::ssprk3_step(w, p);
        benchmark::DoNotOptimize(w);
    }
}
BENCHMARK(BM_EulerStep)->Arg(32)->Arg(128);

static void BM_SaltWindow(benchmark::State& state) {
    const Grid g(32);
    const auto prop = coarse_propagator(g, static_cast<int>(state.range(0)));
    const ScalarField w = fields::discrete_laplacian(smooth_field(g));
    RandomStream rng(StreamKey(1));
    for (auto _ : state) benchmark::DoNotOptimize(prop.propagate(w, prop.fresh_path(rng)));
}
BENCHMARK(BM_SaltWindow)->Arg(4)->Arg(16);

static void BM_AssimilateStep(benchmark::State& state) {
    const Grid g(32);
    const auto prop = coarse_propagator(g, 8);
    const ScalarField w0 = fields::discrete_laplacian(smooth_field(g));
    filtering::FilterConfig cfg;
    cfg.ensemble_size = static_cast<int>(state.range(0));
    observations::Observation y;
    y.values = prop.observe_clean(w0);
    const Executor exec(1);
    std::uint64_t window = 0;
    for (auto _ : state) {
        using P = filtering::Particle<ScalarField, stochastic::PathIncrements>;
        std::vector<P> ens(static_cast<std::size_t>(cfg.ensemble_size), P{w0, {}, w0});
        benchmark::DoNotOptimize(filtering::assimilate_step(ens, y, prop, cfg, {StreamKey(2, {window++})}, exec));
    }
}
BENCHMARK(BM_AssimilateStep)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
