#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "saltda/errors.hpp"
#include "saltda/filtering/kalman.hpp"
#include "saltda/filtering/particle_filter.hpp"
#include "saltda/filtering/weights.hpp"
#include "saltda/parallel.hpp"

using namespace saltda;
using namespace saltda::filtering;

namespace {

using LgParticle = Particle<double, double>;

/// ESS computed independently of the library: log-sum-exp by hand.
double oracle_ess(const std::vector<double>& ll, double dphi) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : ll) mx = std::max(mx, dphi * v);
    double s1 = 0.0;
    double s2 = 0.0;
    for (double v : ll) {
        const double e = std::exp(dphi * v - mx);
        s1 += e;
        s2 += e * e;
    }
    return s1 * s1 / s2;
}

struct FlatLikelihood {
    using State = double;
    using Path = double;
    using Observation = double;
    LinearGaussianPropagator inner;
    [[nodiscard]] State propagate(State x, Path w) const { return inner.propagate(x, w); }
    [[nodiscard]] Path fresh_path(RandomStream& rng) const { return inner.fresh_path(rng); }
    [[nodiscard]] Path blend(Path w, Path z, double rho) const { return inner.blend(w, z, rho); }
    [[nodiscard]] double log_likelihood(State, Observation) const { return -3.0; }
};

std::vector<LgParticle> prior_ensemble(std::size_t n, double mean, double sd, std::uint64_t seed) {
    std::vector<LgParticle> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(StreamKey(seed, {i}));
        out[i].state = rng.normal(mean, sd);
    }
    return out;
}

/// Solves the symmetric positive definite system S x = b by Cholesky.
std::vector<double> spd_solve(std::vector<double> s, std::vector<double> b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = s[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= s[j * n + k] * s[j * n + k];
        s[j * n + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= s[i * n + k] * s[j * n + k];
            s[i * n + j] = v / s[j * n + j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= s[i * n + k] * b[k];
        b[i] /= s[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= s[k * n + i] * b[k];
        b[i] /= s[i * n + i];
    }
    return b;
}

}  // namespace

TEST_CASE("normalised weights") {
    const std::vector<double> equal(5, -2.0);
    for (double w : normalize_logweights(equal)) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));

    const std::vector<double> a{0.1, -3.0, 2.0, 0.5};
    std::vector<double> b = a;
    for (double& v : b) v += 1234.5;
    const auto wa = normalize_logweights(a);
    const auto wb = normalize_logweights(b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(wa[i] - wb[i]) <= 1e-13);

    const auto w3 = normalize_logweights(std::vector<double>{0.0, std::log(3.0)});
    CHECK(w3[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w3[1] == doctest::Approx(0.75).epsilon(1e-15));

    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(normalize_logweights(std::vector<double>{ninf, ninf}), DegenerateEnsembleError);
}

TEST_CASE("effective sample size examples") {
    CHECK(ess(std::vector<double>(8, 0.125)) == 8.0);
    CHECK(ess(std::vector<double>{0.0, 1.0, 0.0}) == 1.0);
    CHECK(ess(std::vector<double>{0.5, 0.5, 0.0, 0.0}) == 2.0);
    CHECK_THROWS_AS(ess(std::vector<double>{0.5, 0.6}), InputError);
}

TEST_CASE("next temperature") {
    SUBCASE("equal log-likelihoods go straight to one") {
        CHECK(find_next_temperature(std::vector<double>(10, -4.0), 0.0, 8.0) == 1.0);
    }
    SUBCASE("two particles against the closed form and a grid scan") {
        const std::vector<double> ll{0.0, -10.0};
        const double phi = find_next_temperature(ll, 0.0, 1.6);
        auto closed = [](double p) { return std::pow(1 + std::exp(-10 * p), 2) / (1 + std::exp(-20 * p)); };
        CHECK(closed(phi) >= 1.6 - 1e-6);
        CHECK(closed(phi) <= 1.6 + 1e-3);
        double scan = 0.0;
        for (int k = 1; k <= 100'000; ++k) {
            const double p = k / 1e5;
            if (closed(p) < 1.6) break;
            scan = p;
        }
        CHECK(std::fabs(phi - scan) <= 1e-3);
    }
    SUBCASE("gentle likelihoods near the end accept one") {
        const std::vector<double> ll{-0.1, -0.2, -0.15, -0.12};
        CHECK(find_next_temperature(ll, 0.999, 3.2) == 1.0);
    }
    SUBCASE("random vectors against a dense grid scan") {
        RandomStream rng(StreamKey(13, {1}));
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 20 + rng.index(60);
            const double scale = 1.0 + 20.0 * rng.uniform();
            std::vector<double> ll(n);
            for (double& v : ll) {
                const double z = scale * rng.normal();
                v = -0.5 * z * z;
            }
            const double threshold = 0.8 * static_cast<double>(n);
            const double phi = find_next_temperature(ll, 0.0, threshold);
            double scan = 0.0;
            for (int k = 1; k <= 100'000; ++k) {
                const double p = k / 1e5;
                if (oracle_ess(ll, p) < threshold) break;
                scan = p;
            }
            CHECK(std::fabs(phi - scan) <= 1e-3);
            CHECK(oracle_ess(ll, phi) >= threshold * (1 - 1e-12));
        }
    }
    SUBCASE("all particles impossible") {
        const double ninf = -std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(find_next_temperature(std::vector<double>{ninf, ninf}, 0.0, 1.0), DegenerateEnsembleError);
    }
}

TEST_CASE("systematic resampling") {
    SUBCASE("uniform weights keep every index once") {
        for (std::size_t n = 1; n <= 16; ++n) {
            const std::vector<double> w(n, 1.0 / static_cast<double>(n));
            for (int k = 0; k < 64; ++k) {
                const double u = (k / 64.0) / static_cast<double>(n);
                std::vector<std::size_t> idx = resample_systematic_with_offset(w, u);
                std::vector<std::size_t> expected(n);
                std::iota(expected.begin(), expected.end(), 0);
                CHECK(idx == expected);
            }
        }
    }
    SUBCASE("a point mass is copied everywhere") {
        RandomStream rng(StreamKey(13, {2}));
        const auto idx = resample_systematic(std::vector<double>{0.0, 0.0, 1.0, 0.0}, rng);
        CHECK(idx == std::vector<std::size_t>(4, 2));
    }
    SUBCASE("unbiased counts") {
        RandomStream rng(StreamKey(13, {3}));
        const std::size_t n = 10;
        std::vector<double> w(n);
        for (double& v : w) v = rng.uniform() + 0.05;
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& v : w) v /= total;
        const int reps = 10'000;
        std::vector<double> mean(n, 0.0);
        std::vector<double> sq(n, 0.0);
        for (int r = 0; r < reps; ++r) {
            std::vector<double> c(n, 0.0);
            for (std::size_t i : resample_systematic(w, rng)) c[i] += 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                mean[i] += c[i];
                sq[i] += c[i] * c[i];
            }
            for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(c[i] - n * w[i]) < 1.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double m = mean[i] / reps;
            const double var = std::max(sq[i] / reps - m * m, 1e-12);
            CHECK(std::fabs(m - n * w[i]) <= 3.0 * std::sqrt(var / reps) + 1e-12);
        }
    }
}

TEST_CASE("jitter") {
    const LinearGaussianPropagator prop{{0.9, 0.5, 1.0, 0.25, 0.0, 1.0}};
    FilterConfig cfg;
    RandomStream rng(StreamKey(13, {4}));
    LgParticle p;
    p.parent = 0.3;
    p.path = 0.8;
    p.state = prop.propagate(p.parent, p.path);
    const double y = 1.1;
    p.loglike = prop.log_likelihood(p.state, y);

    SUBCASE("rho = 1 is the identity") {
        cfg.rho = 1.0;
        LgParticle q = p;
        const JitterStats s = jitter(q, prop, y, 0.7, cfg, rng);
        CHECK(s.accepted == cfg.mcmc_steps);
        CHECK(q.state == p.state);
        CHECK(q.path == p.path);
        CHECK(q.parent == p.parent);
    }
    SUBCASE("zero steps leave the particle alone") {
        cfg.mcmc_steps = 0;
        LgParticle q = p;
        CHECK(jitter(q, prop, y, 0.7, cfg, rng).proposals == 0);
        CHECK(q.state == p.state);
    }
    SUBCASE("tempered posterior is preserved") {
        // Conditional law of the path given the parent is Gaussian with
        // precision 1 + φH²Q/R; sample it exactly and jitter.
        const double phi = 0.6;
        const auto& m = prop.model;
        const double prec = 1.0 + phi * m.H * m.H * m.Q / m.R;
        const double w_mean = phi * m.H * std::sqrt(m.Q) * (y - m.H * m.A * p.parent) / m.R / prec;
        const double x_mean = m.A * p.parent + std::sqrt(m.Q) * w_mean;
        const double x_var = m.Q / prec;
        cfg.rho = 0.6;
        const int samples = 5000;
        std::vector<double> xs;
        for (int k = 0; k < samples; ++k) {
            RandomStream r(StreamKey(13, {5, static_cast<std::uint64_t>(k)}));
            LgParticle q;
            q.parent = p.parent;
            q.path = w_mean + r.normal() / std::sqrt(prec);
            q.state = prop.propagate(q.parent, q.path);
            q.loglike = prop.log_likelihood(q.state, y);
            jitter(q, prop, y, phi, cfg, r);
            xs.push_back(q.state);
        }
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= samples;
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= samples - 1;
        CHECK(std::fabs(mean - x_mean) <= 3.0 * std::sqrt(x_var / samples));
        CHECK(std::fabs(var - x_var) <= 3.0 * x_var * std::sqrt(2.0 / (samples - 1)));
    }
}

TEST_CASE("kalman recursion") {
    SUBCASE("no information follows the prior") {
        LinearGaussianModel m{0.8, 0.3, 0.0, 1.0, 1.5, 2.0};
        const auto f = kalman_filter(m, {0.3, -1.0, 4.0});
        double mean = m.m0;
        double var = m.P0;
        for (const auto& g : f) {
            mean = m.A * mean;
            var = m.A * m.A * var + m.Q;
            CHECK(g.mean == doctest::Approx(mean).epsilon(1e-14));
            CHECK(g.variance == doctest::Approx(var).epsilon(1e-14));
        }
    }
    SUBCASE("exact observations") {
        LinearGaussianModel m{0.8, 0.3, 2.0, 1e-14, 0.0, 1.0};
        const auto f = kalman_filter(m, {0.4, -1.2});
        CHECK(f[1].mean == doctest::Approx(-0.6).epsilon(1e-9));
    }
    SUBCASE("matches a batch Gaussian conditioning") {
        RandomStream rng(StreamKey(13, {6}));
        const LinearGaussianModel m{0.95, 0.4, 1.3, 0.5, 0.2, 1.5};
        const int steps = 50;
        const LinearGaussianRun run = simulate_linear_gaussian(m, steps, rng);
        const auto kf = kalman_filter(m, run.observations);
        // Cov(x_a, x_b) for a ≤ b: A^{b-a} Var(x_a), Var(x_a) = A²Var(x_{a-1}) + Q.
        std::vector<double> var(steps + 1);
        std::vector<double> mean(steps + 1);
        var[0] = m.P0;
        mean[0] = m.m0;
        for (int k = 1; k <= steps; ++k) {
            var[k] = m.A * m.A * var[k - 1] + m.Q;
            mean[k] = m.A * mean[k - 1];
        }
        auto cov = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            return std::pow(m.A, b - a) * var[a];
        };
        for (int k = 1; k <= steps; ++k) {
            const auto n = static_cast<std::size_t>(k);
            std::vector<double> syy(n * n);
            std::vector<double> sxy(n);
            std::vector<double> innov(n);
            for (int a = 1; a <= k; ++a) {
                for (int b = 1; b <= k; ++b)
                    syy[(a - 1) * n + (b - 1)] = m.H * m.H * cov(a, b) + (a == b ? m.R : 0.0);
                sxy[a - 1] = m.H * cov(k, a);
                innov[a - 1] = run.observations[a - 1] - m.H * mean[a];
            }
            const auto g = spd_solve(syy, innov, n);
            const auto h = spd_solve(syy, sxy, n);
            double post_mean = mean[k];
            double post_var = var[k];
            for (std::size_t i = 0; i < n; ++i) {
                post_mean += sxy[i] * g[i];
                post_var -= sxy[i] * h[i];
            }
            CHECK(kf[k - 1].mean == doctest::Approx(post_mean).epsilon(1e-10));
            CHECK(kf[k - 1].variance == doctest::Approx(post_var).epsilon(1e-10));
        }
    }
    SUBCASE("tempered update with phi = 0 is the prior") {
        const LinearGaussianModel m;
        const Gaussian1D g = kalman_update(m, {0.4, 2.0}, 3.0, 0.0);
        CHECK(g.mean == 0.4);
        CHECK(g.variance == 2.0);
    }
}

TEST_CASE("assimilate step: flat likelihood") {
    const FlatLikelihood prop{{LinearGaussianModel{}}};
    FilterConfig cfg;
    cfg.ensemble_size = 12;
    auto ens = prior_ensemble(12, 0.0, 1.0, 3);
    std::vector<double> forecast;
    const Executor exec(1);
    const StepDiagnostics d = assimilate_step(ens, 0.0, prop, cfg, {StreamKey(13, {7})}, exec, &forecast);
    CHECK(d.n_temperatures() == 1);
    CHECK(d.temperatures[0] == 1.0);
    CHECK(d.jittered == 0);
    CHECK(d.propagator_evals == 12);
    for (std::size_t i = 0; i < ens.size(); ++i) CHECK(ens[i].state == forecast[i]);
}

TEST_CASE("assimilate step: single particle") {
    const LinearGaussianPropagator prop{LinearGaussianModel{}};
    FilterConfig cfg;
    cfg.ensemble_size = 1;
    auto ens = prior_ensemble(1, 0.0, 1.0, 4);
    std::vector<double> forecast;
    const StepDiagnostics d = assimilate_step(ens, 25.0, prop, cfg, {StreamKey(13, {8})}, Executor(1), &forecast);
    CHECK(d.n_temperatures() == 1);
    CHECK(d.jittered == 0);
    CHECK(ens[0].state == forecast[0]);
}

TEST_CASE("assimilate step: cost identity, monotone temperatures and determinism") {
    const LinearGaussianPropagator prop{{0.9, 0.5, 1.0, 0.01, 0.0, 1.0}};
    FilterConfig cfg;
    cfg.ensemble_size = 200;
    auto run = [&](int workers) {
        auto ens = prior_ensemble(200, 0.0, 1.0, 5);
        const Executor exec(workers);
        std::vector<StepDiagnostics> diags;
        for (int step = 0; step < 4; ++step) {
            const double y = 2.0 - 0.5 * step;
            diags.push_back(
                assimilate_step(ens, y, prop, cfg, {StreamKey(13, {9, static_cast<std::uint64_t>(step)})}, exec));
        }
        return std::pair{ens, diags};
    };
    const auto [ens1, diags1] = run(1);
    const auto [ens3, diags3] = run(3);
    for (std::size_t i = 0; i < ens1.size(); ++i) CHECK(ens1[i].state == ens3[i].state);
    for (std::size_t s = 0; s < diags1.size(); ++s) {
        const StepDiagnostics& d = diags1[s];
        CHECK(d.n_temperatures() > 1);
        CHECK(d.propagator_evals == d.n_temperatures() * 200L + cfg.mcmc_steps * d.jittered);
        CHECK(d.temperatures.back() == 1.0);
        for (std::size_t k = 1; k < d.temperatures.size(); ++k) CHECK(d.temperatures[k] > d.temperatures[k - 1]);
        for (double e : d.ess_at_temperature) CHECK(e >= 0.8 * 200 * (1 - 1e-12));
        CHECK(d.temperatures == diags3[s].temperatures);
        CHECK(d.jitter_accepted == diags3[s].jitter_accepted);
    }
}

TEST_CASE("assimilate step: cached states skip re-solves") {
    const LinearGaussianPropagator prop{{0.9, 0.5, 1.0, 0.01, 0.0, 1.0}};
    FilterConfig cfg;
    cfg.ensemble_size = 100;
    cfg.cache_states = true;
    auto ens = prior_ensemble(100, 0.0, 1.0, 6);
    const StepDiagnostics d = assimilate_step(ens, 2.0, prop, cfg, {StreamKey(13, {10})}, Executor(1));
    CHECK(d.n_temperatures() > 1);
    CHECK(d.propagator_evals == 100L + cfg.mcmc_steps * d.jittered);
}

TEST_CASE("assimilate step: weights carried when the last resample is skipped") {
    const LinearGaussianPropagator prop{LinearGaussianModel{}};
    FilterConfig cfg;
    cfg.ensemble_size = 50;
    cfg.final_resample_always = false;
    auto ens = prior_ensemble(50, 0.0, 1.0, 7);
    const StepDiagnostics d = assimilate_step(ens, 0.1, prop, cfg, {StreamKey(13, {11})}, Executor(1));
    CHECK(d.temperatures.back() == 1.0);
    double total = 0.0;
    for (const auto& p : ens) total += std::exp(p.log_weight);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("filter config validation") {
    FilterConfig cfg;
    CHECK(cfg.ensemble_size == 100);
    CHECK(cfg.ess_threshold_fraction == 0.8);
    CHECK(cfg.rho == 0.9995);
    CHECK(cfg.mcmc_steps == 5);
    cfg.rho = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = FilterConfig{};
    cfg.ess_threshold_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
