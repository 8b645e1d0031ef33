#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "saltda/errors.hpp"
#include "saltda/filtering/weights.hpp"
#include "saltda/parallel.hpp"
#include "saltda/random.hpp"

namespace saltda::filtering {

/// A signal model the filter can drive: a solution map over one assimilation
/// window that is deterministic in (parent state, driving-noise path).
template <class P>
concept Propagator = requires(const P& prop, const typename P::State& state, const typename P::Path& path,
                              const typename P::Observation& y, RandomStream& rng, double rho) {
    { prop.propagate(state, path) } -> std::convertible_to<typename P::State>;
    { prop.fresh_path(rng) } -> std::convertible_to<typename P::Path>;
    { prop.blend(path, path, rho) } -> std::convertible_to<typename P::Path>;
    { prop.log_likelihood(state, y) } -> std::convertible_to<double>;
};

/// Parent at the window start, the noise path over the window, and the
/// resulting state. Jittering re-propagates from the parent, so it is kept.
template <class State, class Path>
struct Particle {
    State parent;
    Path path;
    State state;
    double log_weight = 0.0;
    /// Cached log-likelihood of `state` under the current observation.
    double loglike = 0.0;
};

struct FilterConfig {
    int ensemble_size = 100;
    double ess_threshold_fraction = 0.8;
    double rho = 0.9995;
    int mcmc_steps = 5;
    int max_temperatures = 200;
    int bisection_iters = 60;
    /// Resample and jitter at φ = 1 even when the final ESS is healthy.
    bool final_resample_always = true;
    /// Keep propagated states across tempering stages. When false, every
    /// stage re-solves all N states from their (parent, path) pairs, as a
    /// memory-light implementation storing only paths would.
    bool cache_states = false;

    void validate() const {
        require_parameter(ensemble_size >= 1, "ensemble size must be >= 1");
        require_parameter(ess_threshold_fraction > 0.0 && ess_threshold_fraction <= 1.0,
                          "ESS threshold fraction must lie in (0,1]");
        require_parameter(rho >= 0.0 && rho <= 1.0, "jitter rho must lie in [0,1]");
        require_parameter(mcmc_steps >= 0, "mcmc_steps must be >= 0");
        require_parameter(max_temperatures >= 1, "max_temperatures must be >= 1");
        require_parameter(bisection_iters >= 1, "bisection_iters must be >= 1");
    }
};

struct StepDiagnostics {
    /// Temperatures φ_1 < ... < φ_R = 1.
    std::vector<double> temperatures;
    /// Incremental ESS at each accepted temperature, before resampling.
    std::vector<double> ess_at_temperature;
    /// ESS of the untempered importance weights p(y|x) over the forecast
    /// ensemble: the sample size a single-stage update would retain.
    double ess_full_update = 0.0;
    /// Distinct duplicated parents summed over tempering stages.
    long resampled_duplicates = 0;
    /// Particles jittered, summed over tempering stages.
    long jittered = 0;
    long jitter_proposals = 0;
    long jitter_accepted = 0;
    long propagator_evals = 0;
    long loglike_evals = 0;

    [[nodiscard]] int n_temperatures() const { return static_cast<int>(temperatures.size()); }
    [[nodiscard]] double ess_final() const {
        return ess_at_temperature.empty() ? std::numeric_limits<double>::quiet_NaN() : ess_at_temperature.back();
    }
    [[nodiscard]] double jitter_accept_rate() const {
        return jitter_proposals == 0 ? 0.0
                                     : static_cast<double>(jitter_accepted) / static_cast<double>(jitter_proposals);
    }
};

struct JitterStats {
    int proposals = 0;
    int accepted = 0;
};

/// Metropolis–Hastings jittering of one particle at temperature phi.
///
/// Each of cfg.mcmc_steps iterations proposes path' = blend(path, fresh, ρ),
/// re-propagates from the unchanged parent and accepts with probability
/// min(1, exp(φ (ll' - ll))). The particle's loglike cache must be current.
template <Propagator P>
JitterStats jitter(Particle<typename P::State, typename P::Path>& particle, const P& prop,
                   const typename P::Observation& y, double phi, const FilterConfig& cfg, RandomStream& rng) {
    JitterStats stats;
    for (int m = 0; m < cfg.mcmc_steps; ++m) {
        const typename P::Path fresh = prop.fresh_path(rng);
        typename P::Path proposal_path = prop.blend(particle.path, fresh, cfg.rho);
        typename P::State proposal = prop.propagate(particle.parent, proposal_path);
        const double ll_new = prop.log_likelihood(proposal, y);
        const double u = rng.uniform();
        ++stats.proposals;
        bool accept = false;
        if (ll_new >= particle.loglike) {
            accept = true;
        } else if (ll_new != -std::numeric_limits<double>::infinity()) {
            accept = u < std::exp(phi * (ll_new - particle.loglike));
        }
        if (accept) {
            particle.path = std::move(proposal_path);
            particle.state = std::move(proposal);
            particle.loglike = ll_new;
            ++stats.accepted;
        }
    }
    return stats;
}

inline std::string describe(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ' ';
        out += std::to_string(values[i]);
    }
    return out;
}

/// Stream keys used by assimilate_step, exposed so that tests and companion
/// ensembles can reproduce or avoid them.
struct AssimilationKeys {
    StreamKey window;
    [[nodiscard]] StreamKey propagate(std::size_t particle) const {
        return window.child(StreamPurpose::Propagate).child(particle);
    }
    [[nodiscard]] StreamKey resample(std::size_t stage) const {
        return window.child(StreamPurpose::Resample).child(stage);
    }
    [[nodiscard]] StreamKey jitter(std::size_t stage, std::size_t particle) const {
        return window.child(StreamPurpose::Jitter).child(stage).child(particle);
    }
};

/// One assimilation step with adaptive tempering and MCMC jittering.
///
/// 1. Every particle is propagated over the window from its current state
///    with a fresh path.
/// 2. Starting at φ = 0, the next temperature is the largest one keeping the
///    incremental ESS at or above threshold (1 if the full increment already
///    does). Particles are reweighted by exp((φ_r - φ_{r-1}) ll), resampled
///    systematically, and every particle whose parent index was drawn more
///    than once is jittered at temperature φ_r.
/// 3. The loop ends after the stage at φ = 1.
///
/// Unless cfg.cache_states is set, each stage after the first re-solves the
/// states from (parent, path), so propagator_evals per step equals
/// n_temperatures·N + mcmc_steps·jittered.
///
/// `forecast`, when given, receives the propagated states before any
/// reweighting.
///
/// The result is an equally weighted ensemble unless final_resample_always is
/// false, in which case the last stage keeps its weights in log_weight and
/// the next step starts from them.
template <Propagator P>
StepDiagnostics assimilate_step(std::vector<Particle<typename P::State, typename P::Path>>& ensemble,
                                const typename P::Observation& y, const P& prop, const FilterConfig& cfg,
                                const AssimilationKeys& keys, const Executor& exec,
                                std::vector<typename P::State>* forecast = nullptr) {
    using ParticleT = Particle<typename P::State, typename P::Path>;
    cfg.validate();
    const std::size_t n = ensemble.size();
    require_input(n >= 1, "assimilate_step: empty ensemble");
    const double threshold = cfg.ess_threshold_fraction * static_cast<double>(n);
    StepDiagnostics diag;

    exec.for_each(n, [&](std::size_t i) {
        ParticleT& p = ensemble[i];
        RandomStream rng(keys.propagate(i));
        p.parent = p.state;
        p.path = prop.fresh_path(rng);
        p.state = prop.propagate(p.parent, p.path);
        p.loglike = prop.log_likelihood(p.state, y);
    });
    diag.propagator_evals += static_cast<long>(n);
    diag.loglike_evals += static_cast<long>(n);
    if (forecast != nullptr) {
        forecast->clear();
        for (const ParticleT& p : ensemble) forecast->push_back(p.state);
    }

    std::vector<double> base_logw(n);
    bool weighted_start = false;
    for (std::size_t i = 0; i < n; ++i) {
        base_logw[i] = ensemble[i].log_weight;
        weighted_start = weighted_start || ensemble[i].log_weight != 0.0;
    }
    if (!weighted_start) base_logw.clear();

    double phi = 0.0;
    for (std::size_t stage = 0;; ++stage) {
        if (static_cast<int>(stage) >= cfg.max_temperatures) {
            throw DegenerateEnsembleError("tempering exceeded max_temperatures = " +
                                          std::to_string(cfg.max_temperatures) + " at phi = " + std::to_string(phi));
        }
        if (stage > 0 && !cfg.cache_states) {
            exec.for_each(n, [&](std::size_t i) {
                ParticleT& p = ensemble[i];
                p.state = prop.propagate(p.parent, p.path);
                p.loglike = prop.log_likelihood(p.state, y);
            });
            diag.propagator_evals += static_cast<long>(n);
            diag.loglike_evals += static_cast<long>(n);
        }
        std::vector<double> ll(n);
        for (std::size_t i = 0; i < n; ++i) ll[i] = ensemble[i].loglike;
        double next = 0.0;
        try {
            next = find_next_temperature(ll, phi, threshold, cfg.bisection_iters, base_logw);
        } catch (const DegenerateEnsembleError& e) {
            throw DegenerateEnsembleError(std::string(e.what()) + " (phi = " + std::to_string(phi) +
                                          ", stage " + std::to_string(stage) + ", loglikes: " + describe(ll) + ")");
        }
        if (stage == 0) diag.ess_full_update = tempered_ess(ll, 0.0, 1.0, base_logw);

        std::vector<double> logw(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double base = base_logw.empty() ? 0.0 : base_logw[i];
            logw[i] = base + (next - phi) * ll[i];
        }
        const std::vector<double> w = normalize_logweights(logw);
        diag.temperatures.push_back(next);
        diag.ess_at_temperature.push_back(ess(w));
        base_logw.clear();
        phi = next;
        const bool final_stage = phi == 1.0;

        if (final_stage && !cfg.final_resample_always) {
            for (std::size_t i = 0; i < n; ++i) ensemble[i].log_weight = std::log(w[i]);
            break;
        }

        RandomStream resample_rng(keys.resample(stage));
        const std::vector<std::size_t> parents = resample_systematic(w, resample_rng);
        std::vector<int> copies(n, 0);
        for (std::size_t k : parents) ++copies[k];
        std::vector<ParticleT> next_ensemble;
        next_ensemble.reserve(n);
        for (std::size_t k : parents) {
            next_ensemble.push_back(ensemble[k]);
            next_ensemble.back().log_weight = 0.0;
        }
        ensemble = std::move(next_ensemble);

        std::vector<std::size_t> to_jitter;
        for (std::size_t slot = 0; slot < n; ++slot)
            if (copies[parents[slot]] > 1) to_jitter.push_back(slot);
        for (int c : copies)
            if (c > 1) ++diag.resampled_duplicates;

        std::vector<JitterStats> stats(to_jitter.size());
        if (cfg.mcmc_steps > 0) {
            exec.for_each(to_jitter.size(), [&](std::size_t k) {
                const std::size_t slot = to_jitter[k];
                RandomStream rng(keys.jitter(stage, slot));
                stats[k] = jitter(ensemble[slot], prop, y, phi, cfg, rng);
            });
        }
        diag.jittered += static_cast<long>(to_jitter.size());
        for (const JitterStats& s : stats) {
            diag.jitter_proposals += s.proposals;
            diag.jitter_accepted += s.accepted;
        }
        diag.propagator_evals += static_cast<long>(to_jitter.size()) * cfg.mcmc_steps;
        diag.loglike_evals += static_cast<long>(to_jitter.size()) * cfg.mcmc_steps;

        if (final_stage) break;
    }
    return diag;
}

}  // namespace saltda::filtering
