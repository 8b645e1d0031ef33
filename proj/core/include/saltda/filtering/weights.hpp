#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "saltda/random.hpp"

namespace saltda::filtering {

/// exp(logw_i - max) / Σ exp(logw_j - max). Throws DegenerateEnsembleError
/// when every entry is -∞.
std::vector<double> normalize_logweights(std::span<const double> logw);

/// Effective sample size 1/Σw², for weights normalised to within 1e-10.
double ess(std::span<const double> weights);

/// Incremental ESS at temperature phi: weights ∝ exp(base_i + (phi - phi_prev)·ll_i).
/// An empty base means equal prior weights.
double tempered_ess(std::span<const double> loglikes, double phi_prev, double phi,
                    std::span<const double> base_logw = {});

/// Largest phi in (phi_prev, 1] whose incremental ESS stays at or above the
/// threshold. Returns exactly 1 when the full increment already qualifies;
/// otherwise bisects for `bisection_iters` iterations and returns the lower
/// bracket end, so the ESS at the returned value is never below threshold.
double find_next_temperature(std::span<const double> loglikes, double phi_prev, double threshold,
                             int bisection_iters = 60, std::span<const double> base_logw = {});

/// Systematic resampling with one offset u ~ U[0, 1/N). Returns N parent
/// indices in ascending order; each count c_i satisfies |c_i - N w_i| < 1.
std::vector<std::size_t> resample_systematic(std::span<const double> weights, RandomStream& rng);
std::vector<std::size_t> resample_systematic_with_offset(std::span<const double> weights, double u);

}  // namespace saltda::filtering
