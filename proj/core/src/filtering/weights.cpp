#include "saltda/filtering/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "saltda/errors.hpp"

namespace saltda::filtering {

std::vector<double> normalize_logweights(std::span<const double> logw) {
    require_input(!logw.empty(), "normalize_logweights: empty input");
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logw) {
        require_input(!std::isnan(v) && v != std::numeric_limits<double>::infinity(),
                      "normalize_logweights: NaN or +inf log-weight");
        mx = std::max(mx, v);
    }
    if (mx == -std::numeric_limits<double>::infinity()) {
        throw DegenerateEnsembleError("all log-weights are -inf");
    }
    std::vector<double> w(logw.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        w[i] = std::exp(logw[i] - mx);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

double ess(std::span<const double> weights) {
    require_input(!weights.empty(), "ess: empty input");
    double sum = 0.0;
    double sq = 0.0;
    for (double w : weights) {
        require_input(w >= 0.0, "ess: negative weight");
        sum += w;
        sq += w * w;
    }
    require_input(std::abs(sum - 1.0) <= 1e-10, "ess: weights are not normalised (sum " + std::to_string(sum) + ")");
    return 1.0 / sq;
}

double tempered_ess(std::span<const double> loglikes, double phi_prev, double phi, std::span<const double> base_logw) {
    require_input(base_logw.empty() || base_logw.size() == loglikes.size(), "tempered_ess: base weight length mismatch");
    const double dphi = phi - phi_prev;
    std::vector<double> logw(loglikes.size());
    for (std::size_t i = 0; i < loglikes.size(); ++i) {
        const double base = base_logw.empty() ? 0.0 : base_logw[i];
        // 0·(-inf) would be NaN; a zero increment leaves the base weight alone.
        logw[i] = dphi == 0.0 ? base : base + dphi * loglikes[i];
    }
    return ess(normalize_logweights(logw));
}

double find_next_temperature(std::span<const double> loglikes, double phi_prev, double threshold, int bisection_iters,
                             std::span<const double> base_logw) {
    const auto n = static_cast<double>(loglikes.size());
    require_input(!loglikes.empty(), "find_next_temperature: empty log-likelihoods");
    require_parameter(phi_prev >= 0.0 && phi_prev < 1.0, "find_next_temperature: phi_prev must lie in [0,1)");
    require_parameter(threshold <= n, "find_next_temperature: ESS threshold exceeds ensemble size");
    require_parameter(bisection_iters >= 1, "find_next_temperature: need at least one bisection iteration");
    if (std::all_of(loglikes.begin(), loglikes.end(),
                    [](double v) { return v == -std::numeric_limits<double>::infinity(); })) {
        throw DegenerateEnsembleError("every particle has zero likelihood");
    }
    if (tempered_ess(loglikes, phi_prev, 1.0, base_logw) >= threshold) return 1.0;
    double lo = phi_prev;
    double hi = 1.0;
    for (int it = 0; it < bisection_iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (tempered_ess(loglikes, phi_prev, mid, base_logw) >= threshold) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (!(lo > phi_prev)) {
        throw DegenerateEnsembleError("no temperature increment keeps the ESS above the threshold");
    }
    return lo;
}

std::vector<std::size_t> resample_systematic_with_offset(std::span<const double> weights, double u) {
    const std::size_t n = weights.size();
    require_input(n > 0, "resample_systematic: empty weights");
    (void)ess(weights);  // normalisation check
    const double inv_n = 1.0 / static_cast<double>(n);
    require_input(u >= 0.0 && u < inv_n, "resample_systematic: offset must lie in [0, 1/N)");
    // Work in units of 1/N: position k sits at k + N·u and particle i owns
    // [S_{i-1}, S_i) with S_i = Σ_{j<=i} N w_j. Ties at boundaries (which
    // round-off can shift by an ulp) are resolved towards the next particle.
    constexpr double kTieTolerance = 1e-9;
    const double offset = u * static_cast<double>(n);
    std::vector<std::size_t> out;
    out.reserve(n);
    double cumulative = weights[0] * static_cast<double>(n);
    std::size_t i = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double position = static_cast<double>(k) + offset;
        while (position >= cumulative - kTieTolerance && i + 1 < n) {
            ++i;
            cumulative += weights[i] * static_cast<double>(n);
        }
        out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> resample_systematic(std::span<const double> weights, RandomStream& rng) {
    const double u = rng.uniform() / static_cast<double>(weights.size());
    return resample_systematic_with_offset(weights, u);
}

}  // namespace saltda::filtering
