#include "saltda/diagnostics/ranks.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include "saltda/errors.hpp"

namespace saltda::diagnostics {

int rank(double y, std::span<const double> ensemble_values) {
    int count = 0;
    for (double x : ensemble_values)
        if (x <= y) ++count;
    return count;
}

int rank(double y, std::span<const double> ensemble_values, RandomStream& ties) {
    int below = 0;
    int equal = 0;
    for (double x : ensemble_values) {
        if (x < y) ++below;
        else if (x == y) ++equal;
    }
    if (equal == 0) return below;
    return below + static_cast<int>(ties.index(static_cast<std::size_t>(equal) + 1));
}

RankHistogram rank_histogram_chi2(std::span<const int> ranks, int n, double level) {
    require_parameter(n >= 1, "rank histogram: ensemble size must be >= 1");
    require_parameter(level > 0.0 && level < 1.0, "rank histogram: level must lie in (0,1)");
    RankHistogram out;
    out.counts.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int r : ranks) {
        require_input(r >= 0 && r <= n, "rank histogram: rank outside [0, N]");
        ++out.counts[static_cast<std::size_t>(r)];
    }
    const double bins = static_cast<double>(n + 1);
    const double expected = static_cast<double>(ranks.size()) / bins;
    out.enough_samples = static_cast<double>(ranks.size()) >= 10.0 * bins;
    if (expected > 0.0) {
        for (long c : out.counts) {
            const double d = static_cast<double>(c) - expected;
            out.chi2 += d * d / expected;
        }
    }
    const boost::math::chi_squared dist(static_cast<double>(n));
    out.critical_value = boost::math::quantile(boost::math::complement(dist, level));
    out.rejected = out.chi2 > out.critical_value;
    return out;
}

}  // namespace saltda::diagnostics
