#pragma once

#include <span>
#include <vector>

#include "saltda/random.hpp"

namespace saltda::diagnostics {

/// Number of ensemble values ≤ y, in {0..N}.
int rank(double y, std::span<const double> ensemble_values);

/// As rank, but a y tied with k ensemble values lands uniformly on one of
/// the k + 1 admissible ranks.
int rank(double y, std::span<const double> ensemble_values, RandomStream& ties);

struct RankHistogram {
    std::vector<long> counts;
    double chi2 = 0.0;
    /// χ²_N quantile at 0.99.
    double critical_value = 0.0;
    bool rejected = false;
    /// At least 10 samples per bin.
    bool enough_samples = false;
};

/// Pearson statistic of the N+1 bin counts against the uniform expectation,
/// tested against the 1% critical value of χ² with N degrees of freedom.
RankHistogram rank_histogram_chi2(std::span<const int> ranks, int n, double level = 0.01);

}  // namespace saltda::diagnostics
