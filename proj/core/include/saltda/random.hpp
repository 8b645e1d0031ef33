#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace saltda {

/// Purpose tags that keep independent uses of one (seed, id, window) key disjoint.
enum class StreamPurpose : std::uint64_t {
    Propagate = 1,
    Jitter = 2,
    Resample = 3,
    Observation = 4,
    Deformation = 5,
    Truth = 6,
    PriorEnsemble = 7,
    RankTies = 8,
    Forecast = 9,
    Filter = 10,
    Test = 99,
};

/// Hierarchical key for a random stream: a master seed plus a path of integers.
///
/// Streams are derived by hashing the key, so the numbers drawn for, say,
/// particle 17 in window 4 never depend on how many other streams were used
/// before it or on which worker runs it.
class StreamKey {
public:
    explicit StreamKey(std::uint64_t seed) : seed_(seed) {}
    StreamKey(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    [[nodiscard]] StreamKey child(std::uint64_t word) const;
    [[nodiscard]] StreamKey child(StreamPurpose purpose) const {
        return child(static_cast<std::uint64_t>(purpose));
    }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] const std::vector<std::uint64_t>& path() const { return path_; }
    /// 64-bit digest of (seed, path) via chained splitmix64 finalisation.
    [[nodiscard]] std::uint64_t digest() const;

private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> path_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// A random stream owned by one call site. Not shared between threads.
class RandomStream {
public:
    explicit RandomStream(const StreamKey& key);

    double normal() { return normal_(engine_); }
    double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }
    std::uint64_t next_u64() { return engine_(); }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace saltda
