// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subexp/convex.hpp"
#include "subexp/distribution.hpp"

namespace subexp {

/// Steps (previous end, end] use `weights` as the mixture over members.
struct Block {
    std::size_t end = 0;
    std::vector<double> weights;
    int target = -1;  // index into Strategy::targets for target-chasing blocks
};

/// Rule assigning a mixture over ambiguity-set members to each step.
/// Steps past the last block end keep the last block's mixture.
struct Strategy {
    enum class Kind { Stationary, BlockSchedule, TargetChasing };

    Kind kind = Kind::Stationary;
    std::string label;
    std::vector<Block> blocks;
    std::vector<Point> targets;

    static Strategy stationary(std::vector<double> weights, std::string label);
    static Strategy pure(std::size_t member, std::size_t member_count, std::string label);
    static Strategy block_schedule(std::vector<Block> blocks, std::string label);

    /// Mixture active at 1-based step t.
    const std::vector<double>& weights_at(std::size_t t) const;
    /// Throws ValueError on malformed weights or non-increasing block ends.
    void validate(std::size_t member_count) const;
};

/// Block-end sequences n_1 < n_2 < ... used by the block schedules.
struct BlockGrowth {
    enum class Kind { Geometric, Superexponential, Polynomial };
    Kind kind = Kind::Geometric;
    double parameter = 2.0;

    /// n_k = ceil(base^k).
    static BlockGrowth geometric(double base = 2.0) { return {Kind::Geometric, base}; }
    /// n_k = k^k, so n_{k-1}/n_k -> 0.
    static BlockGrowth superexponential() { return {Kind::Superexponential, 0.0}; }
    /// n_k = ceil(k^a).
    static BlockGrowth polynomial(double a) { return {Kind::Polynomial, a}; }

    /// First `count` block ends, forced strictly increasing.
    std::vector<std::size_t> ends(std::size_t count) const;
    /// Block ends up to and including the first one >= horizon, the last
    /// clipped to horizon.
    std::vector<std::size_t> ends_until(std::size_t horizon) const;
};

struct Path {
    std::size_t n = 0;
    std::size_t dimension = 0;
    std::vector<double> increments;    // row-major n x d
    std::vector<double> partial_sums;  // row m-1 holds S_m
    std::uint64_t seed = 0;
    std::string strategy_label;

    std::span<const double> increment(std::size_t m) const { return {&increments[(m - 1) * dimension], dimension}; }
    std::span<const double> sum(std::size_t m) const { return {&partial_sums[(m - 1) * dimension], dimension}; }
    /// Scalar convenience for d = 1.
    double sum1(std::size_t m) const { return partial_sums[(m - 1) * dimension]; }
};

/// Stationary mixture of the max-mean and min-mean members with mean b.
/// Throws TargetOutOfRange when b lies outside [lower mean, upper mean].
Strategy stationary_for_target(const AmbiguitySet& set, double b);

/// Alternating pure max-mean / min-mean blocks ending at growth.ends(K).
Strategy oscillation_schedule(const AmbiguitySet& set, std::size_t epochs,
                              BlockGrowth growth = BlockGrowth::geometric());

/// Same alternation with block ends covering [1, horizon].
Strategy oscillation_until(const AmbiguitySet& set, std::size_t horizon, BlockGrowth growth);

struct TargetChasingOptions {
    /// Epoch k visits targets 1..min(k, m); epochs first_epoch..epochs run.
    std::size_t first_epoch = 1;
    /// Alternate visiting direction between consecutive epochs.
    bool serpentine = true;
    BlockGrowth growth = BlockGrowth::geometric();
    /// When > 0, block ends are ceil(horizon / ratio^(B - k)) instead of
    /// growth.ends(B), so the final block ends exactly at horizon.
    std::size_t horizon = 0;
    double ratio = 5.0;
};

/// m targets inside the mean set: a uniform grid on [lower, upper] for
/// d = 1, farthest-point picks among mixtures of member means otherwise,
/// ordered as a nearest-neighbour tour. Throws TargetOutsideM.
std::vector<Point> mean_set_targets(const AmbiguitySet& set, const MeanSet& mean_set, std::size_t m);

Strategy target_chasing_schedule(const AmbiguitySet& set, const MeanSet& mean_set, std::size_t m,
                                 std::size_t epochs, const TargetChasingOptions& options = {});

/// Mixture over members whose mean vector equals `target`. Throws
/// TargetOutsideM when the residual exceeds kAttainTolerance.
std::vector<double> mixture_for_mean(const AmbiguitySet& set, std::span<const double> target);

/// n steps under `strategy`; step t draws from CounterStream(seed, t), so the
/// result is bit-reproducible given (set, strategy, n, seed).
Path sample_path(const AmbiguitySet& set, const Strategy& strategy, std::size_t n, std::uint64_t seed);

}  // namespace subexp
