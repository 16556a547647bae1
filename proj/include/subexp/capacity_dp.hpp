// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "subexp/distribution.hpp"

namespace subexp {

inline constexpr std::size_t kMaxDpStates = 10'000'000;

/// One-dimensional finite ambiguity set whose atoms sit on the lattice q*Z.
class LatticeModel {
public:
    struct Step {
        long long k;  // atom value / quantum
        double weight;
    };

    /// Throws NonLattice if some atom is not an integer multiple of
    /// `quantum` within 1e-9, ValueError for non-finite or vector members.
    LatticeModel(AmbiguitySet set, double quantum);

    const AmbiguitySet& set() const { return set_; }
    double quantum() const { return quantum_; }
    const std::vector<std::vector<Step>>& members() const { return members_; }
    long long min_step() const { return min_step_; }
    long long max_step() const { return max_step_; }

private:
    AmbiguitySet set_;
    double quantum_;
    std::vector<std::vector<Step>> members_;
    long long min_step_ = 0;
    long long max_step_ = 0;
};

/// Path functionals with a low-dimensional sufficient statistic.
struct PathFunctional {
    enum class Kind { TerminalSum, RunningMax, TerminalEvent, AllBlocksHit };

    Kind kind = Kind::TerminalSum;
    std::size_t horizon = 0;
    std::string description;
    std::function<double(double)> terminal;                  // TerminalSum: phi(S_n)
    std::function<bool(std::size_t, double)> crossing;       // RunningMax: hit at (m, S_m)
    Interval event;                                          // TerminalEvent
    std::vector<std::size_t> block_ends;                     // AllBlocksHit
    std::vector<Interval> block_events;                      // AllBlocksHit

    static PathFunctional terminal_sum(std::size_t n, std::function<double(double)> phi,
                                       std::string description = "phi(S_n)");
    static PathFunctional constant(std::size_t n, double c);
    /// 1{max_{m<=n} |S_m| >= x} (absolute) or 1{max_{m<=n} S_m >= x}.
    static PathFunctional running_max(std::size_t n, double x, bool absolute);
    /// 1{pred(m, S_m) for some 1 <= m <= n}; covers centred and
    /// time-dependent barriers.
    static PathFunctional barrier(std::size_t n, std::function<bool(std::size_t, double)> pred,
                                  std::string description);
    static PathFunctional terminal_event(std::size_t n, Interval event);
    /// prod_i 1{S_{b_i} - S_{b_{i-1}} in E_i}, b_0 = 0, horizon = b_last.
    static PathFunctional all_blocks_hit(std::vector<std::size_t> block_ends, std::vector<Interval> events);

    /// Value on a realized trajectory S_1..S_n.
    double evaluate_path(std::span<const double> partial_sums) const;
    /// Value on a lattice trajectory; sums are q * k_m.
    double evaluate_lattice_path(std::span<const long long> lattice_sums, double quantum) const;
};

enum class Mode { Upper, Lower };

/// Backward induction over (step, lattice sum): the max (Upper) or min
/// (Lower) over all history-dependent member selections. Indicator
/// functionals give the upper/lower path capacities.
///
/// Throws StateSpaceTooLarge past kMaxDpStates states per step.
double dp_value(const LatticeModel& model, const PathFunctional& functional, Mode mode,
                unsigned threads = 1);

/// Oracle: enumerates every history-dependent policy (one member per
/// history node) and takes the max/min of the induced path expectations.
/// Limited to n <= 4, <= 3 members, <= 3 atoms each and 2e7 policies;
/// throws TooLargeForBruteForce otherwise.
double brute_force_value(const LatticeModel& model, const PathFunctional& functional, Mode mode);

/// Number of distinct history-dependent policies brute_force_value would enumerate.
double policy_count(const LatticeModel& model, std::size_t horizon);

}  // namespace subexp
