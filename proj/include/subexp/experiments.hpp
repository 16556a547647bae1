// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subexp/capacity_dp.hpp"
#include "subexp/distribution.hpp"

namespace subexp {

/// Info rows are logged evidence with no pass/fail claim.
enum class Verdict { Pass, Fail, Info };

const char* to_string(Verdict v);

/// One flat statistic. For asserted rows the check is always
/// `value <= tolerance`; the statistic name says what is measured.
struct StatRow {
    std::string strategy;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::string statistic;
    double value = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::Info;
};

struct ExperimentResult {
    std::string experiment;
    std::string model;
    std::vector<std::string> strategies;
    std::vector<std::size_t> n_grid;
    std::vector<std::uint64_t> seeds;
    std::vector<StatRow> rows;
    std::vector<std::string> notes;

    /// Appends a row asserting value <= tolerance.
    void check(std::string strategy, std::uint64_t seed, std::size_t n, std::string statistic, double value,
               double tolerance);
    void info(std::string strategy, std::uint64_t seed, std::size_t n, std::string statistic, double value);
    void append(std::vector<StatRow> more);

    std::size_t failures() const;
    bool passed() const { return failures() == 0; }
    /// First row with the given strategy and statistic, or nullptr.
    const StatRow* find(const std::string& strategy, const std::string& statistic, std::uint64_t seed = 0) const;
};

struct SllnOptions {
    std::size_t horizon = 1'000'000;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<double> targets;
    double tolerance = 0.01;
    double oscillation_tolerance = 0.05;
    double burn_in_fraction = 0.01;
    unsigned threads = 1;
};

/// Endpoint, oscillation, target and two-limit checks for S_n/n.
/// Throws NotConvergent when the breve means do not exist.
ExperimentResult run_slln(const AmbiguitySet& set, const SllnOptions& options);

struct DivergenceOptions {
    std::vector<std::size_t> horizons{1'000, 10'000, 100'000};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    unsigned threads = 1;
};

/// max_{n<=N} |S_n|/n across a horizon grid under each pure member.
/// Every row is Info: this is evidence, not a theorem check.
ExperimentResult run_divergence(const AmbiguitySet& set, const DivergenceOptions& options);

struct MarcinkiewiczOptions {
    double p = 1.5;
    std::size_t horizon = 1'000'000;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    double band = 0.5;
    double burn_in_fraction = 0.01;
    unsigned threads = 1;
};

/// Tail sup of |S_n - n*mean| / n^(1/p) under both extreme strategies plus
/// a one-sided check under a k^(2p/(2-p)) oscillation schedule. When
/// C_V(|X|^p) is infinite the run is a control and reports Info rows.
ExperimentResult run_marcinkiewicz(const AmbiguitySet& set, const MarcinkiewiczOptions& options);

struct WeakLlnOptions {
    enum class Mode { Exact, MonteCarlo };
    Mode mode = Mode::Exact;
    std::vector<std::size_t> n_grid{32, 64, 128, 256};
    double epsilon = 0.1;
    double interior_target = 0.25;
    double capacity_threshold = 0.05;
    double interior_threshold = 0.9;
    double bank_tolerance = 0.05;
    std::size_t replications = 2000;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    unsigned threads = 1;
};

/// Exact mode: lattice DP for V(dist(S_n/n, M) >= eps), the interior
/// capacity and a three-function bank. Requires d = 1.
ExperimentResult run_weak_lln_exact(const LatticeModel& model, const WeakLlnOptions& options);

/// Monte Carlo mode for vector models: the largest empirical frequency of
/// dist(S_n/n, M) >= eps over a strategy family, with a 95% Wilson bound.
ExperimentResult run_weak_lln_monte_carlo(const AmbiguitySet& set, const WeakLlnOptions& options);

struct ThreeSeriesOptions {
    double exponent = 2.0;  // a_n = n^-exponent
    double c = 1.0;
    std::size_t horizon = 100'000;
    std::size_t settle = 1'000;
    double tolerance = 0.01;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    unsigned threads = 1;
};

/// X_n = a_n * X with X drawn from `set`. Evaluates the three series by the
/// tail-ratio rule; if all converge, asserts sup_{m,n>=settle} |S_n - S_m|
/// <= tolerance under four strategies.
ExperimentResult run_three_series(const AmbiguitySet& set, const ThreeSeriesOptions& options);

struct ClusterSetOptions {
    std::size_t targets = 5;
    std::size_t horizon = 1'000'000;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    double delta = 0.005;
    double outer_tolerance = 0.05;
    double hausdorff_tolerance = 0.15;
    double block_ratio = 5.0;
    std::size_t check_stride = 100;
    unsigned threads = 1;
};

/// Target-chasing visits against the mean set: outer containment under
/// every strategy tested and a two-sided Hausdorff check between the visit
/// points and the target grid.
ExperimentResult run_cluster_set(const AmbiguitySet& set, const ClusterSetOptions& options);

struct InequalityGridOptions {
    std::vector<std::size_t> n_grid{4, 8, 16};
    std::vector<double> x_grid{0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    std::vector<double> alphas{0.3, 0.5};
    bool exponential = true;
    unsigned threads = 1;
};

/// Exact DP capacities against the Kolmogorov, lower-capacity, exponential
/// and Levy bounds on every (n, x) grid point.
ExperimentResult run_inequality_grid(const LatticeModel& model, const InequalityGridOptions& options);

struct ChoquetSeriesOptions {
    double p = 1.0;
    double scale_m = 1.0;
    std::size_t terms = 100'000;
};

ExperimentResult run_choquet_series(const Distribution& dist, const ChoquetSeriesOptions& options);

struct AxiomOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    double tolerance = 1e-12;
    unsigned threads = 1;
};

/// Randomized finite ambiguity sets checked for the expectation axioms,
/// conjugacy, the capacity sandwich, Choquet dominance and invariance under
/// member and atom permutations. One row per trial.
ExperimentResult run_axioms(const AxiomOptions& options);

}  // namespace subexp
