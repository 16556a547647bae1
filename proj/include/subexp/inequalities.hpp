// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subexp/capacity_dp.hpp"
#include "subexp/distribution.hpp"

namespace subexp {

struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;            // raw closed-form value
    double ci_half_width = 0.0;  // 0 for exact DP
    bool satisfied = false;
    std::string context;

    /// Capacities live in [0,1]; the displayed bound is capped there.
    double rhs_display() const { return std::min(1.0, rhs); }
};

BoundReport make_report(double lhs, double rhs, double ci_half_width, std::string context);

/// (e+1) * B2 / x^2.
double kolmogorov_upper_bound(double b2, double x);

/// exp{x/y - (x/y)(B2/(xy) + 1) ln(1 + xy/B2)}; the caller adds the
/// capacity of a single increment reaching y.
double exponential_bound(double b2, double x, double y);

/// 2 x^-2 sum_k (E^[|Z_k|^2] - |mu_k|^2), without attainability checks.
double kolmogorov_lower_capacity_bound(std::span<const double> second_moments,
                                       std::span<const Point> mus, double x);

/// Same bound for n i.i.d. copies of `set`; every mu must be a mixture of
/// member means or MuNotAttainable is thrown.
double kolmogorov_lower_capacity_bound(const AmbiguitySet& set, std::span<const Point> mus, double x);

/// Smallest lattice beta with V(|S_{n-k}| > beta) <= alpha, found by
/// bisection over multiples of the quantum.
double levy_beta(const LatticeModel& model, std::size_t steps, double alpha);

/// (1-alpha) V(max_k (|S_k| - beta_{n,k}) > x + eps) against V(|S_n| > x),
/// both by exact DP, with eps = quantum / 2.
BoundReport levy_bound_check(const LatticeModel& model, std::size_t n, double x, double alpha);

enum class Inequality { KolmogorovUpper, KolmogorovLower, Exponential };

/// Exact DP capacity of the maximal-sum event against the matching bound.
///
/// KolmogorovUpper / Exponential centre the increments at the upper mean so
/// E^[Z] = 0. KolmogorovLower uses mu (default: midpoint of the mean
/// interval), which must be attainable.
BoundReport check_inequality(const LatticeModel& model, Inequality which, std::size_t n, double x,
                             std::optional<double> y = std::nullopt, std::optional<double> mu = std::nullopt);

struct SeriesReport {
    double partial_k100 = 0.0;  // partial sum at K/100
    double partial_k10 = 0.0;   // partial sum at K/10
    double partial_k = 0.0;     // partial sum at K
    double increment_ratio = 0.0;
    double expected_ratio = 0.0;  // closed form 10^(1 - alpha/p); 0 when the terms vanish
    double closed_form_increment = 0.0;
    bool tail_matches = false;    // observed K/10 -> K increment within 10% of the closed form
    bool series_convergent = false;
    double choquet = 0.0;         // C_V(|X|^p)
    bool choquet_finite = false;
    bool agree = false;
    std::vector<double> c_grid;
    std::vector<double> tail_excess_scaled;    // E^[(|X|-c)^+] * c^(p-1)
    std::vector<double> clipped_square_scaled; // E^[X^2 ^ c^2] * c^(p-2)
};

/// Sum_{i<=K} V(|X| >= M i^(1/p)) by tail-ratio test, cross-checked with
/// the finiteness of C_V(|X|^p). Requires K >= 1000.
SeriesReport choquet_series_test(const Distribution& dist, double p, double m, std::size_t k);

struct BorelCantelliReport {
    double capacity_sum = 0.0;
    double tail_sum = 0.0;  // sum over the second half of the series
    bool summable = false;
    bool asserted = false;  // an io-frequency claim was made
    bool passed = true;
};

/// Direct half only: a summable capacity series must show zero observed
/// infinitely-often frequency. Divergent series produce no assertion.
BorelCantelliReport borel_cantelli_diagnostic(std::span<const double> capacities, double io_frequency);

}  // namespace subexp
