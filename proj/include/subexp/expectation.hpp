// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "subexp/distribution.hpp"

namespace subexp {

/// E_theta[f] for a single member. Finite members are summed exactly;
/// Pareto members are integrated in inverse-CDF coordinates.
double member_expectation(const Distribution& member, const TestFunction& f);

/// max over members of E_theta[f].
double upper_expectation(const AmbiguitySet& set, const TestFunction& f);
/// -upper_expectation(set, -f), i.e. the min over members.
double lower_expectation(const AmbiguitySet& set, const TestFunction& f);

double event_upper_capacity(const AmbiguitySet& set, const Interval& event, std::size_t coord = 0);
double event_lower_capacity(const AmbiguitySet& set, const Interval& event, std::size_t coord = 0);

/// Nonnegative power transform fed to the Choquet integral.
struct Transform {
    enum class Kind { AbsPower, PositivePartPower, NegativePartPower };
    Kind kind = Kind::AbsPower;
    double power = 1.0;

    static Transform abs_power(double p) { return {Kind::AbsPower, p}; }
    static Transform positive_part(double p = 1.0) { return {Kind::PositivePartPower, p}; }
    static Transform negative_part(double p = 1.0) { return {Kind::NegativePartPower, p}; }

    double operator()(double x) const;
};

/// C_V[g(X)] = integral over t >= 0 of max_theta P_theta(g(X) >= t).
///
/// Returns +infinity when the tail integral diverges. For Pareto members the
/// integral runs over doubling windows [C, 2C]; divergence is certified when
/// the running total passes 1e12 or the window increments stop shrinking.
/// Throws QuadratureNotConverged if neither happens.
double choquet_integral(const AmbiguitySet& set, const Transform& transform);

enum class Sign { Plus, Minus };

/// E^[(-c) v (+/-X) ^ c] for a one-dimensional set.
double truncated_expectation(const AmbiguitySet& set, double c, Sign sign = Sign::Plus);

struct MomentReport {
    double upper_mean = 0.0;
    double lower_mean = 0.0;
    double upper_second = 0.0;
    double truncation_used = 0.0;
    bool converged = false;
};

/// Limits of the truncated upper/lower means as c doubles. Throws
/// NotConvergent when a Pareto member has alpha <= 1 or the doubling
/// schedule is exhausted.
MomentReport breve_expectation(const AmbiguitySet& set, double tol = 1e-12);

/// E^[|X|^2] (may be +infinity for heavy tails).
double upper_second_moment(const AmbiguitySet& set);
/// E^[(|X| - c)^+].
double upper_tail_excess(const AmbiguitySet& set, double c);
/// E^[X^2 ^ c^2].
double upper_clipped_square(const AmbiguitySet& set, double c);

/// Mean vector of every member, in member order.
std::vector<Point> member_means(const AmbiguitySet& set);

}  // namespace subexp
