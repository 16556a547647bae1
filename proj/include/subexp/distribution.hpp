// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace subexp {

using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
    Point value;
    double weight = 0.0;
};

struct FiniteDiscrete {
    std::vector<Atom> atoms;
};

/// |X| has tail (scale/x)^alpha for x >= scale; the sign is + with
/// probability right_mass. One-dimensional only.
struct TwoSidedPareto {
    double alpha = 0.0;
    double scale = 1.0;
    double right_mass = 0.5;
};

/// Half-line or interval on the real line. Open/closed per endpoint.
struct Interval {
    double lo = -kInf;
    bool lo_closed = false;
    double hi = kInf;
    bool hi_closed = false;

    static Interval at_least(double a) { return {a, true, kInf, false}; }
    static Interval greater_than(double a) { return {a, false, kInf, false}; }
    static Interval at_most(double b) { return {-kInf, false, b, true}; }
    static Interval less_than(double b) { return {-kInf, false, b, false}; }
    static Interval closed(double a, double b) { return {a, true, b, true}; }
    static Interval open(double a, double b) { return {a, false, b, false}; }

    bool contains(double x) const {
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }
};

/// One member of an ambiguity set: a finite atom list or a two-sided Pareto law.
class Distribution {
public:
    /// Validates: weights > 0 summing to 1 within 1e-12, pairwise distinct
    /// atoms of equal dimension >= 1. Throws ValueError.
    static Distribution finite(std::vector<Atom> atoms);
    /// Scalar convenience: list of (value, weight).
    static Distribution finite1d(const std::vector<std::pair<double, double>>& atoms);
    static Distribution point_mass(Point value);
    static Distribution pareto(double alpha, double scale, double right_mass);

    bool is_finite() const { return std::holds_alternative<FiniteDiscrete>(rep_); }
    bool is_pareto() const { return std::holds_alternative<TwoSidedPareto>(rep_); }
    const FiniteDiscrete& as_finite() const { return std::get<FiniteDiscrete>(rep_); }
    const TwoSidedPareto& as_pareto() const { return std::get<TwoSidedPareto>(rep_); }

    std::size_t dimension() const;

    /// Law of <p, X>. Coincident projected atoms are merged.
    Distribution project(std::span<const double> direction) const;
    /// Law of factor * X.
    Distribution scaled(double factor) const;

    /// Exact probability that coordinate `coord` falls in `event`.
    double probability(const Interval& event, std::size_t coord = 0) const;

    /// Mean vector. Throws NotConvergent for Pareto with alpha <= 1.
    Point mean() const;

    /// Largest |coordinate| over atoms (finite) or the scale (Pareto).
    double magnitude_hint() const;

private:
    explicit Distribution(FiniteDiscrete f) : rep_(std::move(f)) {}
    explicit Distribution(TwoSidedPareto p) : rep_(p) {}

    std::variant<FiniteDiscrete, TwoSidedPareto> rep_;
};

/// Finite family of distributions; the upper expectation is the max over members.
class AmbiguitySet {
public:
    AmbiguitySet(std::vector<Distribution> members, std::string label = {});

    const std::vector<Distribution>& members() const { return members_; }
    const Distribution& member(std::size_t i) const { return members_.at(i); }
    std::size_t size() const { return members_.size(); }
    std::size_t dimension() const { return members_.front().dimension(); }
    const std::string& label() const { return label_; }
    bool all_finite() const;

    AmbiguitySet project(std::span<const double> direction) const;
    AmbiguitySet scaled(double factor) const;
    AmbiguitySet with_member(Distribution extra) const;

private:
    std::vector<Distribution> members_;
    std::string label_;
};

/// A test function phi with the bounds the admissibility checks need.
///
/// `growth` is the exponent g with |phi(x)| = O(|x|^g); phi is integrable
/// against a Pareto member of index alpha iff g < alpha. Bounded functions
/// have growth 0.
struct TestFunction {
    std::function<double(std::span<const double>)> eval;
    double lipschitz = kInf;
    double sup_bound = kInf;
    double growth = 1.0;

    double operator()(std::span<const double> x) const { return eval(x); }
    double operator()(double x) const { return eval(std::span<const double>(&x, 1)); }

    static TestFunction scalar(std::function<double(double)> f, double lipschitz,
                               double sup_bound, double growth);
    static TestFunction constant(double c);
    static TestFunction coordinate(std::size_t j = 0);
    static TestFunction square();
    TestFunction negated() const;
};

}  // namespace subexp
