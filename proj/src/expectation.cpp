// SPDX-License-Identifier: Apache-2.0
#include "subexp/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "subexp/errors.hpp"

namespace subexp {

namespace {

void require_scalar(const AmbiguitySet& set, const char* what) {
    if (set.dimension() != 1) throw ValueError(std::string(what) + " requires a one-dimensional set");
}

double squared_norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

// E[min(|X|, c)] for a Pareto magnitude.
double pareto_clipped_abs_mean(const TwoSidedPareto& p, double c) {
    if (c <= p.scale) return c;
    const double a = p.alpha;
    if (a == 1.0) return p.scale + p.scale * std::log(c / p.scale);
    return p.scale + std::pow(p.scale, a) * (std::pow(c, 1.0 - a) - std::pow(p.scale, 1.0 - a)) / (1.0 - a);
}

// Tail V_theta(g(X) >= t) for one member, t > 0.
double member_tail(const Distribution& m, const Transform& g, double t) {
    if (m.is_pareto()) {
        const auto& p = m.as_pareto();
        const double x = std::pow(t, 1.0 / g.power);
        const double mag = x <= p.scale ? 1.0 : std::pow(p.scale / x, p.alpha);
        switch (g.kind) {
            case Transform::Kind::AbsPower: return mag;
            case Transform::Kind::PositivePartPower: return p.right_mass * mag;
            case Transform::Kind::NegativePartPower: return (1.0 - p.right_mass) * mag;
        }
    }
    std::vector<double> hits;
    for (const auto& a : m.as_finite().atoms)
        if (g(a.value[0]) >= t) hits.push_back(a.weight);
    std::sort(hits.begin(), hits.end());
    long double total = 0.0L;
    for (double w : hits) total += w;
    return static_cast<double>(total);
}

}  // namespace

double member_expectation(const Distribution& member, const TestFunction& f) {
    if (member.is_finite()) {
        long double total = 0.0L;
        for (const auto& a : member.as_finite().atoms) total += a.weight * static_cast<long double>(f(std::span<const double>(a.value)));
        return static_cast<double>(total);
    }
    const auto& p = member.as_pareto();
    if (!(f.growth < p.alpha))
        throw NonIntegrable("test function growth exponent must be below the pareto tail index");
    // Inverse-CDF coordinates: |X| = scale * u^(-1/alpha), u uniform on (0,1).
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double x = p.scale * std::pow(u, -1.0 / p.alpha);
        double v = 0.0;
        if (p.right_mass > 0.0) v += p.right_mass * f(x);
        if (p.right_mass < 1.0) v += (1.0 - p.right_mass) * f(-x);
        return v;
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(integrand, 0.0, 1.0);
}

double upper_expectation(const AmbiguitySet& set, const TestFunction& f) {
    double best = -kInf;
    for (const auto& m : set.members()) best = std::max(best, member_expectation(m, f));
    return best;
}

double lower_expectation(const AmbiguitySet& set, const TestFunction& f) {
    return -upper_expectation(set, f.negated());
}

double event_upper_capacity(const AmbiguitySet& set, const Interval& event, std::size_t coord) {
    double best = 0.0;
    for (const auto& m : set.members()) best = std::max(best, m.probability(event, coord));
    return best;
}

double event_lower_capacity(const AmbiguitySet& set, const Interval& event, std::size_t coord) {
    double best = 1.0;
    for (const auto& m : set.members()) best = std::min(best, m.probability(event, coord));
    return best;
}

double Transform::operator()(double x) const {
    switch (kind) {
        case Kind::AbsPower: return std::pow(std::fabs(x), power);
        case Kind::PositivePartPower: return x > 0.0 ? std::pow(x, power) : 0.0;
        case Kind::NegativePartPower: return x < 0.0 ? std::pow(-x, power) : 0.0;
    }
    return 0.0;
}

double choquet_integral(const AmbiguitySet& set, const Transform& transform) {
    require_scalar(set, "choquet_integral");
    if (!(transform.power > 0.0)) throw ValueError("transform power must be > 0");

    std::vector<double> breaks{0.0};
    bool heavy = false;
    for (const auto& m : set.members()) {
        if (m.is_pareto()) {
            heavy = true;
            breaks.push_back(std::pow(m.as_pareto().scale, transform.power));
        } else {
            for (const auto& a : m.as_finite().atoms) breaks.push_back(transform(a.value[0]));
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto capacity = [&](double t) {
        double best = 0.0;
        for (const auto& m : set.members()) best = std::max(best, member_tail(m, transform, t));
        return best;
    };

    if (!heavy) {
        // Step function: constant on (t_{k-1}, t_k].
        long double total = 0.0L;
        for (std::size_t k = 1; k < breaks.size(); ++k)
            total += static_cast<long double>(breaks[k] - breaks[k - 1]) * capacity(breaks[k]);
        return static_cast<double>(total);
    }

    using boost::math::quadrature::gauss_kronrod;
    auto integrate = [&](double a, double b) {
        return gauss_kronrod<double, 31>::integrate(capacity, a, b, 20, 1e-13);
    };

    long double total = 0.0L;
    for (std::size_t k = 1; k < breaks.size(); ++k) total += integrate(breaks[k - 1], breaks[k]);

    constexpr double kRelTol = 1e-8;
    constexpr double kDivergenceBound = 1e12;
    constexpr int kMaxWindows = 1000;
    constexpr int kStallWindows = 8;
    double lo = breaks.back() > 0.0 ? breaks.back() : 1.0;
    double previous = -1.0;
    int stalled = 0;
    for (int w = 0; w < kMaxWindows; ++w) {
        const double piece = integrate(lo, 2.0 * lo);
        total += piece;
        lo *= 2.0;
        if (total > kDivergenceBound) return kInf;
        if (piece == 0.0) return static_cast<double>(total);
        if (previous > 0.0) {
            const double ratio = piece / previous;
            if (ratio >= 1.0) {
                if (++stalled >= kStallWindows) return kInf;
            } else {
                stalled = 0;
                const double tail = piece * ratio / (1.0 - ratio);
                if (tail <= kRelTol * static_cast<double>(total)) return static_cast<double>(total) + tail;
            }
        }
        previous = piece;
    }
    throw QuadratureNotConverged("choquet integral could not be bracketed within relative tolerance 1e-8");
}

double truncated_expectation(const AmbiguitySet& set, double c, Sign sign) {
    require_scalar(set, "truncated_expectation");
    if (!(c > 0.0)) throw ValueError("truncation level must be > 0");
    const double s = sign == Sign::Plus ? 1.0 : -1.0;
    double best = -kInf;
    for (const auto& m : set.members()) {
        double v = 0.0;
        if (m.is_finite()) {
            long double acc = 0.0L;
            for (const auto& a : m.as_finite().atoms) acc += a.weight * std::clamp(s * a.value[0], -c, c);
            v = static_cast<double>(acc);
        } else {
            const auto& p = m.as_pareto();
            const double rm = sign == Sign::Plus ? p.right_mass : 1.0 - p.right_mass;
            v = (2.0 * rm - 1.0) * pareto_clipped_abs_mean(p, c);
        }
        best = std::max(best, v);
    }
    return best;
}

MomentReport breve_expectation(const AmbiguitySet& set, double tol) {
    require_scalar(set, "breve_expectation");
    if (!(tol > 0.0)) throw ValueError("tolerance must be > 0");
    double c = 1.0;
    for (const auto& m : set.members()) {
        if (m.is_pareto() && m.as_pareto().alpha <= 1.0)
            throw NotConvergent("pareto member with alpha <= 1 has no mean");
        c = std::max(c, m.magnitude_hint());
    }
    constexpr int kMaxDoublings = 1000;
    for (int i = 0; i < kMaxDoublings && std::isfinite(2.0 * c); ++i, c *= 2.0) {
        const double up = truncated_expectation(set, c, Sign::Plus);
        const double up2 = truncated_expectation(set, 2.0 * c, Sign::Plus);
        const double lo = -truncated_expectation(set, c, Sign::Minus);
        const double lo2 = -truncated_expectation(set, 2.0 * c, Sign::Minus);
        if (std::fabs(up - up2) < tol && std::fabs(lo - lo2) < tol) {
            MomentReport r;
            r.upper_mean = up2;
            r.lower_mean = lo2;
            r.upper_second = upper_second_moment(set);
            r.truncation_used = 2.0 * c;
            r.converged = true;
            return r;
        }
    }
    throw NotConvergent("truncated means did not settle before the doubling schedule ran out");
}

double upper_second_moment(const AmbiguitySet& set) {
    double best = 0.0;
    for (const auto& m : set.members()) {
        if (m.is_pareto()) {
            const auto& p = m.as_pareto();
            if (p.alpha <= 2.0) return kInf;
            best = std::max(best, p.scale * p.scale * p.alpha / (p.alpha - 2.0));
        } else {
            long double acc = 0.0L;
            for (const auto& a : m.as_finite().atoms) acc += a.weight * squared_norm(a.value);
            best = std::max(best, static_cast<double>(acc));
        }
    }
    return best;
}

double upper_tail_excess(const AmbiguitySet& set, double c) {
    double best = 0.0;
    for (const auto& m : set.members()) {
        if (m.is_pareto()) {
            const auto& p = m.as_pareto();
            if (p.alpha <= 1.0) return kInf;
            const double v = c >= p.scale
                                 ? std::pow(p.scale, p.alpha) * std::pow(c, 1.0 - p.alpha) / (p.alpha - 1.0)
                                 : p.scale * p.alpha / (p.alpha - 1.0) - c;
            best = std::max(best, v);
        } else {
            long double acc = 0.0L;
            for (const auto& a : m.as_finite().atoms) acc += a.weight * std::max(0.0, std::sqrt(squared_norm(a.value)) - c);
            best = std::max(best, static_cast<double>(acc));
        }
    }
    return best;
}

double upper_clipped_square(const AmbiguitySet& set, double c) {
    double best = 0.0;
    for (const auto& m : set.members()) {
        if (m.is_pareto()) {
            const auto& p = m.as_pareto();
            double v = c * c;
            if (c > p.scale) {
                const double s2 = p.scale * p.scale;
                v = p.alpha == 2.0
                        ? s2 + 2.0 * s2 * std::log(c / p.scale)
                        : s2 + 2.0 * std::pow(p.scale, p.alpha) *
                                   (std::pow(c, 2.0 - p.alpha) - std::pow(p.scale, 2.0 - p.alpha)) / (2.0 - p.alpha);
            }
            best = std::max(best, v);
        } else {
            long double acc = 0.0L;
            for (const auto& a : m.as_finite().atoms) acc += a.weight * std::min(squared_norm(a.value), c * c);
            best = std::max(best, static_cast<double>(acc));
        }
    }
    return best;
}

std::vector<Point> member_means(const AmbiguitySet& set) {
    std::vector<Point> out;
    out.reserve(set.size());
    for (const auto& m : set.members()) out.push_back(m.mean());
    return out;
}

}  // namespace subexp
