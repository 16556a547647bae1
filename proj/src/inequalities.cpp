// SPDX-License-Identifier: Apache-2.0
#include "subexp/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "subexp/errors.hpp"
#include "subexp/expectation.hpp"
#include "subexp/simplex.hpp"

namespace subexp {

namespace {

std::string context_of(const LatticeModel& model, const char* what, std::size_t n, double x) {
    std::ostringstream os;
    os << what << " model=" << model.set().label() << " n=" << n << " x=" << x;
    return os.str();
}

// max over members of E_theta[(X - c)^2].
double upper_centred_second(const AmbiguitySet& set, double c) {
    return upper_expectation(set, TestFunction::scalar([c](double v) { return (v - c) * (v - c); }, kInf, kInf, 2.0));
}

double upper_mean(const AmbiguitySet& set) {
    double best = -kInf;
    for (const auto& m : member_means(set)) best = std::max(best, m[0]);
    return best;
}

double lower_mean(const AmbiguitySet& set) {
    double best = kInf;
    for (const auto& m : member_means(set)) best = std::min(best, m[0]);
    return best;
}

}  // namespace

BoundReport make_report(double lhs, double rhs, double ci_half_width, std::string context) {
    BoundReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ci_half_width = ci_half_width;
    r.satisfied = lhs <= rhs + ci_half_width;
    r.context = std::move(context);
    return r;
}

double kolmogorov_upper_bound(double b2, double x) {
    if (!(x > 0.0)) throw ValueError("x must be > 0");
    if (b2 < 0.0) throw ValueError("B2 must be >= 0");
    return (std::numbers::e + 1.0) * b2 / (x * x);
}

double exponential_bound(double b2, double x, double y) {
    if (!(x > 0.0) || !(y > 0.0)) throw ValueError("x and y must be > 0");
    if (b2 < 0.0) throw ValueError("B2 must be >= 0");
    if (b2 == 0.0) return 0.0;
    const double r = x / y;
    return std::exp(r - r * (b2 / (x * y) + 1.0) * std::log1p(x * y / b2));
}

double kolmogorov_lower_capacity_bound(std::span<const double> second_moments, std::span<const Point> mus,
                                       double x) {
    if (!(x > 0.0)) throw ValueError("x must be > 0");
    if (second_moments.size() != mus.size()) throw ValueError("one mu per summand is required");
    long double total = 0.0L;
    for (std::size_t k = 0; k < mus.size(); ++k) {
        double norm2 = 0.0;
        for (double v : mus[k]) norm2 += v * v;
        total += second_moments[k] - norm2;
    }
    return 2.0 * static_cast<double>(total) / (x * x);
}

double kolmogorov_lower_capacity_bound(const AmbiguitySet& set, std::span<const Point> mus, double x) {
    const auto means = member_means(set);
    for (const auto& mu : mus)
        if (simplex_least_squares(means, mu).residual > kAttainTolerance)
            throw MuNotAttainable("mu is not a mixture of member means");
    const std::vector<double> seconds(mus.size(), upper_second_moment(set));
    return kolmogorov_lower_capacity_bound(seconds, mus, x);
}

double levy_beta(const LatticeModel& model, std::size_t steps, double alpha) {
    if (steps == 0) return 0.0;
    const double q = model.quantum();
    const long long reach = static_cast<long long>(steps) *
                            std::max(std::llabs(model.min_step()), std::llabs(model.max_step()));
    auto capacity = [&](long long j) {
        const double beta = q * static_cast<double>(j);
        return dp_value(model,
                        PathFunctional::terminal_sum(steps, [beta](double s) { return std::fabs(s) > beta ? 1.0 : 0.0; }),
                        Mode::Upper);
    };
    // Smallest j in [0, reach] with capacity(j) <= alpha; capacity(reach) = 0.
    long long lo = 0, hi = reach;
    if (capacity(0) <= alpha) return 0.0;
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        (capacity(mid) <= alpha ? hi : lo) = mid;
    }
    return q * static_cast<double>(hi);
}

BoundReport levy_bound_check(const LatticeModel& model, std::size_t n, double x, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValueError("alpha must lie in (0,1)");
    if (!(x > 0.0)) throw ValueError("x must be > 0");
    std::map<std::size_t, double> cache;
    std::vector<double> beta(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t steps = n - k;
        auto it = cache.find(steps);
        if (it == cache.end()) it = cache.emplace(steps, levy_beta(model, steps, alpha)).first;
        beta[k] = it->second;
    }
    const double eps = model.quantum() / 2.0;
    const auto event = PathFunctional::barrier(
        n, [beta, x, eps](std::size_t m, double s) { return std::fabs(s) - beta[m] > x + eps; },
        "max_k(|S_k|-beta_k)>x+eps");
    const double lhs = (1.0 - alpha) * dp_value(model, event, Mode::Upper);
    const double rhs = dp_value(
        model, PathFunctional::terminal_sum(n, [x](double s) { return std::fabs(s) > x ? 1.0 : 0.0; }), Mode::Upper);
    std::ostringstream os;
    os << context_of(model, "levy", n, x) << " alpha=" << alpha;
    return make_report(lhs, rhs, 0.0, os.str());
}

BoundReport check_inequality(const LatticeModel& model, Inequality which, std::size_t n, double x,
                             std::optional<double> y, std::optional<double> mu) {
    if (!(x > 0.0)) throw ValueError("x must be > 0");
    const AmbiguitySet& set = model.set();
    switch (which) {
        case Inequality::KolmogorovUpper:
        case Inequality::Exponential: {
            const double centre = upper_mean(set);
            const double b2 = static_cast<double>(n) * upper_centred_second(set, centre);
            const auto event = PathFunctional::barrier(
                n, [centre, x](std::size_t m, double s) { return s - static_cast<double>(m) * centre >= x; },
                "max_m sum(Z)>=x");
            const double lhs = dp_value(model, event, Mode::Upper);
            if (which == Inequality::KolmogorovUpper)
                return make_report(lhs, kolmogorov_upper_bound(b2, x), 0.0, context_of(model, "kolmogorov_upper", n, x));
            const double yy = y.value_or(x);
            // V(max_k Z_k >= y) = 1 - lower capacity that every increment stays below y.
            std::vector<std::size_t> ends(n);
            for (std::size_t k = 0; k < n; ++k) ends[k] = k + 1;
            const auto below = PathFunctional::all_blocks_hit(ends, std::vector<Interval>(n, Interval::less_than(yy + centre)));
            const double single = 1.0 - dp_value(model, below, Mode::Lower);
            std::ostringstream os;
            os << context_of(model, "exponential", n, x) << " y=" << yy;
            return make_report(lhs, single + exponential_bound(b2, x, yy), 0.0, os.str());
        }
        case Inequality::KolmogorovLower: {
            const double lo = lower_mean(set), hi = upper_mean(set);
            const double m = mu.value_or(0.5 * (lo + hi));
            const std::vector<Point> mus(n, Point{m});
            const double rhs = kolmogorov_lower_capacity_bound(set, mus, x);
            const auto event = PathFunctional::barrier(
                n, [m, x](std::size_t k, double s) { return std::fabs(s - static_cast<double>(k) * m) >= x; },
                "max_m |sum(Z-mu)|>=x");
            const double lhs = dp_value(model, event, Mode::Lower);
            std::ostringstream os;
            os << context_of(model, "kolmogorov_lower", n, x) << " mu=" << m;
            return make_report(lhs, rhs, 0.0, os.str());
        }
    }
    throw ValueError("unknown inequality");
}

SeriesReport choquet_series_test(const Distribution& dist, double p, double m, std::size_t k) {
    if (dist.dimension() != 1) throw ValueError("series test needs a scalar distribution");
    if (!(p >= 1.0 && p < 2.0)) throw ValueError("p must lie in [1,2)");
    if (!(m > 0.0)) throw ValueError("M must be > 0");
    if (k < 1000) throw ValueError("series horizon K must be >= 1000");
    const AmbiguitySet set({dist}, "series");

    auto term = [&](double i) {
        const double a = m * std::pow(i, 1.0 / p);
        return dist.probability(Interval::at_least(a)) + dist.probability(Interval::at_most(-a));
    };
    const std::size_t k100 = k / 100, k10 = k / 10;
    SeriesReport r;
    long double acc = 0.0L;
    for (std::size_t i = 1; i <= k; ++i) {
        acc += term(static_cast<double>(i));
        if (i == k100) r.partial_k100 = static_cast<double>(acc);
        if (i == k10) r.partial_k10 = static_cast<double>(acc);
    }
    r.partial_k = static_cast<double>(acc);
    const double inc_near = r.partial_k10 - r.partial_k100;
    const double inc_far = r.partial_k - r.partial_k10;

    if (dist.is_pareto()) {
        const auto& par = dist.as_pareto();
        const double a = par.alpha / p;
        r.expected_ratio = std::pow(10.0, 1.0 - a);
        // integral over [K/10, K] of (scale / (M t^(1/p)))^alpha dt
        const double lo = static_cast<double>(k10), hi = static_cast<double>(k);
        const double coef = std::pow(par.scale / m, par.alpha);
        r.closed_form_increment = a == 1.0 ? coef * std::log(hi / lo)
                                           : coef * (std::pow(hi, 1.0 - a) - std::pow(lo, 1.0 - a)) / (1.0 - a);
    } else {
        r.expected_ratio = 0.0;
        long double exact = 0.0L;
        for (std::size_t i = k10 + 1; i <= k; ++i) exact += term(static_cast<double>(i));
        r.closed_form_increment = static_cast<double>(exact);
    }

    constexpr double kConvergentRatio = 0.9;
    if (inc_far == 0.0) {
        r.increment_ratio = 0.0;
        r.series_convergent = true;
    } else {
        r.increment_ratio = inc_far / inc_near;
        r.series_convergent = r.increment_ratio <= kConvergentRatio;
    }
    r.tail_matches = r.closed_form_increment == 0.0
                         ? inc_far == 0.0
                         : std::fabs(inc_far - r.closed_form_increment) <= 0.1 * r.closed_form_increment;

    r.choquet = choquet_integral(set, Transform::abs_power(p));
    r.choquet_finite = std::isfinite(r.choquet);
    r.agree = r.series_convergent == r.choquet_finite;

    for (int j = 0; j <= 20; ++j) {
        const double c = std::ldexp(1.0, j);
        r.c_grid.push_back(c);
        r.tail_excess_scaled.push_back(upper_tail_excess(set, c) * std::pow(c, p - 1.0));
        r.clipped_square_scaled.push_back(upper_clipped_square(set, c) * std::pow(c, p - 2.0));
    }
    return r;
}

BorelCantelliReport borel_cantelli_diagnostic(std::span<const double> capacities, double io_frequency) {
    BorelCantelliReport r;
    long double total = 0.0L, tail = 0.0L;
    for (std::size_t i = 0; i < capacities.size(); ++i) {
        total += capacities[i];
        if (2 * i >= capacities.size()) tail += capacities[i];
    }
    r.capacity_sum = static_cast<double>(total);
    r.tail_sum = static_cast<double>(tail);
    r.summable = r.tail_sum < 1e-6;
    if (r.summable) {
        r.asserted = true;
        r.passed = io_frequency == 0.0;
    }
    return r;
}

}  // namespace subexp
