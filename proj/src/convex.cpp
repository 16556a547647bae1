// SPDX-License-Identifier: Apache-2.0
#include "subexp/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "subexp/errors.hpp"
#include "subexp/expectation.hpp"
#include "subexp/random.hpp"

namespace subexp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::size_t net_count(std::size_t d, double delta) {
    const double raw = std::ceil(std::pow(4.0 / delta, static_cast<double>(d - 1)));
    return static_cast<std::size_t>(std::min<double>(raw, kMaxNetSize));
}

}  // namespace

DirectionNet DirectionNet::build(std::size_t d, double delta) {
    if (d == 0) throw ValueError("dimension must be >= 1");
    if (d > kMaxMeanSetDimension)
        throw DimensionTooLarge("mean sets are limited to dimension " + std::to_string(kMaxMeanSetDimension));
    if (!(delta > 0.0 && delta <= 1.0)) throw ValueError("net delta must lie in (0, 1]");

    DirectionNet net{d, delta, {}};
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (d == 1) {
        net.directions = {{-1.0}, {1.0}};
    } else if (d == 2) {
        const auto count = static_cast<std::size_t>(std::ceil(two_pi / delta));
        net.directions.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double a = two_pi * static_cast<double>(i) / static_cast<double>(count);
            net.directions.push_back({std::cos(a), std::sin(a)});
        }
    } else if (d == 3) {
        const std::size_t count = net_count(d, delta);
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        net.directions.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * static_cast<double>(i);
            net.directions.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
    } else {
        // Kronecker sequence with the generalized golden ratio (root of x^4 = x + 1).
        const std::size_t count = net_count(d, delta);
        const double g = 1.2207440846057596;
        const double a1 = 1.0 / g, a2 = 1.0 / (g * g), a3 = 1.0 / (g * g * g);
        net.directions.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double k = static_cast<double>(i);
            const double u = std::fmod(0.5 + a1 * k, 1.0);
            const double v = std::fmod(0.5 + a2 * k, 1.0);
            const double w = std::fmod(0.5 + a3 * k, 1.0);
            const double r1 = std::sqrt(u), r2 = std::sqrt(1.0 - u);
            net.directions.push_back({r1 * std::cos(two_pi * v), r1 * std::sin(two_pi * v),
                                      r2 * std::cos(two_pi * w), r2 * std::sin(two_pi * w)});
        }
    }
    return net;
}

double DirectionNet::probe_mesh(std::size_t probes, std::uint64_t seed) const {
    double worst = 0.0;
    Point v(dimension);
    for (std::size_t t = 0; t < probes; ++t) {
        CounterStream rng(seed, t);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& x : v) {
                x = rng.normal();
                norm += x * x;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        double best = kInf;
        for (const auto& p : directions) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < dimension; ++i) d2 += (p[i] - v[i]) * (p[i] - v[i]);
            best = std::min(best, d2);
        }
        worst = std::max(worst, std::sqrt(best));
    }
    return worst;
}

double support_function(const AmbiguitySet& set, std::span<const double> direction) {
    if (direction.size() != set.dimension()) throw ValueError("direction has wrong dimension");
    if (std::all_of(direction.begin(), direction.end(), [](double x) { return x == 0.0; })) return 0.0;
    return breve_expectation(set.project(direction)).upper_mean;
}

MeanSet::MeanSet(DirectionNet net, std::vector<double> support_values)
    : net_(std::move(net)), support_(std::move(support_values)) {
    if (support_.size() != net_.directions.size())
        throw ValueError("support values must align with the direction net");
}

double MeanSet::distance(std::span<const double> y) const {
    if (y.size() != dimension()) throw ValueError("point has wrong dimension");
    double best = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i)
        best = std::max(best, dot(net_.directions[i], y) - support_[i]);
    return best;
}

MeanSet build_mean_set(const AmbiguitySet& set, double delta) {
    auto net = DirectionNet::build(set.dimension(), delta);
    std::vector<double> values;
    values.reserve(net.directions.size());
    for (const auto& p : net.directions) values.push_back(support_function(set, p));
    return MeanSet(std::move(net), std::move(values));
}

double distance_to_mean_set(const MeanSet& mean_set, std::span<const double> y) {
    return mean_set.distance(y);
}

}  // namespace subexp
