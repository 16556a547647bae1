// SPDX-License-Identifier: Apache-2.0
#include "subexp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "subexp/errors.hpp"

namespace subexp {

namespace {

double pareto_cdf(const TwoSidedPareto& d, double x) {
    if (x == -kInf) return 0.0;
    if (x == kInf) return 1.0;
    if (x < -d.scale) return (1.0 - d.right_mass) * std::pow(d.scale / -x, d.alpha);
    if (x < d.scale) return 1.0 - d.right_mass;
    return 1.0 - d.right_mass * std::pow(d.scale / x, d.alpha);
}

}  // namespace

Distribution Distribution::finite(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ValueError("finite distribution needs at least one atom");
    const std::size_t d = atoms.front().value.size();
    if (d == 0) throw ValueError("atom values must have dimension >= 1");
    long double total = 0.0L;
    for (const auto& a : atoms) {
        if (a.value.size() != d) throw ValueError("atoms of mixed dimension");
        if (!(a.weight > 0.0)) throw ValueError("atom weights must be strictly positive");
        for (double v : a.value)
            if (!std::isfinite(v)) throw ValueError("atom values must be finite");
        total += a.weight;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "atom weights sum to " << static_cast<double>(total) << ", expected 1";
        throw ValueError(os.str());
    }
    std::vector<const Point*> sorted;
    sorted.reserve(atoms.size());
    for (const auto& a : atoms) sorted.push_back(&a.value);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return *a < *b; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (*sorted[i] == *sorted[i - 1]) throw ValueError("atom values must be pairwise distinct");
    return Distribution(FiniteDiscrete{std::move(atoms)});
}

Distribution Distribution::finite1d(const std::vector<std::pair<double, double>>& atoms) {
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (auto [v, w] : atoms) out.push_back({Point{v}, w});
    return finite(std::move(out));
}

Distribution Distribution::point_mass(Point value) {
    return finite({Atom{std::move(value), 1.0}});
}

Distribution Distribution::pareto(double alpha, double scale, double right_mass) {
    if (!(alpha > 0.0)) throw ValueError("pareto alpha must be > 0");
    if (!(scale > 0.0)) throw ValueError("pareto scale must be > 0");
    if (!(right_mass >= 0.0 && right_mass <= 1.0))
        throw ValueError("pareto right_mass must lie in [0,1]");
    return Distribution(TwoSidedPareto{alpha, scale, right_mass});
}

std::size_t Distribution::dimension() const {
    return is_finite() ? as_finite().atoms.front().value.size() : 1;
}

Distribution Distribution::project(std::span<const double> direction) const {
    if (direction.size() != dimension()) throw ValueError("projection direction has wrong dimension");
    if (is_pareto()) return scaled(direction[0]);
    std::map<double, long double> merged;
    for (const auto& a : as_finite().atoms) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.value.size(); ++i) dot += direction[i] * a.value[i];
        merged[dot] += a.weight;
    }
    std::vector<Atom> atoms;
    atoms.reserve(merged.size());
    for (auto [v, w] : merged) atoms.push_back({Point{v}, static_cast<double>(w)});
    return Distribution(FiniteDiscrete{std::move(atoms)});
}

Distribution Distribution::scaled(double factor) const {
    if (is_pareto()) {
        const auto& p = as_pareto();
        if (factor == 0.0) return point_mass(Point{0.0});
        const double rm = factor > 0.0 ? p.right_mass : 1.0 - p.right_mass;
        return Distribution(TwoSidedPareto{p.alpha, p.scale * std::fabs(factor), rm});
    }
    if (factor == 0.0) return point_mass(Point(dimension(), 0.0));
    FiniteDiscrete f = as_finite();
    for (auto& a : f.atoms)
        for (double& v : a.value) v *= factor;
    return Distribution(std::move(f));
}

double Distribution::probability(const Interval& event, std::size_t coord) const {
    if (coord >= dimension()) throw ValueError("event coordinate out of range");
    if (is_pareto()) {
        const auto& p = as_pareto();
        // Continuous law: endpoint openness is irrelevant.
        return std::max(0.0, pareto_cdf(p, event.hi) - pareto_cdf(p, event.lo));
    }
    // Summed in sorted order so the result does not depend on atom order.
    std::vector<double> hits;
    for (const auto& a : as_finite().atoms)
        if (event.contains(a.value[coord])) hits.push_back(a.weight);
    std::sort(hits.begin(), hits.end());
    long double total = 0.0L;
    for (double w : hits) total += w;
    return std::min(1.0, static_cast<double>(total));
}

Point Distribution::mean() const {
    if (is_pareto()) {
        const auto& p = as_pareto();
        if (p.alpha <= 1.0) throw NotConvergent("pareto member with alpha <= 1 has no mean");
        return Point{(2.0 * p.right_mass - 1.0) * p.scale * p.alpha / (p.alpha - 1.0)};
    }
    const auto& atoms = as_finite().atoms;
    std::vector<long double> acc(dimension(), 0.0L);
    for (const auto& a : atoms)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a.weight * static_cast<long double>(a.value[i]);
    return Point(acc.begin(), acc.end());
}

double Distribution::magnitude_hint() const {
    if (is_pareto()) return as_pareto().scale;
    double m = 0.0;
    for (const auto& a : as_finite().atoms)
        for (double v : a.value) m = std::max(m, std::fabs(v));
    return m;
}

AmbiguitySet::AmbiguitySet(std::vector<Distribution> members, std::string label)
    : members_(std::move(members)), label_(std::move(label)) {
    if (members_.empty()) throw ValueError("ambiguity set needs at least one member");
    const std::size_t d = members_.front().dimension();
    for (const auto& m : members_)
        if (m.dimension() != d) throw ValueError("ambiguity set members differ in dimension");
}

bool AmbiguitySet::all_finite() const {
    return std::all_of(members_.begin(), members_.end(), [](const auto& m) { return m.is_finite(); });
}

AmbiguitySet AmbiguitySet::project(std::span<const double> direction) const {
    std::vector<Distribution> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.project(direction));
    return AmbiguitySet(std::move(out), label_);
}

AmbiguitySet AmbiguitySet::scaled(double factor) const {
    std::vector<Distribution> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.scaled(factor));
    return AmbiguitySet(std::move(out), label_);
}

AmbiguitySet AmbiguitySet::with_member(Distribution extra) const {
    auto out = members_;
    out.push_back(std::move(extra));
    return AmbiguitySet(std::move(out), label_);
}

TestFunction TestFunction::scalar(std::function<double(double)> f, double lipschitz,
                                  double sup_bound, double growth) {
    return {[f = std::move(f)](std::span<const double> x) { return f(x[0]); }, lipschitz,
            sup_bound, growth};
}

TestFunction TestFunction::constant(double c) {
    return {[c](std::span<const double>) { return c; }, 0.0, std::fabs(c), 0.0};
}

TestFunction TestFunction::coordinate(std::size_t j) {
    return {[j](std::span<const double> x) { return x[j]; }, 1.0, kInf, 1.0};
}

TestFunction TestFunction::square() {
    return {[](std::span<const double> x) {
                double s = 0.0;
                for (double v : x) s += v * v;
                return s;
            },
            kInf, kInf, 2.0};
}

TestFunction TestFunction::negated() const {
    return {[f = eval](std::span<const double> x) { return -f(x); }, lipschitz, sup_bound, growth};
}

}  // namespace subexp
