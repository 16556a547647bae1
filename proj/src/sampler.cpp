// SPDX-License-Identifier: Apache-2.0
#include "subexp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "subexp/errors.hpp"
#include "subexp/expectation.hpp"
#include "subexp/random.hpp"
#include "subexp/simplex.hpp"

namespace subexp {

namespace {

std::string format_number(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::pair<std::size_t, std::size_t> extreme_members(const AmbiguitySet& set) {
    if (set.dimension() != 1) throw ValueError("extreme members need a one-dimensional set");
    const auto means = member_means(set);
    std::size_t hi = 0, lo = 0;
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (means[i][0] > means[hi][0]) hi = i;
        if (means[i][0] < means[lo][0]) lo = i;
    }
    return {hi, lo};
}

std::vector<double> unit_weights(std::size_t i, std::size_t count) {
    std::vector<double> w(count, 0.0);
    w.at(i) = 1.0;
    return w;
}

// Per-member inverse-CDF sampler.
struct MemberSampler {
    const Distribution* member = nullptr;
    std::vector<double> cumulative;

    explicit MemberSampler(const Distribution& m) : member(&m) {
        if (m.is_finite()) {
            long double acc = 0.0L;
            for (const auto& a : m.as_finite().atoms) cumulative.push_back(static_cast<double>(acc += a.weight));
            cumulative.back() = 1.0;
        }
    }

    void draw(double u, double* out) const {
        if (member->is_pareto()) {
            const auto& p = member->as_pareto();
            const double left = 1.0 - p.right_mass;
            if (u < left) {
                out[0] = -p.scale * std::pow(u / left, -1.0 / p.alpha);
            } else {
                const double v = std::max((1.0 - u) / p.right_mass, 0x1.0p-60);
                out[0] = p.scale * std::pow(v, -1.0 / p.alpha);
            }
            return;
        }
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
        const auto& v = member->as_finite().atoms[idx].value;
        std::copy(v.begin(), v.end(), out);
    }
};

std::size_t pick(const std::vector<double>& weights, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last = i;
        acc += weights[i];
        if (u < acc) return i;
    }
    return last;
}

}  // namespace

Strategy Strategy::stationary(std::vector<double> weights, std::string label) {
    Strategy s;
    s.kind = Kind::Stationary;
    s.label = std::move(label);
    s.blocks.push_back({static_cast<std::size_t>(-1), std::move(weights), -1});
    return s;
}

Strategy Strategy::pure(std::size_t member, std::size_t member_count, std::string label) {
    return stationary(unit_weights(member, member_count), std::move(label));
}

Strategy Strategy::block_schedule(std::vector<Block> blocks, std::string label) {
    Strategy s;
    s.kind = Kind::BlockSchedule;
    s.label = std::move(label);
    s.blocks = std::move(blocks);
    return s;
}

const std::vector<double>& Strategy::weights_at(std::size_t t) const {
    const auto it = std::lower_bound(blocks.begin(), blocks.end(), t,
                                     [](const Block& b, std::size_t step) { return b.end < step; });
    return it == blocks.end() ? blocks.back().weights : it->weights;
}

void Strategy::validate(std::size_t member_count) const {
    if (blocks.empty()) throw ValueError("strategy has no blocks");
    std::size_t previous = 0;
    for (const auto& b : blocks) {
        if (b.weights.size() != member_count) throw ValueError("mixture size does not match member count");
        double total = 0.0;
        for (double w : b.weights) {
            if (!(w >= 0.0)) throw ValueError("mixture weights must be nonnegative");
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-12) throw ValueError("mixture weights must sum to 1");
        if (b.end <= previous) throw ValueError("block ends must be strictly increasing");
        previous = b.end;
    }
}

std::vector<std::size_t> BlockGrowth::ends(std::size_t count) const {
    std::vector<std::size_t> out;
    out.reserve(count);
    std::size_t previous = 0;
    for (std::size_t k = 1; k <= count; ++k) {
        const double kk = static_cast<double>(k);
        double raw = 0.0;
        switch (kind) {
            case Kind::Geometric: raw = std::ceil(std::pow(parameter, kk)); break;
            case Kind::Superexponential: raw = std::pow(kk, kk); break;
            case Kind::Polynomial: raw = std::ceil(std::pow(kk, parameter)); break;
        }
        if (!(raw < 9.0e18)) throw ValueError("block schedule overflows");
        const auto end = std::max(previous + 1, static_cast<std::size_t>(raw));
        out.push_back(end);
        previous = end;
    }
    return out;
}

std::vector<std::size_t> BlockGrowth::ends_until(std::size_t horizon) const {
    std::vector<std::size_t> out;
    for (std::size_t count = 1;; ++count) {
        out = ends(count);
        if (out.back() >= horizon) break;
    }
    out.back() = horizon;
    if (out.size() >= 2 && out[out.size() - 2] >= horizon) out.pop_back();
    return out;
}

Strategy stationary_for_target(const AmbiguitySet& set, double b) {
    const auto [hi, lo] = extreme_members(set);
    const auto means = member_means(set);
    const double upper = means[hi][0];
    const double lower = means[lo][0];
    constexpr double kSlack = 1e-12;
    if (b < lower - kSlack || b > upper + kSlack)
        throw TargetOutOfRange("target " + format_number(b) + " outside [" + format_number(lower) + ", " +
                               format_number(upper) + "]");
    std::vector<double> w(set.size(), 0.0);
    if (upper - lower <= kSlack) {
        w[hi] = 1.0;
    } else {
        const double alpha = std::clamp((b - lower) / (upper - lower), 0.0, 1.0);
        w[hi] += alpha;
        w[lo] += 1.0 - alpha;
    }
    return Strategy::stationary(std::move(w), "target=" + format_number(b));
}

Strategy oscillation_schedule(const AmbiguitySet& set, std::size_t epochs, BlockGrowth growth) {
    if (epochs < 2) throw ValueError("oscillation schedule needs at least two epochs");
    const auto [hi, lo] = extreme_members(set);
    std::vector<Block> blocks;
    const auto ends = growth.ends(epochs);
    for (std::size_t k = 0; k < ends.size(); ++k)
        blocks.push_back({ends[k], unit_weights(k % 2 == 0 ? hi : lo, set.size()), -1});
    return Strategy::block_schedule(std::move(blocks), "oscillation");
}

Strategy oscillation_until(const AmbiguitySet& set, std::size_t horizon, BlockGrowth growth) {
    const auto [hi, lo] = extreme_members(set);
    std::vector<Block> blocks;
    const auto ends = growth.ends_until(horizon);
    for (std::size_t k = 0; k < ends.size(); ++k)
        blocks.push_back({ends[k], unit_weights(k % 2 == 0 ? hi : lo, set.size()), -1});
    return Strategy::block_schedule(std::move(blocks), "oscillation");
}

std::vector<double> mixture_for_mean(const AmbiguitySet& set, std::span<const double> target) {
    const auto means = member_means(set);
    const auto fit = simplex_least_squares(means, target);
    if (fit.residual > kAttainTolerance)
        throw TargetOutsideM("target is not a mixture of member means (residual " + format_number(fit.residual) + ")");
    return fit.weights;
}

std::vector<Point> mean_set_targets(const AmbiguitySet& set, const MeanSet& mean_set, std::size_t m) {
    if (m == 0) throw ValueError("need at least one target");
    const auto means = member_means(set);
    const std::size_t d = set.dimension();
    std::vector<Point> targets;

    if (d == 1) {
        double lo = means[0][0], hi = means[0][0];
        for (const auto& p : means) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        if (m == 1) {
            targets.push_back({0.5 * (lo + hi)});
        } else {
            for (std::size_t j = 0; j < m; ++j)
                targets.push_back({lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m - 1)});
        }
    } else {
        // Candidates: mixtures of member means with weights on a 1/R grid.
        const std::size_t k = means.size();
        std::size_t resolution = 4 * m;
        auto count_for = [k](std::size_t r) {
            double c = 1.0;
            for (std::size_t i = 1; i < k; ++i) c = c * static_cast<double>(r + i) / static_cast<double>(i);
            return c;
        };
        while (resolution > 1 && count_for(resolution) > 2e5) --resolution;
        std::map<Point, bool> seen;
        std::vector<Point> candidates;
        std::vector<std::size_t> counts(k, 0);
        auto emit = [&](auto&& self, std::size_t idx, std::size_t remaining) -> void {
            if (idx + 1 == k) {
                counts[idx] = remaining;
                Point p(d, 0.0);
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t r = 0; r < d; ++r)
                        p[r] += static_cast<double>(counts[i]) / static_cast<double>(resolution) * means[i][r];
                for (double& v : p) v = std::round(v * 1e12) / 1e12;
                if (!seen.contains(p)) {
                    seen[p] = true;
                    candidates.push_back(p);
                }
                return;
            }
            for (std::size_t c = 0; c <= remaining; ++c) {
                counts[idx] = c;
                self(self, idx + 1, remaining - c);
            }
        };
        emit(emit, 0, resolution);
        std::sort(candidates.begin(), candidates.end());

        auto dist2 = [](const Point& a, const Point& b) {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
            return s;
        };
        std::vector<double> nearest(candidates.size(), kInf);
        std::size_t next = 0;
        while (targets.size() < std::min(m, candidates.size())) {
            targets.push_back(candidates[next]);
            std::size_t best = 0;
            double best_d = -1.0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                nearest[i] = std::min(nearest[i], dist2(candidates[i], targets.back()));
                if (nearest[i] > best_d + 1e-15) {
                    best_d = nearest[i];
                    best = i;
                }
            }
            next = best;
        }
        while (targets.size() < m) targets.push_back(targets.back());

        // Nearest-neighbour tour starting from the lexicographically smallest pick.
        std::sort(targets.begin(), targets.end());
        std::vector<Point> tour{targets.front()};
        std::vector<bool> used(targets.size(), false);
        used[0] = true;
        for (std::size_t step = 1; step < targets.size(); ++step) {
            std::size_t best = 0;
            double best_d = kInf;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                if (used[i]) continue;
                const double dd = dist2(targets[i], tour.back());
                if (dd < best_d - 1e-15) {
                    best_d = dd;
                    best = i;
                }
            }
            used[best] = true;
            tour.push_back(targets[best]);
        }
        targets = std::move(tour);
    }

    const double tol = mean_set.default_tolerance();
    for (const auto& t : targets)
        if (mean_set.distance(t) > tol) throw TargetOutsideM("target lies outside the mean set");
    return targets;
}

Strategy target_chasing_schedule(const AmbiguitySet& set, const MeanSet& mean_set, std::size_t m,
                                 std::size_t epochs, const TargetChasingOptions& options) {
    if (epochs < 1 || options.first_epoch < 1 || options.first_epoch > epochs)
        throw ValueError("target chasing needs 1 <= first_epoch <= epochs");
    Strategy s;
    s.kind = Strategy::Kind::TargetChasing;
    s.label = "target_chasing";
    s.targets = mean_set_targets(set, mean_set, m);

    std::vector<std::vector<double>> mixtures;
    for (const auto& t : s.targets) mixtures.push_back(mixture_for_mean(set, t));

    std::vector<int> order;
    for (std::size_t k = options.first_epoch; k <= epochs; ++k) {
        const std::size_t visible = std::min(k, m);
        std::vector<int> epoch;
        for (std::size_t j = 0; j < visible; ++j) epoch.push_back(static_cast<int>(j));
        if (options.serpentine && (k - options.first_epoch) % 2 == 1) std::reverse(epoch.begin(), epoch.end());
        order.insert(order.end(), epoch.begin(), epoch.end());
    }

    std::vector<std::size_t> ends;
    if (options.horizon > 0) {
        if (!(options.ratio > 1.0)) throw ValueError("block ratio must exceed 1");
        std::size_t previous = 0;
        const std::size_t count = order.size();
        for (std::size_t k = 1; k <= count; ++k) {
            const double raw = std::ceil(static_cast<double>(options.horizon) /
                                         std::pow(options.ratio, static_cast<double>(count - k)));
            const auto end = std::max(previous + 1, static_cast<std::size_t>(raw));
            ends.push_back(end);
            previous = end;
        }
    } else {
        ends = options.growth.ends(order.size());
    }
    for (std::size_t b = 0; b < order.size(); ++b)
        s.blocks.push_back({ends[b], mixtures[static_cast<std::size_t>(order[b])], order[b]});
    return s;
}

Path sample_path(const AmbiguitySet& set, const Strategy& strategy, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ValueError("path length must be >= 1");
    strategy.validate(set.size());
    const std::size_t d = set.dimension();
    std::vector<MemberSampler> samplers;
    samplers.reserve(set.size());
    for (const auto& m : set.members()) samplers.emplace_back(m);

    Path path;
    path.n = n;
    path.dimension = d;
    path.seed = seed;
    path.strategy_label = strategy.label;
    path.increments.assign(n * d, 0.0);
    path.partial_sums.assign(n * d, 0.0);

    std::size_t block = 0;
    for (std::size_t t = 1; t <= n; ++t) {
        while (block + 1 < strategy.blocks.size() && strategy.blocks[block].end < t) ++block;
        CounterStream rng(seed, t);
        const double u_member = rng.uniform();
        const double u_value = rng.uniform();
        const std::size_t member = pick(strategy.blocks[block].weights, u_member);
        double* inc = &path.increments[(t - 1) * d];
        samplers[member].draw(u_value, inc);
        double* sum = &path.partial_sums[(t - 1) * d];
        const double* prev = t == 1 ? nullptr : sum - d;
        for (std::size_t r = 0; r < d; ++r) sum[r] = (prev ? prev[r] : 0.0) + inc[r];
    }
    return path;
}

}  // namespace subexp
