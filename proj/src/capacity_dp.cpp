// SPDX-License-Identifier: Apache-2.0
#include "subexp/capacity_dp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "subexp/errors.hpp"

namespace subexp {

LatticeModel::LatticeModel(AmbiguitySet set, double quantum) : set_(std::move(set)), quantum_(quantum) {
    if (!(quantum_ > 0.0) || !std::isfinite(quantum_)) throw ValueError("lattice quantum must be positive");
    if (set_.dimension() != 1) throw ValueError("lattice models are one-dimensional");
    bool first = true;
    for (const auto& m : set_.members()) {
        if (!m.is_finite()) throw ValueError("lattice models need finite discrete members");
        std::vector<Step> steps;
        for (const auto& a : m.as_finite().atoms) {
            const double ratio = a.value[0] / quantum_;
            const double rounded = std::round(ratio);
            if (std::fabs(ratio - rounded) > 1e-9) {
                std::ostringstream os;
                os.precision(17);
                os << "atom " << a.value[0] << " is not a multiple of quantum " << quantum_;
                throw NonLattice(os.str());
            }
            const auto k = static_cast<long long>(rounded);
            steps.push_back({k, a.weight});
            min_step_ = first ? k : std::min(min_step_, k);
            max_step_ = first ? k : std::max(max_step_, k);
            first = false;
        }
        members_.push_back(std::move(steps));
    }
}

PathFunctional PathFunctional::terminal_sum(std::size_t n, std::function<double(double)> phi,
                                            std::string description) {
    PathFunctional f;
    f.kind = Kind::TerminalSum;
    f.horizon = n;
    f.terminal = std::move(phi);
    f.description = std::move(description);
    return f;
}

PathFunctional PathFunctional::constant(std::size_t n, double c) {
    return terminal_sum(n, [c](double) { return c; }, "constant");
}

PathFunctional PathFunctional::running_max(std::size_t n, double x, bool absolute) {
    std::ostringstream os;
    os << (absolute ? "max|S_m|>=" : "maxS_m>=") << x;
    if (absolute) return barrier(n, [x](std::size_t, double s) { return std::fabs(s) >= x; }, os.str());
    return barrier(n, [x](std::size_t, double s) { return s >= x; }, os.str());
}

PathFunctional PathFunctional::barrier(std::size_t n, std::function<bool(std::size_t, double)> pred,
                                       std::string description) {
    PathFunctional f;
    f.kind = Kind::RunningMax;
    f.horizon = n;
    f.crossing = std::move(pred);
    f.description = std::move(description);
    return f;
}

PathFunctional PathFunctional::terminal_event(std::size_t n, Interval event) {
    PathFunctional f;
    f.kind = Kind::TerminalEvent;
    f.horizon = n;
    f.event = event;
    f.description = "S_n in interval";
    return f;
}

PathFunctional PathFunctional::all_blocks_hit(std::vector<std::size_t> block_ends, std::vector<Interval> events) {
    if (block_ends.empty() || block_ends.size() != events.size())
        throw ValueError("all_blocks_hit needs one event per block");
    for (std::size_t i = 0; i < block_ends.size(); ++i)
        if (block_ends[i] <= (i == 0 ? 0 : block_ends[i - 1])) throw ValueError("block ends must increase");
    PathFunctional f;
    f.kind = Kind::AllBlocksHit;
    f.horizon = block_ends.back();
    f.block_ends = std::move(block_ends);
    f.block_events = std::move(events);
    f.description = "all blocks hit";
    return f;
}

double PathFunctional::evaluate_path(std::span<const double> s) const {
    if (s.size() != horizon) throw ValueError("path length does not match functional horizon");
    switch (kind) {
        case Kind::TerminalSum: return terminal(s.back());
        case Kind::TerminalEvent: return event.contains(s.back()) ? 1.0 : 0.0;
        case Kind::RunningMax:
            for (std::size_t m = 1; m <= horizon; ++m)
                if (crossing(m, s[m - 1])) return 1.0;
            return 0.0;
        case Kind::AllBlocksHit: {
            double previous = 0.0;
            for (std::size_t i = 0; i < block_ends.size(); ++i) {
                const double here = s[block_ends[i] - 1];
                if (!block_events[i].contains(here - previous)) return 0.0;
                previous = here;
            }
            return 1.0;
        }
    }
    return 0.0;
}

double PathFunctional::evaluate_lattice_path(std::span<const long long> k, double q) const {
    if (k.size() != horizon) throw ValueError("path length does not match functional horizon");
    switch (kind) {
        case Kind::TerminalSum: return terminal(q * static_cast<double>(k.back()));
        case Kind::TerminalEvent: return event.contains(q * static_cast<double>(k.back())) ? 1.0 : 0.0;
        case Kind::RunningMax:
            for (std::size_t m = 1; m <= horizon; ++m)
                if (crossing(m, q * static_cast<double>(k[m - 1]))) return 1.0;
            return 0.0;
        case Kind::AllBlocksHit: {
            long long previous = 0;
            for (std::size_t i = 0; i < block_ends.size(); ++i) {
                const long long here = k[block_ends[i] - 1];
                if (!block_events[i].contains(q * static_cast<double>(here - previous))) return 0.0;
                previous = here;
            }
            return 1.0;
        }
    }
    return 0.0;
}

namespace {

// One backward sweep over `steps` steps on the lattice.
//   terminal(j): value at the last step, state j <-> k = j + steps*kmin
//   absorbed(m, k): optional early value at intermediate step m (returns <0 if none)
class Sweeper {
public:
    Sweeper(const LatticeModel& model, Mode mode, unsigned threads)
        : model_(model), mode_(mode), threads_(std::max(1u, threads)) {}

    template <class Terminal, class Absorb>
    double run(std::size_t steps, Terminal terminal, Absorb absorb) const {
        const long long kmin = model_.min_step();
        const long long span = model_.max_step() - kmin;
        const auto width = [&](std::size_t m) { return static_cast<std::size_t>(m * span + 1); };
        if (width(steps) > kMaxDpStates)
            throw StateSpaceTooLarge("lattice state space exceeds " + std::to_string(kMaxDpStates));

        std::vector<double> next(width(steps));
        for (std::size_t j = 0; j < next.size(); ++j)
            next[j] = terminal(static_cast<long long>(j) + static_cast<long long>(steps) * kmin);

        std::vector<double> current;
        for (std::size_t m = steps; m-- > 0;) {
            current.assign(width(m), 0.0);
            auto sweep = [&](std::size_t begin, std::size_t end) {
                std::vector<long double> terms;
                for (std::size_t j = begin; j < end; ++j) {
                    const long long k = static_cast<long long>(j) + static_cast<long long>(m) * kmin;
                    const double early = absorb(m, k);
                    if (early >= 0.0) {
                        current[j] = early;
                        continue;
                    }
                    double best = mode_ == Mode::Upper ? -kInf : kInf;
                    for (const auto& member : model_.members()) {
                        terms.clear();
                        for (const auto& st : member)
                            terms.push_back(static_cast<long double>(st.weight) *
                                            next[j + static_cast<std::size_t>(st.k - kmin)]);
                        std::sort(terms.begin(), terms.end(),
                                  [](long double a, long double b) { return std::fabs(a) < std::fabs(b); });
                        long double acc = 0.0L;
                        for (long double t : terms) acc += t;
                        const double v = static_cast<double>(acc);
                        best = mode_ == Mode::Upper ? std::max(best, v) : std::min(best, v);
                    }
                    current[j] = best;
                }
            };
            const std::size_t size = current.size();
            if (threads_ == 1 || size < 4096) {
                sweep(0, size);
            } else {
                // Each state is independent within a step; the join is the step barrier.
                std::vector<std::jthread> pool;
                const std::size_t chunk = (size + threads_ - 1) / threads_;
                for (std::size_t b = 0; b < size; b += chunk) pool.emplace_back(sweep, b, std::min(size, b + chunk));
            }
            next.swap(current);
        }
        return next.at(0);
    }

private:
    const LatticeModel& model_;
    Mode mode_;
    unsigned threads_;
};

}  // namespace

double dp_value(const LatticeModel& model, const PathFunctional& f, Mode mode, unsigned threads) {
    if (f.horizon == 0) throw ValueError("functional horizon must be >= 1");
    const double q = model.quantum();
    const Sweeper sweeper(model, mode, threads);
    const auto no_absorb = [](std::size_t, long long) { return -1.0; };
    switch (f.kind) {
        case PathFunctional::Kind::TerminalSum:
            return sweeper.run(f.horizon, [&](long long k) { return f.terminal(q * static_cast<double>(k)); }, no_absorb);
        case PathFunctional::Kind::TerminalEvent:
            return sweeper.run(
                f.horizon, [&](long long k) { return f.event.contains(q * static_cast<double>(k)) ? 1.0 : 0.0; },
                no_absorb);
        case PathFunctional::Kind::RunningMax:
            // Once the barrier is crossed the indicator is 1 whatever follows.
            return sweeper.run(
                f.horizon,
                [&](long long k) { return f.crossing(f.horizon, q * static_cast<double>(k)) ? 1.0 : 0.0; },
                [&](std::size_t m, long long k) {
                    return m >= 1 && f.crossing(m, q * static_cast<double>(k)) ? 1.0 : -1.0;
                });
        case PathFunctional::Kind::AllBlocksHit: {
            // Backward over blocks; the continuation value from a fresh block is a constant.
            double continuation = 1.0;
            for (std::size_t i = f.block_ends.size(); i-- > 0;) {
                const std::size_t len = f.block_ends[i] - (i == 0 ? 0 : f.block_ends[i - 1]);
                const Interval& ev = f.block_events[i];
                const double cont = continuation;
                continuation = sweeper.run(
                    len, [&](long long k) { return ev.contains(q * static_cast<double>(k)) ? cont : 0.0; },
                    no_absorb);
            }
            return continuation;
        }
    }
    return 0.0;
}

double policy_count(const LatticeModel& model, std::size_t horizon) {
    double count = 1.0;
    for (std::size_t m = horizon; m-- > 0;) {
        double level = 0.0;
        for (const auto& member : model.members()) level += std::pow(count, static_cast<double>(member.size()));
        count = level;
    }
    return count;
}

namespace {

class PolicyEnumerator {
public:
    PolicyEnumerator(const LatticeModel& model, const PathFunctional& f) : model_(model), f_(f) {}

    // All policy values from a history node at depth m with lattice history `hist`.
    std::vector<double> values(std::vector<long long>& hist) const {
        if (hist.size() == f_.horizon) return {f_.evaluate_lattice_path(hist, model_.quantum())};
        std::vector<double> out;
        for (const auto& member : model_.members()) {
            std::vector<std::vector<double>> children;
            for (const auto& st : member) {
                hist.push_back((hist.empty() ? 0 : hist.back()) + st.k);
                children.push_back(values(hist));
                hist.pop_back();
            }
            combine(member, children, [&](double v) { out.push_back(v); });
        }
        return out;
    }

    template <class Sink>
    static void combine(const std::vector<LatticeModel::Step>& member, const std::vector<std::vector<double>>& children,
                        Sink&& sink) {
        std::vector<std::size_t> idx(children.size(), 0);
        while (true) {
            long double v = 0.0L;
            for (std::size_t a = 0; a < children.size(); ++a)
                v += static_cast<long double>(member[a].weight) * children[a][idx[a]];
            sink(static_cast<double>(v));
            std::size_t a = 0;
            while (a < idx.size() && ++idx[a] == children[a].size()) idx[a++] = 0;
            if (a == idx.size()) break;
        }
    }

private:
    const LatticeModel& model_;
    const PathFunctional& f_;
};

}  // namespace

double brute_force_value(const LatticeModel& model, const PathFunctional& f, Mode mode) {
    constexpr std::size_t kMaxHorizon = 4, kMaxMembers = 3, kMaxAtoms = 3;
    constexpr double kMaxPolicies = 2e7;
    if (f.horizon == 0) throw ValueError("functional horizon must be >= 1");
    if (f.horizon > kMaxHorizon || model.members().size() > kMaxMembers)
        throw TooLargeForBruteForce("brute force needs n <= 4 and at most 3 members");
    for (const auto& m : model.members())
        if (m.size() > kMaxAtoms) throw TooLargeForBruteForce("brute force needs at most 3 atoms per member");
    if (policy_count(model, f.horizon) > kMaxPolicies)
        throw TooLargeForBruteForce("too many history-dependent policies to enumerate");

    // The root is streamed so its (largest) value set is never materialized.
    const PolicyEnumerator en(model, f);
    double best = mode == Mode::Upper ? -kInf : kInf;
    std::vector<long long> hist;
    for (const auto& member : model.members()) {
        std::vector<std::vector<double>> children;
        for (const auto& st : member) {
            hist.assign(1, st.k);
            children.push_back(en.values(hist));
        }
        PolicyEnumerator::combine(member, children, [&](double v) {
            best = mode == Mode::Upper ? std::max(best, v) : std::min(best, v);
        });
    }
    return best;
}

}  // namespace subexp
