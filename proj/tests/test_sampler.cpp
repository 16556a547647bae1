// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "subexp/capacity_dp.hpp"
#include "subexp/convex.hpp"
#include "subexp/errors.hpp"
#include "subexp/sampler.hpp"

using namespace subexp;
using doctest::Approx;

TEST_CASE("stationary strategies for a target mean") {
    const auto e1 = testing::e1();
    const auto mid = stationary_for_target(e1, 0.25);
    CHECK(mid.weights_at(1)[0] == Approx(0.5));
    CHECK(mid.weights_at(1)[1] == Approx(0.5));
    const auto top = stationary_for_target(e1, 0.5);
    CHECK(top.weights_at(1)[1] == Approx(1.0));
    CHECK(top.weights_at(1)[0] == Approx(0.0));
    CHECK_THROWS_AS(stationary_for_target(e1, 0.7), TargetOutOfRange);
    CHECK_THROWS_AS(stationary_for_target(e1, -0.01), TargetOutOfRange);

    const AmbiguitySet single({Distribution::finite1d({{-1.0, 0.5}, {2.0, 0.5}})}, "single");
    CHECK(stationary_for_target(single, 0.5).weights_at(7)[0] == 1.0);
}

TEST_CASE("oscillation schedule alternates on doubling blocks") {
    const auto s = oscillation_schedule(testing::e1(), 3);
    REQUIRE(s.blocks.size() == 3);
    CHECK(s.blocks[0].end == 2);
    CHECK(s.blocks[1].end == 4);
    CHECK(s.blocks[2].end == 8);
    CHECK(s.weights_at(1)[1] == 1.0);
    CHECK(s.weights_at(2)[1] == 1.0);
    CHECK(s.weights_at(3)[0] == 1.0);
    CHECK(s.weights_at(4)[0] == 1.0);
    CHECK(s.weights_at(5)[1] == 1.0);
    CHECK(s.weights_at(100)[1] == 1.0);
    CHECK(oscillation_schedule(testing::e1(), 2).blocks.size() == 2);
    CHECK_THROWS_AS(oscillation_schedule(testing::e1(), 1), ValueError);
}

TEST_CASE("block growth sequences") {
    CHECK(BlockGrowth::superexponential().ends(4) == std::vector<std::size_t>{1, 4, 27, 256});
    const auto poly = BlockGrowth::polynomial(6.0).ends(3);
    CHECK(poly == std::vector<std::size_t>{1, 64, 729});
    const auto until = BlockGrowth::geometric().ends_until(100);
    CHECK(until.back() == 100);
    CHECK(until.size() == 7);
}

TEST_CASE("strategy validation") {
    CHECK_THROWS_AS(Strategy::stationary({0.5, 0.6}, "bad").validate(2), ValueError);
    CHECK_THROWS_AS(Strategy::stationary({1.5, -0.5}, "bad").validate(2), ValueError);
    CHECK_THROWS_AS(Strategy::block_schedule({{4, {1.0, 0.0}}, {4, {0.0, 1.0}}}, "bad").validate(2), ValueError);
    CHECK_NOTHROW(Strategy::pure(1, 2, "ok").validate(2));
}

TEST_CASE("target grids") {
    const auto e1 = testing::e1();
    const auto ms = build_mean_set(e1, 0.1);
    const auto targets = mean_set_targets(e1, ms, 3);
    REQUIRE(targets.size() == 3);
    std::vector<double> values{targets[0][0], targets[1][0], targets[2][0]};
    std::sort(values.begin(), values.end());
    CHECK(values[0] == Approx(0.0));
    CHECK(values[1] == Approx(0.25));
    CHECK(values[2] == Approx(0.5));

    const auto v2 = testing::v2();
    const auto ms2 = build_mean_set(v2, 0.01);
    for (const auto& t : mean_set_targets(v2, ms2, 3)) {
        CHECK(t[0] + t[1] == Approx(1.0));
        CHECK(ms2.distance(t) <= 1e-9);
    }
}

TEST_CASE("target chasing visits every target in each late epoch") {
    const auto e1 = testing::e1();
    const auto ms = build_mean_set(e1, 0.1);
    const auto s = target_chasing_schedule(e1, ms, 3, 5);
    std::vector<int> seen(3, 0);
    for (const auto& b : s.blocks)
        if (b.target >= 0) ++seen[b.target];
    for (int c : seen) CHECK(c >= 3);
    const auto one = target_chasing_schedule(e1, ms, 1, 3);
    REQUIRE(one.targets.size() == 1);
    const auto direct = stationary_for_target(e1, one.targets[0][0]);
    CHECK(one.weights_at(1)[0] == Approx(direct.weights_at(1)[0]));
    CHECK(one.weights_at(1)[1] == Approx(direct.weights_at(1)[1]));
}

TEST_CASE("mixtures for vector means") {
    const auto w = mixture_for_mean(testing::v2(), std::vector<double>{0.3, 0.7});
    CHECK(w[0] == Approx(0.3));
    CHECK(w[1] == Approx(0.7));
    CHECK_THROWS_AS(mixture_for_mean(testing::v2(), std::vector<double>{0.5, 0.6}), TargetOutsideM);
}

TEST_CASE("paths are reproducible and internally consistent") {
    const auto e1 = testing::e1();
    const auto s = stationary_for_target(e1, 0.25);
    const auto a = sample_path(e1, s, 5000, 99);
    const auto b = sample_path(e1, s, 5000, 99);
    CHECK(a.partial_sums == b.partial_sums);
    CHECK(a.increments == b.increments);
    CHECK(sample_path(e1, s, 5000, 100).partial_sums != a.partial_sums);
    double running = 0.0;
    for (std::size_t m = 1; m <= a.n; ++m) {
        running += a.increment(m)[0];
        CHECK(a.sum1(m) == running);
    }
    // a prefix of a longer path is the shorter path
    const auto c = sample_path(e1, s, 100, 99);
    CHECK(std::equal(c.partial_sums.begin(), c.partial_sums.end(), a.partial_sums.begin()));
}

TEST_CASE("point mass paths are exact") {
    const AmbiguitySet pm({Distribution::point_mass({2.0})}, "pm");
    const auto p = sample_path(pm, Strategy::pure(0, 1, "pm"), 1000, 5);
    CHECK(p.sum1(1000) == 2000.0);
}

TEST_CASE("pure max-mean member obeys the classical law of large numbers") {
    const auto e1 = testing::e1();
    const auto p = sample_path(e1, Strategy::pure(1, 2, "P2"), 1'000'000, 7);
    CHECK(std::abs(p.sum1(1'000'000) / 1e6 - 0.5) <= 0.01);
}

TEST_CASE("stationary mixtures have the mixture mean") {
    const AmbiguitySet set({Distribution::finite1d({{-2.0, 0.5}, {1.0, 0.5}}), Distribution::finite1d({{3.0, 1.0}}),
                            Distribution::finite1d({{0.0, 0.25}, {1.0, 0.75}})},
                           "three");
    const std::vector<double> w{0.2, 0.3, 0.5};
    const double mean = 0.2 * -0.5 + 0.3 * 3.0 + 0.5 * 0.75;
    const double second = 0.2 * 2.5 + 0.3 * 9.0 + 0.5 * 0.75;
    const double se = std::sqrt((second - mean * mean) / 1e5);
    const auto p = sample_path(set, Strategy::stationary(w, "mix"), 100'000, 3);
    CHECK(std::abs(p.sum1(100'000) / 1e5 - mean) <= 4.0 * se);
}

TEST_CASE("pareto increments follow the tail law") {
    const AmbiguitySet set({Distribution::pareto(1.5, 1.0, 0.7)}, "p");
    const auto p = sample_path(set, Strategy::pure(0, 1, "p"), 200'000, 11);
    int above = 0, positive = 0;
    for (std::size_t m = 1; m <= p.n; ++m) {
        const double x = p.increment(m)[0];
        CHECK(std::abs(x) >= 1.0);
        above += std::abs(x) >= 4.0;
        positive += x > 0.0;
    }
    const double tail = std::pow(0.25, 1.5);
    CHECK(std::abs(above / 2e5 - tail) <= 4.0 * std::sqrt(tail * (1 - tail) / 2e5));
    CHECK(std::abs(positive / 2e5 - 0.7) <= 4.0 * std::sqrt(0.21 / 2e5));
}

TEST_CASE("sampled measures are dominated by the exact upper expectation") {
    const auto e1 = testing::e1();
    const LatticeModel model(e1, 1.0);
    const std::size_t n = 4;
    const auto phi = [](double s) { return std::min(1.0, std::abs(s - 1.0) / 3.0); };
    const double upper = dp_value(model, PathFunctional::terminal_sum(n, phi), Mode::Upper);
    for (const auto& strategy : {Strategy::pure(0, 2, "P1"), Strategy::pure(1, 2, "P2"),
                                 Strategy::stationary({0.5, 0.5}, "mix"), oscillation_schedule(e1, 2)}) {
        const int reps = 20000;
        double sum = 0.0, sq = 0.0;
        for (int r = 0; r < reps; ++r) {
            const double v = phi(sample_path(e1, strategy, n, 1000 + r).sum1(n));
            sum += v;
            sq += v * v;
        }
        const double mean = sum / reps;
        const double se = std::sqrt(std::max(0.0, sq / reps - mean * mean) / reps);
        CHECK(mean <= upper + 4.0 * se);
    }
}
