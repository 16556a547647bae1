// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "models.hpp"
#include "subexp/convex.hpp"
#include "subexp/errors.hpp"
#include "subexp/expectation.hpp"

using namespace subexp;
using doctest::Approx;

TEST_CASE("support function examples") {
    const auto v2 = testing::v2();
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(support_function(v2, std::vector<double>{1.0, 0.0}) == Approx(1.0));
    CHECK(support_function(v2, std::vector<double>{r, r}) == Approx(r));
    CHECK(support_function(v2, std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(support_function(v2, std::vector<double>{-1.0, -1.0}) == Approx(-1.0));
}

TEST_CASE("one-dimensional mean set is the breve interval") {
    const auto ms = build_mean_set(testing::e1(), 0.1);
    REQUIRE(ms.net().directions.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        if (ms.net().directions[i][0] > 0) CHECK(ms.support(i) == Approx(0.5).epsilon(1e-10));
        else CHECK(ms.support(i) == Approx(0.0).epsilon(1e-10));
    }
    CHECK(ms.distance(std::vector<double>{0.25}) == 0.0);
    CHECK(ms.distance(std::vector<double>{0.7}) == Approx(0.2));
    CHECK(ms.distance(std::vector<double>{-0.3}) == Approx(0.3));
}

TEST_CASE("segment mean set of V2") {
    const auto ms = build_mean_set(testing::v2(), 0.01);
    const auto& dirs = ms.net().directions;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        CHECK(ms.support(i) == Approx(std::max(dirs[i][0], dirs[i][1])).epsilon(1e-12));
    CHECK(ms.distance(std::vector<double>{0.0, 0.0}) == Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
    CHECK(ms.distance(std::vector<double>{0.5, 0.5}) <= 1e-12);
    CHECK(ms.distance(std::vector<double>{1.0, 0.0}) <= 1e-12);
    CHECK(ms.contains(std::vector<double>{0.3, 0.7}, ms.default_tolerance()));
    CHECK_FALSE(ms.contains(std::vector<double>{1.0, 1.0}, ms.default_tolerance()));
}

TEST_CASE("point mass mean set is a point") {
    const AmbiguitySet pm({Distribution::point_mass({0.3, -1.2, 2.0})}, "pm");
    const auto ms = build_mean_set(pm, 0.5);
    const auto& dirs = ms.net().directions;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        CHECK(ms.support(i) == Approx(0.3 * dirs[i][0] - 1.2 * dirs[i][1] + 2.0 * dirs[i][2]));
}

TEST_CASE("direction nets cover the sphere") {
    CHECK(DirectionNet::build(2, 0.05).probe_mesh(10000, 1) <= 0.05);
    CHECK(DirectionNet::build(2, 0.05).directions.size() == static_cast<std::size_t>(std::ceil(2 * M_PI / 0.05)));
    CHECK(DirectionNet::build(3, 0.2).probe_mesh(10000, 2) <= 0.2);
    CHECK(DirectionNet::build(4, 0.5).probe_mesh(10000, 3) <= 0.5);
    for (const auto& p : DirectionNet::build(3, 0.3).directions)
        CHECK(std::hypot(p[0], p[1], p[2]) == Approx(1.0));
}

TEST_CASE("mean set preconditions") {
    const AmbiguitySet five({Distribution::point_mass({0, 0, 0, 0, 0})}, "d5");
    CHECK_THROWS_AS(build_mean_set(five, 0.5), DimensionTooLarge);
    CHECK_THROWS_AS(build_mean_set(testing::e1(), 0.0), ValueError);
    CHECK_THROWS_AS(build_mean_set(testing::e1(), 1.5), ValueError);
    CHECK_THROWS_AS(build_mean_set(testing::pareto_singleton(0.8), 0.5), NotConvergent);
}

TEST_CASE("support function is sub-linear and monotone in the set") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 3.0);
    const auto base = testing::v2_mix();
    const auto bigger = base.with_member(Distribution::finite({{{-1.0, 2.0}, 0.5}, {{2.0, 0.5}, 0.5}}));
    for (int i = 0; i < 500; ++i) {
        const std::vector<double> p{z(rng), z(rng)}, q{z(rng), z(rng)};
        const double lam = u(rng);
        const std::vector<double> sum{p[0] + q[0], p[1] + q[1]}, scaled{lam * p[0], lam * p[1]};
        CHECK(support_function(base, sum) <= support_function(base, p) + support_function(base, q) + 1e-10);
        CHECK(support_function(base, scaled) == Approx(lam * support_function(base, p)).epsilon(1e-10));
        CHECK(support_function(bigger, p) >= support_function(base, p) - 1e-15);
    }
}

TEST_CASE("distance zero iff every support constraint holds") {
    const auto ms = build_mean_set(testing::v2_mix(), 0.05);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> y{u(rng), u(rng)};
        bool inside = true;
        const auto& dirs = ms.net().directions;
        for (std::size_t k = 0; k < dirs.size(); ++k)
            inside = inside && dirs[k][0] * y[0] + dirs[k][1] * y[1] <= ms.support(k);
        CHECK((ms.distance(y) == 0.0) == inside);
        // outer approximation: never exceeds the true distance to the segment
        const double t = std::clamp((y[0] - y[1] + 1.0) / 2.0, 0.0, 1.0);
        const double truth = std::hypot(y[0] - t, y[1] - (1.0 - t));
        CHECK(ms.distance(y) <= truth + 1e-12);
        CHECK(ms.distance(y) >= truth - 0.05 * (std::hypot(y[0], y[1]) + 1.0));
    }
}
