// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "models.hpp"
#include "subexp/errors.hpp"
#include "subexp/inequalities.hpp"

using namespace subexp;
using doctest::Approx;

TEST_CASE("closed-form maximal bounds") {
    CHECK(kolmogorov_upper_bound(100.0, 50.0) == Approx((M_E + 1.0) * 0.04));
    CHECK(kolmogorov_upper_bound(100.0, 50.0) == Approx(0.148731).epsilon(1e-6));
    CHECK(kolmogorov_upper_bound(0.0, 3.0) == 0.0);
    double previous = kInf;
    for (double x = 1.0; x < 1e6; x *= 3.0) {
        const double b = kolmogorov_upper_bound(7.0, x);
        CHECK(b < previous);
        previous = b;
    }

    // exp{4 - 5 ln 5} = e^4 / 3125
    CHECK(exponential_bound(1.0, 4.0, 1.0) == Approx(std::exp(4.0) / 3125.0).epsilon(1e-12));
    CHECK(exponential_bound(1.0, 4.0, 1.0) == Approx(0.017471).epsilon(1e-4));
    CHECK(exponential_bound(2.0, 1e-9, 1.0) == Approx(1.0).epsilon(1e-6));
    for (double b2 : {0.5, 4.0, 30.0})
        for (double x : {0.5, 2.0, 9.0}) CHECK(exponential_bound(b2, x, x) <= kolmogorov_upper_bound(b2, x) + 1e-15);
}

TEST_CASE("lower-capacity Kolmogorov bound") {
    const std::vector<double> second(4, 1.0);
    const std::vector<Point> mus(4, Point{0.25});
    CHECK(kolmogorov_lower_capacity_bound(second, mus, 2.0) == Approx(1.875));
    CHECK(kolmogorov_lower_capacity_bound(testing::e1(), mus, 2.0) == Approx(1.875));
    const std::vector<Point> zero(4, Point{0.0});
    CHECK(kolmogorov_lower_capacity_bound(second, zero, 1e4) < 1e-7);
    // one summand at x^2 = 2 (E^[Z^2] - mu^2)
    const std::vector<double> one{1.0};
    const std::vector<Point> mu{Point{0.5}};
    CHECK(kolmogorov_lower_capacity_bound(one, mu, std::sqrt(1.5)) == Approx(1.0));
    const std::vector<Point> bad(2, Point{0.7});
    CHECK_THROWS_AS(kolmogorov_lower_capacity_bound(testing::e1(), bad, 2.0), MuNotAttainable);
}

TEST_CASE("reports cap the displayed bound") {
    const auto r = make_report(0.4, 1.875, 0.0, "ctx");
    CHECK(r.satisfied);
    CHECK(r.rhs_display() == 1.0);
    CHECK(r.rhs == 1.875);
    CHECK_FALSE(make_report(0.5, 0.4, 0.05, "ctx").satisfied);
    CHECK(make_report(0.5, 0.4, 0.1, "ctx").satisfied);
}

TEST_CASE("Levy inequality on E1") {
    const LatticeModel model(testing::e1(), 1.0);
    CHECK(levy_bound_check(model, 8, 2.0, 0.5).satisfied);
    CHECK(levy_bound_check(model, 1, 0.5, 0.3).satisfied);
    const auto near_one = levy_bound_check(model, 8, 2.0, 0.999);
    CHECK(near_one.lhs <= 0.001 + 1e-12);
    CHECK(near_one.satisfied);
    CHECK(levy_beta(model, 0, 0.5) == 0.0);
}

TEST_CASE("maximal inequalities against exact capacities") {
    const LatticeModel model(testing::e1(), 1.0);
    const auto r = check_inequality(model, Inequality::KolmogorovUpper, 16, 6.0);
    CHECK(r.satisfied);
    CHECK(r.lhs <= (M_E + 1.0) * 16.0 / 36.0);
    // centred at 0.5: E^[(X - 0.5)^2] = max(1.25, 0.75), so B2 = 16 * 1.25
    CHECK(r.rhs == Approx((M_E + 1.0) * 20.0 / 36.0));
    const auto tiny = check_inequality(model, Inequality::KolmogorovUpper, 4, 0.5);
    CHECK(tiny.satisfied);
    for (std::size_t n : {4, 8, 16}) {
        for (double x = 2.0; x <= 10.0; x += 1.0) {
            CAPTURE(n);
            CAPTURE(x);
            CHECK(check_inequality(model, Inequality::KolmogorovUpper, n, x).satisfied);
            CHECK(check_inequality(model, Inequality::KolmogorovLower, n, x).satisfied);
            CHECK(check_inequality(model, Inequality::Exponential, n, x).satisfied);
            CHECK(check_inequality(model, Inequality::KolmogorovLower, n, x, std::nullopt, 0.1).satisfied);
        }
    }
    CHECK_THROWS_AS(check_inequality(model, Inequality::KolmogorovLower, 4, 2.0, std::nullopt, 0.9), MuNotAttainable);
}

TEST_CASE("Choquet series test") {
    const auto bounded = choquet_series_test(testing::e1().member(0), 1.5, 2.0, 1000);
    CHECK(bounded.series_convergent);
    CHECK(bounded.choquet_finite);
    CHECK(bounded.agree);
    CHECK(bounded.partial_k == 0.0);

    const auto finite = choquet_series_test(Distribution::pareto(1.5, 1.0, 0.5), 1.0, 1.0, 100000);
    CHECK(finite.series_convergent);
    CHECK(finite.choquet == Approx(3.0).epsilon(1e-6));
    CHECK(finite.agree);
    CHECK(finite.tail_matches);

    const auto infinite = choquet_series_test(Distribution::pareto(1.2, 1.0, 0.5), 1.5, 1.0, 100000);
    CHECK_FALSE(infinite.series_convergent);
    CHECK_FALSE(infinite.choquet_finite);
    CHECK(infinite.agree);

    CHECK_THROWS_AS(choquet_series_test(Distribution::pareto(1.5, 1.0, 0.5), 1.0, 1.0, 999), ValueError);
}

TEST_CASE("Borel-Cantelli diagnostic") {
    std::vector<double> geometric, harmonic, constant(200, 0.75);
    for (int k = 1; k <= 200; ++k) {
        geometric.push_back(std::pow(2.0, -k));
        harmonic.push_back(1.0 / k);
    }
    const auto g = borel_cantelli_diagnostic(geometric, 0.0);
    CHECK(g.summable);
    CHECK(g.asserted);
    CHECK(g.passed);
    CHECK_FALSE(borel_cantelli_diagnostic(geometric, 0.2).passed);
    const auto h = borel_cantelli_diagnostic(harmonic, 1.0);
    CHECK_FALSE(h.summable);
    CHECK_FALSE(h.asserted);
    CHECK(h.passed);
    CHECK_FALSE(borel_cantelli_diagnostic(constant, 1.0).asserted);
}
