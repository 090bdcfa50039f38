#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kdvw/error.hpp"
#include "kdvw/sigma.hpp"

using namespace kdvw;

TEST_CASE("built-in families") {
    const SigmaFn h = heaviside();
    CHECK(h(-1) == 0);
    CHECK(h(1) == 1);
    CHECK(h(0) == 0);
    CHECK(gumbel_cubic(1)(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(gumbel_cubic(0.5)(50) == 0.5);
    CHECK(gumbel_cubic(0.5).iota == 0.5);
    const SigmaFn p = piecewise({-1, 2}, {0, 0.25, 1});
    CHECK(p(-3) == 0);
    CHECK(p(0) == 0.25);
    CHECK(p(2) == 0.25);
    CHECK(p(2.1) == 1);
    CHECK(p.iota == 1);
    CHECK_THROWS_AS(piecewise({0}, {0.5, 0.2}), Error);
    CHECK_THROWS_AS(piecewise({0}, {0, 1.5}), Error);
    CHECK_THROWS_AS(gumbel_cubic(2), Error);
}

TEST_CASE("json specs") {
    const SigmaFn g = sigma_from_json({{"family", "gumbel_cubic"}, {"iota", 0.5}});
    CHECK(g(1) == gumbel_cubic(0.5)(1));
    const SigmaFn s = sigma_from_json({{"family", "heaviside"}, {"params", {{"shift", 1.5}}}});
    CHECK(s(1.4) == 0);
    CHECK(s(1.6) == 1);
    const SigmaFn p = sigma_from_json({{"family", "piecewise"}, {"params", {{"jumps", {0}}, {"values", {0, 1}}}}});
    CHECK(p(1) == 1);
    CHECK_THROWS_AS(sigma_from_json({{"family", "nope"}}), Error);
    CHECK_THROWS_AS(sigma_from_json({{"family", "piecewise"}}), Error);
    CHECK(sigma_to_json(g)["iota"] == 0.5);
}

TEST_CASE("every built-in passes both assumptions") {
    for (const SigmaFn& s : {heaviside(), heaviside(0.5), heaviside(1, 2), gumbel_cubic(1), gumbel_cubic(0.5),
                             piecewise({-1, 2}, {0, 0.25, 1})}) {
        const ValidationReport r = validate(s);
        CHECK_MESSAGE(r.assumption1, s.name, r.to_json().dump());
        CHECK_MESSAGE(r.assumption2, s.name, r.to_json().dump());
        CHECK_NOTHROW(require_valid(s));
    }
    // the heaviside difference vanishes identically, so no k2 is fitted
    CHECK_FALSE(validate(heaviside()).k2.has_value());
    const ValidationReport g = validate(gumbel_cubic(1));
    REQUIRE(g.k2.has_value());
    CHECK(*g.k2 >= 0.9);
    CHECK(*g.k2 == doctest::Approx(1).epsilon(0.02));
    CHECK(g.k1 < 2);
    CHECK(g.tail_points > 300);
}

TEST_CASE("validators reject what they should") {
    // exponential, not cubic-exponential, approach to 1
    SigmaFn logistic{"logistic", [](double r) { return 1 / (1 + std::exp(-r)); }, 1, {}, {}, {}};
    const ValidationReport l = validate(logistic);
    CHECK(l.assumption1);
    CHECK_FALSE(l.assumption2);
    CHECK_THROWS_AS(require_valid(logistic), Error);
    // bounded away from 0 on the negative axis
    SigmaFn half{"half", [](double r) { return r > 0 ? 1.0 : 0.5; }, 1, {0}, {}, {}};
    CHECK_FALSE(validate(half).assumption1);
    SigmaFn down{"down", [](double r) { return r > 0 ? 0.0 : 0.0 + (r > -1 ? 0.5 : 0.0); }, 0, {-1, 0}, {}, {}};
    CHECK_FALSE(validate(down).assumption1);
    // a jump that is not declared
    SigmaFn hidden{"hidden", [](double r) { return r > 0.3 ? 1.0 : 0.0; }, 1, {}, {}, {}};
    CHECK_FALSE(validate(hidden).assumption1);
    // the ramp clipped to [0, 1] differs from chi only on (0, 1): both bounds hold
    SigmaFn ramp{"ramp", [](double r) { return std::clamp(r, 0.0, 1.0); }, 1, {0, 1}, {}, {}};
    const ValidationReport rr = validate(ramp);
    CHECK(rr.assumption1);
    CHECK(rr.assumption2);
}

TEST_CASE("m0") {
    CHECK(m0(heaviside()) == 0);
    for (double c : {0.5, 1.0, 2.25, -1.5}) CHECK(m0(heaviside(1, c)) == doctest::Approx(c).epsilon(1e-12));
    const M0Result g = m0_detail(gumbel_cubic(1));
    CHECK(std::abs(g.value - g.alternate) <= 1e-9);
    CHECK(g.error <= 1e-10);
    // frozen from a 30-digit quadrature
    CHECK(std::abs(g.value - 0.334021109554085199) <= 1e-10);
    CHECK(m0(piecewise({-1, 2}, {0, 0.25, 1})) == doctest::Approx(-0.25 + 2 * 0.75).epsilon(1e-12));
    CHECK_THROWS_AS(m0(gumbel_cubic(0.5)), Error);
}

TEST_CASE("small eta predictors") {
    const SmallEta a = small_eta_predict(1, 0);
    CHECK(a.p == -1.0 / 8);
    CHECK(a.q == 9.0 / 128);
    CHECK(a.r == 39.0 / 512);
    CHECK(small_eta_predict(1, 16.0 / 3).q == doctest::Approx(1 + 9.0 / 128).epsilon(1e-15));
    CHECK(small_eta_predict(-1, 0).p == 1.0 / 8);
    for (double e : {0.1, 0.7, 3.0}) {
        const SmallEta x = small_eta_predict(e, 0), y = small_eta_predict(-e, 0);
        CHECK(x.p == -y.p);
        CHECK(x.r == -y.r);
        CHECK(x.q == y.q);
    }
    CHECK_THROWS_AS(small_eta_predict(0, 1), Error);
}
