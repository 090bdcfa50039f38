#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kdvw/coords.hpp"
#include "kdvw/error.hpp"
#include "kdvw/rings.hpp"

using namespace kdvw;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }
}  // namespace

TEST_CASE("forward map fixtures") {
    TauVars z = to_tau({0, 0, 1, 0});
    CHECK(z.tau1 == 0);
    CHECK(z.tau3 == 0);
    CHECK(z.tau5 == 0);
    CHECK(z.tau7 == doctest::Approx(2.0 / 7).epsilon(1e-15));
    TauVars t = to_tau({1, 1, 1, 1});
    CHECK(t.tau1 == doctest::Approx(-3.0 / 8).epsilon(1e-14));
    CHECK(t.tau3 == doctest::Approx(23.0 / 12).epsilon(1e-14));
    CHECK(t.tau5 == 1);
    CHECK(t.tau7 == doctest::Approx(2.0 / 7).epsilon(1e-15));
    CHECK_THROWS_AS(to_tau({0, 0, 0, 0}), Error);
    CHECK_THROWS_AS(from_tau({0, 0, 0, -1}), Error);
}

TEST_CASE("round trip on random points") {
    std::mt19937_64 gen(20261014);
    // a well-conditioned box: for s0 -> 0 the t0 line loses digits to cancellation in tau1
    std::uniform_real_distribution<double> u(-2, 2), pos(0.5, 4);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        const PIVars p{u(gen), u(gen), pos(gen), u(gen)};
        const PIVars q = from_tau(to_tau(p));
        worst = std::max({worst, rel(p.t0, q.t0), rel(p.t1, q.t1), rel(p.s0, q.s0), rel(p.s1, q.s1)});
        const TauVars t{u(gen), u(gen), u(gen), pos(gen)};
        const TauVars s = to_tau(from_tau(t));
        worst = std::max({worst, rel(t.tau1, s.tau1), rel(t.tau3, s.tau3), rel(t.tau5, s.tau5), rel(t.tau7, s.tau7)});
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("spectral variables") {
    const PIVars p{0.3, -0.7, 2.5, 1.3};
    // root of the affine map
    const double z0 = p.s1 * std::pow(p.s0, -5.0 / 7);
    CHECK(std::abs(zeta_of(z0, p)) < 1e-14);
    const TauVars t = to_tau(p);
    CHECK(eta_of(0, t) == doctest::Approx(-t.tau1));
    // cubic with the stated coefficients: recover them by finite differences
    const double s0 = 3.5 * t.tau7;
    const double e1 = eta_of(1, t), em = eta_of(-1, t), e2 = eta_of(2, t), e0 = eta_of(0, t);
    const double c2 = (e1 + em - 2 * e0) / 2;
    const double c3 = (e2 - 2 * e1 + 2 * em - eta_of(-2, t)) / 12;
    CHECK(c2 == doctest::Approx(-t.tau5 * std::pow(s0, -4.0 / 7)));
    CHECK(c3 == doctest::Approx(-2.0 / 7 * std::pow(s0, 1.0 / 7)));
    CHECK(stokes_s(1) == std::complex<double>(0, 0));
    CHECK(stokes_s(0.5) == std::complex<double>(0, -0.5));
}

TEST_CASE("x-variables and folding agree") {
    const TauVars t{0.4, -1.1, 0.8, 0.6};
    const XVars x = x_vars(t);
    const Folding f = folding(t);
    CHECK(f.x.x0 == doctest::Approx(x.x0).epsilon(1e-13));
    CHECK(f.x.x1 == doctest::Approx(x.x1).epsilon(1e-13));
    CHECK(f.x.x2 == doctest::Approx(x.x2).epsilon(1e-13));
    CHECK(f.c == doctest::Approx(std::pow(2.0, -10.0 / 7)));
    CHECK(regime2_a() == doctest::Approx(std::pow(64.0 / 7, 1.0 / 7)));
    const XScaleSurd s = x_scale_surd();
    CHECK(s.a.value() == doctest::Approx(regime2_a()));
}

TEST_CASE("regime classification") {
    CHECK(regime_classify({0, 0, 1, 1e-3}) == Regime::One);
    CHECK(regime_classify({0, 0, 0, 1e-3}) == Regime::Two);
    CHECK(regime_classify({0, 0, 0, 1e-3}, {0.5, 1, 10, 1, 0.01}) == Regime::Two);
    const double t7 = 1e-6;
    const TauVars r3{-1, 0, -std::pow(t7, 9.0 / 14), t7};
    const double r = 2 / (7 * t7);
    const double x = -t7 * std::pow(r, 6.0 / 7) + r3.tau5 * std::pow(r, 4.0 / 7);
    CHECK(regime3_x(r3) == doctest::Approx(x).epsilon(1e-13));
    // |tau5| = tau7^(9/14) is below M tau7^(5/7) for M = 10, so the small-tau box wins
    CHECK(regime_classify(r3) == Regime::Two);
    CHECK(regime_classify({0, 0, 0, -1}) == Regime::None);
    CHECK(regime_name(Regime::Three) == "regime3");
    // regimes 1 and 2 never overlap for tau5 != 0
    for (double t5 : {0.5, 2.0, 40.0})
        for (double t1 : {-3.0, 0.0, 3.0}) {
            const TauVars t{t1, 0.1, t5, 0.01};
            const Regime g = regime_classify(t);
            CHECK((g != Regime::One || t5 >= 10 * std::pow(0.01, 5.0 / 7)));
        }
}

TEST_CASE("closed-form profiles") {
    ProfileInputs in;
    in.y = 0;
    in.h = 0;
    const Profile p = asymptotic_profile(Regime::One, {1, 1, 1, 1}, in);
    // r = 2/7: tau1 tau5 /(7 tau7) etc. with all entries 1
    CHECK(p.u == doctest::Approx(-(1.0 / 7 - 3.0 / 98 + 15.0 / 2744)));
    CHECK(p.v == doctest::Approx(-1.0 / 7));
    ProfileInputs two;
    two.p = 0;
    two.q = 0;
    two.q_x0 = 0;
    CHECK(asymptotic_profile(Regime::Two, {0, 0, 0, 1}, two).u == 0);
    ProfileInputs three;
    three.p_sigma = 2;
    three.q_sigma = 3;
    const Profile q = asymptotic_profile(Regime::Three, {-0.5, 0, 0, 1}, three);
    CHECK(q.u == -2);
    CHECK(q.v == 2);
    CHECK_THROWS_AS(asymptotic_profile(Regime::One, {1, 1, 1, 1}, two), Error);
    CHECK_THROWS_AS(asymptotic_profile(Regime::None, {1, 1, 1, 1}, in), Error);
}

TEST_CASE("symbolic inverse matches the floating one") {
    const SymbolicInverse& s = symbolic_inverse();
    // evaluate at tau = (0.3, -0.2, 0.7, 2/7) with g^7 = s0 = 1
    const TauVars t{0.3, -0.2, 0.7, 2.0 / 7};
    const PIVars p = from_tau(t);
    const Ring& r = pi_ring();
    std::map<Key, DiffPoly> at;
    auto num = [&](double v) {
        // exact rationals for these decimal inputs
        return DiffPoly(&r, Scalar(Rational(static_cast<long>(std::lround(v * 1000)), 1000)));
    };
    at.emplace(r.key(r.family("T1")), num(t.tau1));
    at.emplace(r.key(r.family("T3")), num(t.tau3));
    at.emplace(r.key(r.family("s1")), num(t.tau5));
    at.emplace(r.key(r.family("g")), DiffPoly(&r, Scalar(1)));
    const DiffPoly t1 = substitute(s.t1, at), t0 = substitute(s.t0, at);
    REQUIRE(t1.is_constant());
    REQUIRE(t0.is_constant());
    CHECK(t1.constant_term().to_complex().real() == doctest::Approx(p.t1).epsilon(1e-12));
    CHECK(t0.constant_term().to_complex().real() == doctest::Approx(p.t0).epsilon(1e-12));
    CHECK(sym_tau7_pow(1) == pi("2/7*g^7"));
    CHECK(sym_scaled_tau7(2) == pi("g^-2"));
}
