#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kdvw/calculus.hpp"
#include "kdvw/error.hpp"

using namespace kdvw;

namespace {

struct VRing {
    Ring r{{"t1", "t3", "t5"}};
    int v = r.add_jet("v");
    int w = r.add_jet("w");
    int c = r.add_constant("c");
    DiffPoly P(const std::string& s) const { return r.parse(s); }
};

DiffPoly random_poly(const Ring& r, std::mt19937& rng, int fam, int terms, int max_order, int max_deg) {
    std::uniform_int_distribution<int> ord(0, max_order), dg(1, max_deg), num(-5, 5), den(1, 4);
    DiffPoly p(&r);
    for (int t = 0; t < terms; ++t) {
        std::vector<Factor> fs;
        int d = dg(rng);
        for (int i = 0; i < d; ++i) fs.push_back({r.key(fam, ord(rng)), 1});
        p.add_term(Monomial(fs), Scalar::frac(num(rng), den(rng)));
    }
    return p;
}

}  // namespace

TEST_CASE("scalar field arithmetic") {
    Scalar s2 = Scalar::sqrt2(), i = Scalar::i();
    CHECK(s2 * s2 == Scalar(2));
    CHECK(i * i == Scalar(-1));
    Scalar x(Rational(1, 3), Rational(-2), Rational(5, 7), Rational(1, 2));
    CHECK(x * x.inverse() == Scalar(1));
    CHECK((x + i) - i == x);
    CHECK(Scalar::parse("(1 + 1/2*sqrt2 - I)").str() == "(1 + 1/2*sqrt2 - I)");
    CHECK(Scalar::parse("-3/4").str() == "-3/4");
    CHECK(Scalar::parse(x.str()) == x);
    CHECK(Scalar::frac(6, 8).str() == "3/4");
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    auto rnd = [&] {
        return Scalar(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(num(rng), den(rng)),
                      Rational(num(rng), den(rng)));
    };
    for (int t = 0; t < 50; ++t) {
        Scalar a = rnd(), b = rnd(), c = rnd();
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        if (!b.is_zero()) CHECK((a / b) * b == a);
    }
}

TEST_CASE("text round trip and canonical order") {
    VRing R;
    DiffPoly p = R.P("3*v_0*v_1 + 1/4*v_3");
    CHECK(p.str() == "1/4*v_3 + 3*v_0*v_1");
    CHECK(R.P(p.str()) == p);
    CHECK(R.P("v_t3_2").str() == "v_t3_2");
    CHECK(R.P("v_t3t5").str() == "v_t3t5");
    CHECK(R.P("-v_0^2 + c").str() == "c - v_0^2");
    CHECK_THROWS_AS(R.P("q_0"), Error);
}

TEST_CASE("derive") {
    VRing R;
    CHECK(derive(R.P("v_0"), "t1") == R.P("v_1"));
    CHECK(derive(R.P("v_0^2"), "t1") == R.P("2*v_0*v_1"));
    CHECK(derive(R.P("1/4*v_2 + 3/2*v_0^2"), "t1") == R.P("1/4*v_3 + 3*v_0*v_1"));
    CHECK(derive(R.P("v_1"), "t3") == R.P("v_t3_1"));
    CHECK(derive(R.P("c*v_0"), "t1") == R.P("c*v_1"));
    try {
        derive(R.P("v_0"), "x");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == "UnknownDerivation");
    }
}

TEST_CASE("derive is a derivation") {
    VRing R;
    std::mt19937 rng(11);
    for (int t = 0; t < 30; ++t) {
        DiffPoly p = random_poly(R.r, rng, R.v, 4, 3, 3), q = random_poly(R.r, rng, R.w, 4, 3, 2);
        p += random_poly(R.r, rng, R.w, 2, 2, 2);
        CHECK(derive(p * q, 0) == derive(p, 0) * q + p * derive(q, 0));
        CHECK(derive(p * q, 1) == derive(p, 1) * q + p * derive(q, 1));
    }
}

TEST_CASE("euler derivative") {
    VRing R;
    Key v = R.r.key(R.v, 0);
    CHECK(euler_derivative(R.P("v_1"), v).is_zero());
    // hand: d/dv (v v'') = v'', D^2 d/dv'' = D^2 v = v''
    CHECK(euler_derivative(R.P("v_0*v_2"), v) == R.P("2*v_2"));
    CHECK(euler_derivative(R.P("3*v_0*v_1 + 1/4*v_3"), v).is_zero());
    try {
        euler_derivative(R.P("c"), R.r.key(R.c, 0));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == "NotJetFamily");
    }
    std::mt19937 rng(3);
    for (int t = 0; t < 30; ++t) {
        DiffPoly p = random_poly(R.r, rng, R.v, 5, 4, 3) * random_poly(R.r, rng, R.w, 2, 2, 1);
        CHECK(euler_derivative(derive(p, 0), v).is_zero());
        CHECK(euler_derivative(derive(p, 0), R.r.key(R.w, 0)).is_zero());
    }
}

TEST_CASE("integrate_total") {
    VRing R;
    CHECK(integrate_total(R.P("v_1")) == R.P("v_0"));
    DiffPoly q = integrate_total(R.P("1/4*v_3 + 3*v_0*v_1"));
    CHECK(q == R.P("1/4*v_2 + 3/2*v_0^2"));
    CHECK(derive(q, 0) == R.P("1/4*v_3 + 3*v_0*v_1"));
    try {
        integrate_total(R.P("v_0*v_2"));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == "NotExact");
    }
    CHECK_THROWS_AS(integrate_total(R.P("c")), Error);
    std::mt19937 rng(5);
    for (int t = 0; t < 40; ++t) {
        DiffPoly p = random_poly(R.r, rng, R.v, 5, 4, 4) + random_poly(R.r, rng, R.w, 3, 3, 2) * R.P("v_1");
        CHECK(integrate_total(derive(p, 0)) == p);
    }
}

TEST_CASE("reduce_on_shell") {
    VRing R;
    EquationSystem kdv1({{R.r.parse_key("v_t3"), R.P("1/4*v_3 + 3*v_0*v_1")}});
    CHECK(reduce_on_shell(R.P("v_t3"), kdv1) == R.P("1/4*v_3 + 3*v_0*v_1"));
    CHECK(reduce_on_shell(derive(R.P("v_t3"), 0), kdv1) == R.P("1/4*v_4 + 3*v_1^2 + 3*v_0*v_2"));
    CHECK(reduce_on_shell(R.P("v_0^2"), EquationSystem()) == R.P("v_0^2"));
    DiffPoly x = reduce_on_shell(R.P("v_t3_2*v_t3 + v_1"), kdv1);
    CHECK(reduce_on_shell(x, kdv1) == x);
    try {
        EquationSystem bad({{R.r.parse_key("v_t3"), R.P("v_t3_1")}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == "NonTerminating");
    }
}

TEST_CASE("substitute") {
    VRing R;
    std::map<Key, DiffPoly> s{{R.r.parse_key("v_0"), R.P("w_1 + 1")}};
    CHECK(substitute(R.P("v_0^2 + v_1"), s) == R.P("w_1^2 + 2*w_1 + 1 + v_1"));
}
