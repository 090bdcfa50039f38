#include "kdvw/coords.hpp"

#include <cmath>

#include "kdvw/error.hpp"
#include "kdvw/rings.hpp"

namespace kdvw {

namespace {

double rpow(double x, double e) { return std::exp(e * std::log(x)); }

void require_positive(double x, const char* what) {
    if (!(x > 0) || !std::isfinite(x)) fail("DomainError", std::string(what) + " must be positive");
}

}  // namespace

TauVars to_tau(const PIVars& p) {
    require_positive(p.s0, "s0");
    TauVars t;
    t.tau1 = 5 * p.s1 * p.s1 * p.s1 / (8 * p.s0 * p.s0) + p.t1 * p.s1 / rpow(p.s0, 4.0 / 7) -
             2 * p.t0 * rpow(p.s0, 1.0 / 7);
    t.tau3 = 5 * p.s1 * p.s1 / (4 * p.s0) + 2 * p.t1 * rpow(p.s0, 3.0 / 7) / 3;
    t.tau5 = p.s1;
    t.tau7 = 2 * p.s0 / 7;
    return t;
}

PIVars from_tau(const TauVars& t) {
    require_positive(t.tau7, "tau7");
    PIVars p;
    p.s0 = 3.5 * t.tau7;
    p.s1 = t.tau5;
    p.t1 = 1.5 * rpow(p.s0, -3.0 / 7) * (t.tau3 - 1.25 * t.tau5 * t.tau5 / p.s0);
    p.t0 = (5 * p.s1 * p.s1 * p.s1 / (8 * p.s0 * p.s0) + p.t1 * p.s1 / rpow(p.s0, 4.0 / 7) - t.tau1) /
           (2 * rpow(p.s0, 1.0 / 7));
    return p;
}

double zeta_of(double z, const PIVars& p) {
    require_positive(p.s0, "s0");
    return z * rpow(p.s0, -2.0 / 7) - p.s1 / p.s0;
}

double eta_of(double xi, const TauVars& t) {
    require_positive(t.tau7, "tau7");
    const double s0 = 3.5 * t.tau7;
    return -(2.0 / 7 * xi * xi * xi * rpow(s0, 1.0 / 7) + t.tau5 * rpow(s0, -4.0 / 7) * xi * xi +
             t.tau3 * rpow(s0, -2.0 / 7) * xi + t.tau1);
}

double regime2_a() { return rpow(64.0 / 7, 1.0 / 7); }

XVars x_vars(const TauVars& t) {
    require_positive(t.tau7, "tau7");
    const double a = regime2_a();
    return {-a * t.tau1 / rpow(t.tau7, 1.0 / 7), 0.75 * a * a * a * t.tau3 / rpow(t.tau7, 3.0 / 7),
            5.0 / 16 * std::pow(a, 5) * t.tau5 / rpow(t.tau7, 5.0 / 7)};
}

Folding folding(const TauVars& t) {
    require_positive(t.tau7, "tau7");
    const double s0 = 3.5 * t.tau7;
    Folding f;
    f.kappa0 = t.tau5 / rpow(s0, 5.0 / 7);
    f.kappa1 = t.tau3 / rpow(s0, 3.0 / 7);
    f.kappa2 = t.tau1 / rpow(s0, 1.0 / 7);
    f.c = std::exp2(-10.0 / 7);
    f.x = {-std::exp2(5.0 / 7) * f.kappa2, 3 * std::exp2(1.0 / 7) * f.kappa1, 5 * std::exp2(-3.0 / 7) * f.kappa0};
    return f;
}

std::complex<double> stokes_s(double iota) { return {0.0, iota - 1}; }

XScaleSurd x_scale_surd() {
    XScaleSurd s;
    s.a = Surd::power(Rational(64, 7), Rational(1, 7));
    s.d0 = -(s.a * Surd::symbol("tau7", Rational(-1, 7)));
    s.d1 = Surd(Rational(3, 4)) * s.a.pow(3) * Surd::symbol("tau7", Rational(-3, 7));
    s.d2 = Surd(Rational(5, 16)) * s.a.pow(5) * Surd::symbol("tau7", Rational(-5, 7));
    return s;
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::One: return "regime1";
        case Regime::Two: return "regime2";
        case Regime::Three: return "regime3";
        case Regime::None: break;
    }
    return "none";
}

double regime3_x(const TauVars& t) {
    require_positive(t.tau7, "tau7");
    const double r = 2 / (7 * t.tau7);
    return -t.tau7 * rpow(r, 6.0 / 7) + t.tau5 * rpow(r, 4.0 / 7) - std::abs(t.tau3) * rpow(r, 2.0 / 7);
}

Regime regime_classify(const TauVars& t, const RegimeConstants& k) {
    if (!(t.tau7 > 0)) return Regime::None;
    const double s0 = 3.5 * t.tau7;
    const double t75 = rpow(t.tau7, 5.0 / 7);
    if (t.tau5 >= k.M * t75) {
        const bool first = t.tau3 >= 1.25 * t.tau5 * t.tau5 / s0 &&
                           t.tau1 >= 5 * t.tau5 * t.tau5 * t.tau5 / (8 * s0 * s0);
        const bool second = t.tau3 <= (37.0 / 56 - k.eps) * t.tau5 * t.tau5 / s0 + t.tau1 * s0 / t.tau5;
        if (first || second) return Regime::One;
    }
    if (std::abs(t.tau1) <= k.M * rpow(t.tau7, 1.0 / 7) && std::abs(t.tau3) <= k.M * rpow(t.tau7, 3.0 / 7) &&
        std::abs(t.tau5) <= k.M * t75)
        return Regime::Two;
    const double x = regime3_x(t);
    if (-k.M1 * rpow(t.tau7, 4.0 / 7) <= t.tau5 && t.tau5 <= -k.M2 * t75 &&
        std::abs(t.tau3) <= k.M1 * rpow(t.tau7, 2.0 / 7) && -k.M3 <= t.tau1 && t.tau1 <= x && -k.M3 < x)
        return Regime::Three;
    return Regime::None;
}

Profile asymptotic_profile(Regime r, const TauVars& t, const ProfileInputs& in) {
    auto need = [](const std::optional<double>& v, const char* name) {
        if (!v) fail("MissingInput", std::string("profile needs ") + name);
        return *v;
    };
    switch (r) {
        case Regime::One: {
            require_positive(t.tau7, "tau7");
            const double y = need(in.y, "y"), h = need(in.h, "h");
            const double r1 = 2 / (7 * t.tau7);
            const double t7 = t.tau7, t5 = t.tau5;
            Profile p;
            p.u = -rpow(r1, 1.0 / 7) * h -
                  (t.tau1 * t5 / (7 * t7) - 3 * t.tau3 * t5 * t5 / (98 * t7 * t7) +
                   15 * t5 * t5 * t5 * t5 / (2744 * t7 * t7 * t7));
            p.v = rpow(r1, 2.0 / 7) * y - t5 / (7 * t7);
            return p;
        }
        case Regime::Two: {
            require_positive(t.tau7, "tau7");
            const double p_ = need(in.p, "p"), q = need(in.q, "q"), qx = need(in.q_x0, "q_x0");
            const double A = rpow(64 / (7 * t.tau7), 1.0 / 7);
            // d/dtau1 = -A d/dx0
            return {A * (q / 2 + p_), A * (-A * qx / 2 - A * q * q / 2)};
        }
        case Regime::Three: {
            const double ps = need(in.p_sigma, "p_sigma"), qs = need(in.q_sigma, "q_sigma");
            return {-ps, -ps * ps + 2 * qs};
        }
        case Regime::None: break;
    }
    fail("DomainError", "no closed-form profile outside the three regimes");
}

DiffPoly sym_scaled_tau7(int p) {
    const Ring& r = pi_ring();
    return DiffPoly::monomial(&r, Monomial::single(r.key(r.family("g")), -p));
}

DiffPoly sym_tau7_pow(int n) {
    const Ring& r = pi_ring();
    return DiffPoly::monomial(&r, Monomial::single(r.key(r.family("g")), 7 * n), Scalar(Rational(2, 7)).pow(n));
}

const SymbolicInverse& symbolic_inverse() {
    static const SymbolicInverse inv = [] {
        const Ring& r = pi_ring();
        SymbolicInverse s;
        // s0 = g^7, s1 = tau5
        s.t1 = pi("3/2*g^-3*(T3 - 5/4*s1^2*g^-7)");
        const DiffPoly s1 = pi("s1"), T1 = pi("T1");
        s.t0 = (pi("5/8*s1^3*g^-14") + s.t1 * s1 * pi("g^-4") - T1) * pi("1/2*g^-1");
        const Key kT1 = r.key(r.family("T1")), kT3 = r.key(r.family("T3"));
        const int c0 = r.coord("t0"), c1 = r.coord("t1");
        auto field = [&](Key by, Key self) {
            VectorField f;
            const DiffPoly a0 = partial(s.t0, by), a1 = partial(s.t1, by);
            if (!a0.is_zero()) f.comps.emplace_back(c0, a0);
            if (!a1.is_zero()) f.comps.emplace_back(c1, a1);
            f.ordinary.emplace(self, DiffPoly(&r, Scalar(1)));
            f.ordinary.emplace(self == kT1 ? kT3 : kT1, DiffPoly(&r));
            for (const char* held : {"g", "s1", "t0", "t1", "z"})
                f.ordinary.emplace(r.key(r.family(held)), DiffPoly(&r));
            return f;
        };
        s.d_tau1 = field(kT1, kT1);
        s.d_tau3 = field(kT3, kT3);
        return s;
    }();
    return inv;
}

}  // namespace kdvw
