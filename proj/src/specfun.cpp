#include "kdvw/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kdvw/error.hpp"

namespace kdvw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;
constexpr double kEps = 1e-17;

// ---- double-double arithmetic for the Airy Maclaurin series

struct dd {
    double hi = 0, lo = 0;
};

dd quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

dd add(dd a, dd b) {
    const double s = a.hi + b.hi;
    const double bb = s - a.hi;
    double e = (a.hi - (s - bb)) + (b.hi - bb);
    e += a.lo + b.lo;
    return quick_two_sum(s, e);
}

dd neg(dd a) { return {-a.hi, -a.lo}; }

dd mul(dd a, dd b) {
    const double p = a.hi * b.hi;
    double e = std::fma(a.hi, b.hi, -p);
    e += a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p, e);
}

dd div(dd a, double b) {
    const double q1 = a.hi / b;
    const double p = q1 * b;
    const double pe = std::fma(q1, b, -p);
    const double r = ((a.hi - p) - pe) + a.lo;
    return quick_two_sum(q1, r / b);
}

double to_double(dd a) { return a.hi + a.lo; }

// Ai(0) and -Ai'(0) split into leading and trailing doubles.
constexpr dd kAi0{0.3550280538878172, 2.05233632436212e-17};
constexpr dd kAip0{0.2588194037928068, -2.522243111610832e-17};

// ---- Bessel regimes

cplx k_pair_fraction(cplx z, cplx* k1) {
    // Steed's algorithm for the second continued fraction (Temme), order 0
    cplx b = 2.0 * (1.0 + z);
    cplx d = 1.0 / b;
    cplx h = d, delh = d;
    cplx q1 = 0, q2 = 1;
    const double a1 = 0.25;
    cplx q = a1;
    double c = a1, a = -a1;
    cplx s = 1.0 + q * delh;
    for (int i = 1; i < 100000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const cplx dels = q * delh;
        s += dels;
        if (std::abs(dels) < 1e-17 * std::abs(s)) break;
    }
    h = a1 * h;
    const cplx k0 = std::sqrt(kPi / (2.0 * z)) * std::exp(-z) / s;
    *k1 = k0 * (z + 0.5 - h) / z;
    return k0;
}

void check_order(int n) {
    if (n != 0 && n != 1) fail("DomainError", "only orders 0 and 1 are provided");
}

}  // namespace

std::string bessel_name(BesselKind k) {
    switch (k) {
        case BesselKind::I0: return "I0";
        case BesselKind::I1: return "I1";
        case BesselKind::K0: return "K0";
        case BesselKind::K1: return "K1";
    }
    return "?";
}

cplx bessel_i_series(int n, cplx z) {
    check_order(n);
    const cplx q = z * z / 4.0;
    cplx term = n == 0 ? cplx(1) : z / 2.0;
    cplx sum = term;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return sum;
}

cplx bessel_i_asymptotic(int n, cplx z) {
    check_order(n);
    const double mu = 4.0 * n * n;
    cplx term = 1, sum = 1;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const cplx next = term * (-(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k)) / z;
        if (std::abs(next) >= prev) break;
        prev = std::abs(next);
        term = next;
        sum += term;
        if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return std::exp(z) / std::sqrt(2 * kPi * z) * sum;
}

cplx bessel_k_series(int n, cplx z) {
    check_order(n);
    const cplx q = z * z / 4.0;
    const cplx lg = std::log(z / 2.0);
    if (n == 0) {
        cplx term = 1, sum = 0;
        double harmonic = 0;
        for (int k = 1; k < 1000; ++k) {
            term *= q / (static_cast<double>(k) * k);
            harmonic += 1.0 / k;
            sum += harmonic * term;
            if (std::abs(harmonic * term) < kEps * std::abs(sum)) break;
        }
        return -(lg + kEuler) * bessel_i_series(0, z) + sum;
    }
    // psi(k+1) + psi(k+2)
    double psi1 = -kEuler, psi2 = 1 - kEuler;
    cplx term = 1, sum = psi1 + psi2;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        psi1 += 1.0 / k;
        psi2 += 1.0 / (k + 1);
        sum += (psi1 + psi2) * term;
        if (std::abs(term) * (psi1 + psi2) < kEps * std::abs(sum)) break;
    }
    return 1.0 / z + lg * bessel_i_series(1, z) - z / 4.0 * sum;
}

cplx bessel_k_fraction(int n, cplx z) {
    check_order(n);
    cplx k1;
    const cplx k0 = k_pair_fraction(z, &k1);
    return n == 0 ? k0 : k1;
}

cplx bessel_k_asymptotic(int n, cplx z) {
    check_order(n);
    const double mu = 4.0 * n * n;
    cplx term = 1, sum = 1;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const cplx next = term * ((mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k)) / z;
        if (std::abs(next) >= prev) break;
        prev = std::abs(next);
        term = next;
        sum += term;
        if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return std::sqrt(kPi / (2.0 * z)) * std::exp(-z) * sum;
}

cplx bessel(BesselKind k, cplx z) {
    if (!(z.real() > 0)) fail("DomainError", "modified Bessel functions need Re z > 0");
    const double r = std::abs(z);
    const int n = (k == BesselKind::I1 || k == BesselKind::K1) ? 1 : 0;
    if (k == BesselKind::I0 || k == BesselKind::I1)
        return r <= kBesselSeam ? bessel_i_series(n, z) : bessel_i_asymptotic(n, z);
    if (r <= kBesselKSmall) return bessel_k_series(n, z);
    if (r <= kBesselSeam) return bessel_k_fraction(n, z);
    return bessel_k_asymptotic(n, z);
}

double bessel(BesselKind k, double x) {
    if (!(x > 0)) fail("DomainError", "modified Bessel functions need x > 0");
    return bessel(k, cplx(x, 0)).real();
}

Airy airy_maclaurin(double x) {
    const dd X = mul(mul(dd{x, 0}, dd{x, 0}), dd{x, 0});
    // f = sum a_k X^k, g = x sum b_k X^k; fp = x^2 sum 3k a_k X^(k-1), gp = sum (3k+1) b_k X^k
    dd a{1, 0}, b{1, 0};
    dd f = a, g = b, fp{0, 0}, gp = b;
    dd apow{1, 0};  // a_k X^(k-1)
    for (int k = 1; k < 400; ++k) {
        apow = div(a, static_cast<double>((3 * k - 1) * (3 * k)));
        a = mul(apow, X);
        b = div(mul(b, X), static_cast<double>((3 * k) * (3 * k + 1)));
        f = add(f, a);
        g = add(g, b);
        fp = add(fp, mul(apow, dd{3.0 * k, 0}));
        gp = add(gp, mul(b, dd{3.0 * k + 1, 0}));
        const double t = std::max({std::abs(a.hi), std::abs(b.hi), std::abs(apow.hi) * 3 * k});
        if (t < 1e-34 * std::max({std::abs(f.hi), std::abs(g.hi), 1.0})) break;
    }
    g = mul(g, dd{x, 0});
    fp = mul(fp, mul(dd{x, 0}, dd{x, 0}));
    const dd ai = add(mul(kAi0, f), neg(mul(kAip0, g)));
    const dd aip = add(mul(kAi0, fp), neg(mul(kAip0, gp)));
    return {to_double(ai), to_double(aip)};
}

Airy airy_asymptotic(double x) {
    const double y = std::abs(x);
    if (y < 1) fail("RangeError", "asymptotic Airy expansion needs |x| >= 1");
    const double xi = 2.0 / 3 * y * std::sqrt(y);
    // u_k / xi^k and v_k / xi^k until they stop decreasing
    std::vector<double> u{1}, v{1};
    double uk = 1;
    for (int k = 1; k < 200; ++k) {
        uk *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216 * k) / xi;
        const double vk = -(6.0 * k + 1) / (6.0 * k - 1) * uk;
        if (std::abs(uk) >= std::abs(u.back()) || std::abs(vk) >= std::abs(v.back())) break;
        u.push_back(uk);
        v.push_back(vk);
        if (std::abs(uk) < kEps && std::abs(vk) < kEps) break;
    }
    const double sp = 2 * std::sqrt(kPi);
    if (x > 0) {
        double su = 0, sv = 0;
        for (size_t k = 0; k < u.size(); ++k) {
            const double sg = (k % 2) ? -1.0 : 1.0;
            su += sg * u[k];
            sv += sg * v[k];
        }
        const double e = std::exp(-xi);
        const double q = std::pow(y, 0.25);
        return {e / (sp * q) * su, -q * e / sp * sv};
    }
    double pu = 0, qu = 0, pv = 0, qv = 0;
    for (size_t k = 0; k < u.size(); ++k) {
        const double sg = ((k / 2) % 2) ? -1.0 : 1.0;
        if (k % 2 == 0) {
            pu += sg * u[k];
            pv += sg * v[k];
        } else {
            qu += sg * u[k];
            qv += sg * v[k];
        }
    }
    const double ph = xi - kPi / 4;
    const double c = std::cos(ph), s = std::sin(ph);
    const double q = std::pow(y, 0.25);
    const double rp = std::sqrt(kPi);
    return {(c * pu + s * qu) / (rp * q), q / rp * (s * pv - c * qv)};
}

Airy airy(double x) {
    if (!(x >= -40 && x <= 40)) fail("RangeError", "airy is provided on [-40, 40]");
    return std::abs(x) <= kAirySeam ? airy_maclaurin(x) : airy_asymptotic(x);
}

C2x2 operator*(const C2x2& a, const C2x2& b) {
    return {{a.e[0] * b.e[0] + a.e[1] * b.e[2], a.e[0] * b.e[1] + a.e[1] * b.e[3],
             a.e[2] * b.e[0] + a.e[3] * b.e[2], a.e[2] * b.e[1] + a.e[3] * b.e[3]}};
}

C2x2 phi_be(cplx zeta) {
    if (zeta.imag() == 0 && zeta.real() <= 0) fail("BranchCut", "phi_be is defined off (-inf, 0]");
    const cplx r = std::sqrt(zeta);
    const cplx I(0, 1);
    const double sp = std::sqrt(kPi);
    const C2x2 bes{{std::sqrt(kPi * zeta) * bessel(BesselKind::I1, r), -I * std::sqrt(zeta / kPi) * bessel(BesselKind::K1, r),
                    -I * sp * bessel(BesselKind::I0, r), bessel(BesselKind::K0, r) / sp}};
    const C2x2 pre{{1.0, 3.0 * I / 8.0, 0.0, 1.0}};
    return pre * bes;
}

std::vector<IdentityCheck> specfun_check() {
    std::vector<IdentityCheck> out;
    auto row = [&](std::string name, double at, double res, double tol) {
        out.push_back({std::move(name), at, res, tol, res <= tol});
    };
    for (double x : {0.5, 1.0, 2.0, 5.0, 8.0, 9.0, 10.0, 19.5, 20.0, 20.5, 30.0}) {
        const double w = bessel(BesselKind::I1, x) * bessel(BesselKind::K0, x) +
                         bessel(BesselKind::I0, x) * bessel(BesselKind::K1, x);
        row("bessel wronskian x(I1 K0 + I0 K1) - 1", x, std::abs(x * w - 1), 1e-12);
    }
    for (double x : {18.0, 20.0, 22.0})
        for (int n : {0, 1}) {
            const cplx a = bessel_i_series(n, x), b = bessel_i_asymptotic(n, x);
            row("I" + std::to_string(n) + " series vs asymptotic", x, std::abs(a - b) / std::abs(a), 1e-12);
            const cplx c = bessel_k_fraction(n, x), d = bessel_k_asymptotic(n, x);
            row("K" + std::to_string(n) + " fraction vs asymptotic", x, std::abs(c - d) / std::abs(c), 1e-12);
        }
    for (double x : {1.5, 2.0, 2.5})
        for (int n : {0, 1}) {
            const cplx a = bessel_k_series(n, x), b = bessel_k_fraction(n, x);
            row("K" + std::to_string(n) + " series vs fraction", x, std::abs(a - b) / std::abs(a), 1e-13);
        }
    for (int j = 0; j < 20; ++j) {
        // a spiral of sample points around the origin, away from the cut
        const double rad = 0.05 * std::pow(1.5, j), arg = -2.6 + 5.2 * j / 19.0;
        const cplx z = std::polar(rad, arg);
        row("phi_be det - 1 at |zeta| = " + std::to_string(rad), arg, std::abs(phi_be(z).det() - 1.0), 1e-12);
    }
    for (double x : {-5.0, 0.0, 5.0}) {
        // Richardson-extrapolated second differences
        auto d2 = [](double x0, double h) {
            return (airy(x0 + h).ai - 2 * airy(x0).ai + airy(x0 - h).ai) / (h * h);
        };
        const double h = 0.04;
        const double r1 = (4 * d2(x, h / 2) - d2(x, h)) / 3, r2 = (4 * d2(x, h / 4) - d2(x, h / 2)) / 3;
        const double app = (16 * r2 - r1) / 15;
        row("airy ode Ai'' - x Ai", x, std::abs(app - x * airy(x).ai), 1e-10);
    }
    const double g23 = std::tgamma(2.0 / 3);
    row("Ai(0) - 3^(-2/3)/Gamma(2/3)", 0, std::abs(airy(0).ai - std::pow(3.0, -2.0 / 3) / g23), 1e-15);
    row("Gamma(1/3) Gamma(2/3) - 2 pi/sqrt 3", 0, std::abs(std::tgamma(1.0 / 3) * g23 - 2 * kPi / std::sqrt(3.0)), 1e-14);
    for (double x : {-8.0, 8.0}) {
        const Airy a = airy_maclaurin(x), b = airy_asymptotic(x);
        row("airy maclaurin vs asymptotic", x, std::abs(a.ai - b.ai) / std::max(std::abs(a.ai), 1e-2), 1e-12);
    }
    return out;
}

}  // namespace kdvw
