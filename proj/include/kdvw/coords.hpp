#pragma once

#include <complex>
#include <optional>
#include <string>

#include "kdvw/calculus.hpp"
#include "kdvw/radical.hpp"

namespace kdvw {

struct PIVars {
    double t0 = 0, t1 = 0, s0 = 1, s1 = 0;
};

struct TauVars {
    double tau1 = 0, tau3 = 0, tau5 = 0, tau7 = 1;
};

// (t0, t1, s0, s1) -> (tau1, tau3, tau5, tau7) and back. DomainError unless s0, tau7 > 0.
TauVars to_tau(const PIVars& p);
PIVars from_tau(const TauVars& t);

// zeta = z s0^(-2/7) - s1/s0
double zeta_of(double z, const PIVars& p);
// eta(xi) = -((2/7) xi^3 s0^(1/7) + tau5 s0^(-4/7) xi^2 + tau3 s0^(-2/7) xi + tau1), s0 = 7 tau7 / 2
double eta_of(double xi, const TauVars& t);

struct XVars {
    double x0, x1, x2;
};
// Regime-2 variables with a = (2^6/7)^(1/7).
XVars x_vars(const TauVars& t);
double regime2_a();

// kappa0 = tau5 s0^(-5/7), kappa1 = tau3 s0^(-3/7), kappa2 = tau1 s0^(-1/7) and the
// same x-variables written through them.
struct Folding {
    double kappa0, kappa1, kappa2;
    double c;  // 2^(-10/7)
    XVars x;
};
Folding folding(const TauVars& t);

// Stokes parameter s = i (iota - 1).
std::complex<double> stokes_s(double iota);

// Exact versions of the x-map scale factors: dx0/dtau1, dx1/dtau3, dx2/dtau5 as
// powers of 2, 7 and the symbol tau7.
struct XScaleSurd {
    Surd a, d0, d1, d2;
};
XScaleSurd x_scale_surd();

struct RegimeConstants {
    double M = 10, M1 = 1, M2 = 10, M3 = 1, eps = 0.01;
};

enum class Regime { One, Two, Three, None };
std::string regime_name(Regime r);
Regime regime_classify(const TauVars& t, const RegimeConstants& k = {});
// Right end of the regime-3 window for tau1.
double regime3_x(const TauVars& t);

struct ProfileInputs {
    std::optional<double> y, h;           // regime 1
    std::optional<double> p, q, q_x0;     // regime 2
    std::optional<double> p_sigma, q_sigma;  // regime 3, already evaluated at -tau1
};

struct Profile {
    double u, v;
};
// Closed-form parts of the three asymptotic regimes. MissingInput when a needed value is absent.
Profile asymptotic_profile(Regime r, const TauVars& t, const ProfileInputs& in);

// Exact symbolic inverse in the PI ring, g standing for s0^(1/7), T1 and T3 for
// tau1 and tau3, s1 = tau5.
struct SymbolicInverse {
    DiffPoly t0, t1;             // as functions of T1, T3, g, s1
    VectorField d_tau1, d_tau3;  // chain rule acting on y, h, T1, T3 (g, s1 held)
};
const SymbolicInverse& symbolic_inverse();

// (2/(7 tau7))^(p/7) = g^(-p) and tau7^n = (2/7)^n g^(7n) in the PI ring.
DiffPoly sym_scaled_tau7(int p);
DiffPoly sym_tau7_pow(int n);

}  // namespace kdvw
