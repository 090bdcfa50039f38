#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace kdvw {

using cplx = std::complex<double>;

enum class BesselKind { I0, I1, K0, K1 };
std::string bessel_name(BesselKind k);

// Modified Bessel functions of order 0 and 1. Real x > 0, or complex z with
// Re z > 0 (DomainError otherwise).
double bessel(BesselKind k, double x);
cplx bessel(BesselKind k, cplx z);

// Regimes: I by power series for |z| <= kBesselSeam and asymptotics beyond; K by the
// logarithmic series for |z| <= kBesselKSmall, Steed's continued fraction up to
// kBesselSeam and asymptotics beyond. Exposed for seam tests.
constexpr double kBesselSeam = 20;
constexpr double kBesselKSmall = 2;
cplx bessel_i_series(int n, cplx z);
cplx bessel_i_asymptotic(int n, cplx z);
cplx bessel_k_series(int n, cplx z);
cplx bessel_k_fraction(int n, cplx z);
cplx bessel_k_asymptotic(int n, cplx z);

struct Airy {
    double ai, aip;
};
// Maclaurin series in double-double arithmetic for |x| <= kAirySeam, asymptotic
// expansions beyond. RangeError outside [-40, 40].
Airy airy(double x);
constexpr double kAirySeam = 8;
Airy airy_maclaurin(double x);
Airy airy_asymptotic(double x);

struct C2x2 {
    std::array<cplx, 4> e;  // 11, 12, 21, 22
    cplx at(int i, int j) const { return e[static_cast<size_t>(2 * i + j)]; }
    cplx det() const { return e[0] * e[3] - e[1] * e[2]; }
};
C2x2 operator*(const C2x2& a, const C2x2& b);

// (1, 3i/8; 0, 1) times the Bessel matrix
// (sqrt(pi zeta) I1, -i sqrt(zeta/pi) K1; -i sqrt(pi) I0, K0/sqrt(pi)) at sqrt(zeta),
// principal branch. BranchCut on (-inf, 0].
C2x2 phi_be(cplx zeta);

// One line of the identity-residual table.
struct IdentityCheck {
    std::string name;
    double at;
    double residual;
    double tol;
    bool pass;
};
std::vector<IdentityCheck> specfun_check();

}  // namespace kdvw
