#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kdvw/calculus.hpp"
#include "kdvw/certificate.hpp"
#include "kdvw/registry.hpp"

namespace kdvw {

// 2x2 matrix of differential polynomials. Entries 11, 12, 21, 22.
struct Mat2 {
    std::array<DiffPoly, 4> e;

    DiffPoly& at(int i, int j) { return e[static_cast<size_t>(2 * i + j)]; }
    const DiffPoly& at(int i, int j) const { return e[static_cast<size_t>(2 * i + j)]; }

    static Mat2 of(DiffPoly a, DiffPoly b, DiffPoly c, DiffPoly d);
    static Mat2 zero(const Ring* r);
    static Mat2 identity(const Ring* r);
    static Mat2 constant(const Ring* r, const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d);

    Mat2 map(const std::function<DiffPoly(const DiffPoly&)>& f) const;
    DiffPoly trace() const { return e[0] + e[3]; }
    DiffPoly det() const { return e[0] * e[3] - e[1] * e[2]; }
    bool is_zero() const;
    friend bool operator==(const Mat2& a, const Mat2& b) { return a.e == b.e; }
};

Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(const DiffPoly& s, const Mat2& a);
Mat2 commutator(const Mat2& a, const Mat2& b);

// Laurent series in one generator var, keeping the powers below hi.
DiffPoly truncate(const DiffPoly& p, Key var, int hi);
DiffPoly mul_trunc(const DiffPoly& a, const DiffPoly& b, Key var, int hi);
Mat2 mul_trunc(const Mat2& a, const Mat2& b, Key var, int hi);
// Inverse of S = I + O(var) up to var^hi (Neumann series).
Mat2 inverse_trunc(const Mat2& s, Key var, int hi);
// Coefficient of var^p, entry by entry.
Mat2 coefficient(const Mat2& m, Key var, int p);

// Single-pass linear elimination. Each absorbed relation is reduced by the
// rules so far; the highest-priority symbol occurring linearly with a constant
// coefficient becomes a new rule, and earlier rules are rewritten with it.
class Eliminator {
public:
    // Ordering key for pivots (compared lexicographically); nullopt = never a pivot.
    using Priority = std::function<std::optional<std::vector<int>>(Key)>;
    explicit Eliminator(Priority p) : prio_(std::move(p)) {}

    DiffPoly apply(const DiffPoly& p) const;
    Mat2 apply(const Mat2& m) const;
    // Returns the pivot, or 0 when the relation reduced to zero or has no usable pivot.
    Key absorb(const DiffPoly& relation);
    const std::map<Key, DiffPoly>& rules() const { return rules_; }
    size_t unresolved() const { return unresolved_; }

private:
    Priority prio_;
    std::map<Key, DiffPoly> rules_;
    size_t unresolved_ = 0;
};

// ---- zero curvature in the tau ring -----------------------------------------

// B1 and the ansatz for B3, B5, B7 in zeta with unknown jets b0..b10;
// b5 = b2 + u_t3 and b9 = b6 + u_t5 are built in.
Mat2 lax_ansatz(int k);  // k = 1, 3, 5, 7

struct ZeroCurvature {
    std::map<int, DiffPoly> b;   // every b solved up to this flow
    DiffPoly scalar;             // leftover equation
    std::vector<DiffPoly> leftovers;
    Mat2 B;                      // ansatz with the b's substituted
};
// d_t1 B_k - d_tk B_1 - [B_1, B_k] = 0 per power of zeta, solved for the
// b's of flows 3..k. InconsistentSystem when the leftovers are not proportional.
const ZeroCurvature& zero_curvature(int k);  // k = 3, 5, 7

Certificate zero_curvature_b(int k, const Registry& reg);       // against b012 / b346 / b7810
Certificate zero_curvature_scalar(int k, const Registry& reg);  // multiple of proofkdv1..3
// Scalar equation on shell with the lower potential flows, u -> v: equals kdv_rhs.
Certificate zero_curvature_kdv(int k);
// B_{2k+1} = [[-A_k, C_k], [D_k, A_k]] with the Lenard polynomials, k = 1..3.
Certificate verify_CAD(int k);
// C_k, A_k, D_k built from the Lenard polynomials (zeta is the tau-ring generator).
Mat2 cad_matrix(int k);

// ---- X-series ---------------------------------------------------------------

// S = I + sum_j X^(j) w^j with w = zeta^(-1/2), the flow matrices B_f read off
// from (dS) S^-1 - theta' S sigma3 S^-1 after the N, w^(sigma3/2) and
// lower-triangular gauge, and the relations eliminated in one pass.
struct XSeries {
    int depth = 0;
    std::map<int, Mat2> B;                 // f = 1, 3, 5, 7, entries in w
    std::vector<std::pair<int, std::vector<DiffPoly>>> relations;  // per flow (0 = det)
    Eliminator elim{nullptr};
    std::map<int, DiffPoly> b;             // b0..b10 read off the series (b9 absent)
};
constexpr int kXSeriesDepth = 10;
// Cached per depth; TruncationTooShallow below 2.
const XSeries& x_series(int depth = kXSeriesDepth);

// Vanishing conditions along one flow at zeta^-1, zeta^-2 (and the det relations
// for flow 1), reduced by the relations absorbed before them.
std::vector<DiffPoly> series_relations(int flow, int depth = kXSeriesDepth);

DiffPoly x_symbol(int j, int which, int flow = 0);  // which 0: X11, 1: X12; flow 0 = no derivative tag
DiffPoly u_alias(int flow = 0);                      // X11_1 + i X12_1, optionally tagged

// ApppKdV identities 1..3 with the series b's and u.
Certificate series_identity(int which, const Registry& reg);
// Printed X-series formulas (Xrel, Xb3, Xb5, Xb7, uvsX) against the series.
std::vector<Certificate> series_formulas(const std::string& entry, const Registry& reg);
// v = d_t1 u with u, v as registered. drop_x2 removes the X12_2 term of v.
Certificate uv_consistency(const Registry& reg, bool drop_x2 = false);
// det S = 1 up to the truncation after the relations.
Certificate series_det();

// ---- Lax system in the PI ring ------------------------------------------------

constexpr int kPhiDepth = 9;
struct PiLax {
    int depth = 0;
    Mat2 W, V, U;                      // derived, polynomial in z, reduced
    Mat2 Ws, Vs, Us;                   // raw series in s = z^(-1/2)
    Eliminator elim{nullptr};
    EquationSystem kdv;                // y_t1 from the derived W, V compatibility
};
const PiLax& pi_lax(int depth = kPhiDepth);

Mat2 registry_matrix(const Registry& reg, const std::string& name);

// (c): the s^2 coefficient of W12 is a multiple of the handy relation.
Certificate lax_handy(const Registry& reg);
Certificate lax_pkdv(const Registry& reg);
Certificate lax_matches(const std::string& which, const Registry& reg);  // "W", "V", "U"
// KdV from compatibility of the derived W, V; PI2 from the derived W, U.
Certificate lax_kdv(const Registry& reg);
Certificate lax_pi2(const Registry& reg);
// (a) dz W - dt0 U + [W, U] and (b) dt1 W - dt0 V + [W, V] with the registered matrices.
Certificate compat_a(const Registry& reg);
Certificate compat_b(const Registry& reg);

// Every nonzero coefficient of m (per entry and power of var) equals
// lambda * target; reports lambda and where it sits.
Certificate collapse(std::string claim, const Mat2& m, Key var, const DiffPoly& target, Key top,
                     std::vector<std::string> deps);

// ---- density expansion ----------------------------------------------------------

struct DensityExpansion {
    int depth = 0;
    // (power of w, power of E) -> coefficient, for lowest <= power <= 5
    std::map<std::pair<int, int>, DiffPoly> coeff;
};
constexpr int kDensityDepth = 8;
// Quadratic form of the registered U in Phi_+ on the negative axis (z^(1/2) = i w).
// TruncationTooShallow when depth < 5 - lowest; UnknownSurvivor when a retained
// coefficient still carries an unknown Phi entry.
DensityExpansion density_expansion(const Registry& reg, int lowest = 0, int depth = kDensityDepth);
Certificate density_certificate(const Registry& reg);

}  // namespace kdvw
