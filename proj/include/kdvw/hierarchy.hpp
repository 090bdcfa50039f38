#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvw/calculus.hpp"
#include "kdvw/certificate.hpp"
#include "kdvw/radical.hpp"
#include "kdvw/registry.hpp"

namespace kdvw {

constexpr int kLenardDepth = 5;

// R_{2k+1}[v] in the tau ring; R_1 = v, D R_{2k+3} = ((1/4)D^3 + 2vD + v') R_{2k+1}.
DiffPoly lenard(int k);
// Right side of the recursion before integration.
DiffPoly lenard_step(int k);

DiffPoly kdv_rhs(int k);   // D lenard(k), k = 1..kLenardDepth
DiffPoly pkdv_rhs(int k);  // lenard(k) with v^(n) -> u^(n+1)

// v_{t_{2k+1}} = kdv_rhs(k) for k = 1..kmax (kmax <= 3: t3, t5, t7)
EquationSystem kdv_system(int kmax = 3);
EquationSystem pkdv_system(int kmax = 3);

Certificate kdv_matches(int k, const Registry& reg);
Certificate pkdv_matches(int k, const Registry& reg);
std::vector<Certificate> lenard_closure(int depth = kLenardDepth);
// D_{t3} D_{t5} v - D_{t5} D_{t3} v on shell
Certificate flows_commute();

// mKdV recursion in the mkdv ring: K_0 = q', K_{n+1} = (D^2 - 4q^2 - 4q' D^-1 q) K_n, G_n = D^-1 K_n.
DiffPoly mkdv_flux(int n);
DiffPoly mkdv_gradient(int n);
Certificate mkdv_matches(int k, const Registry& reg);  // k = 1, 2
Certificate pii3_matches(const Registry& reg);

// LHS - RHS of the registered PII3 after assigning every symbol it contains
// (keys of the mkdv ring). MissingSymbol when one is left unassigned.
DiffPoly pii3_residual(const std::map<Key, DiffPoly>& assignment, const Registry& reg);
// Same with q a function of x0, x1, x2 (all q-jets follow by differentiation).
DiffPoly pii3_residual_for(const DiffPoly& q_of_x, const Registry& reg);

// Coefficient of q^2 q' in q_{tau3} derived from mKdV1 and the x-map, divided by c^2
// where c = a tau7^(-1/7).
struct MiuraCoefficient {
    Surd coefficient;   // in terms of tau7
    Surd c_squared;
    Rational ratio;
    Rational third;     // coefficient of q'''
};
MiuraCoefficient miura_coefficient(const Registry& reg);
// ratio overrides the derived coefficient (negative controls).
Certificate miura_verify(const Registry& reg, std::optional<Rational> ratio = std::nullopt);

enum class Tilde { Y, H };
struct TildeOptions {
    bool handy_route = false;     // h: use handy + KdV instead of pKdV
    std::optional<Scalar> handy_factor;  // h_{t0} = factor * y (default: registry)
    Scalar sign = 1;              // test sign * tilde instead of tilde
};
Certificate tilde_verify(Tilde which, const Registry& reg, const TildeOptions& opt = {});

// Constraints on the rescaling constants so that target(tau1, tau3) = K0 src(K1 tau1, K3 tau3)
// solves the target flow given the source flow.
struct ConstraintSet {
    std::vector<std::string> vars;   // names of the constants, e.g. k0 k1 k3
    std::vector<DiffPoly> raw;       // coefficient equations before elimination
    std::vector<DiffPoly> constraints;  // triangular: var - value(others)
    bool sufficient = false;
    bool necessary = false;
    std::string residual_under_constraints = "0";

    struct Report {
        std::vector<Surd> values;  // each constraint evaluated
        bool satisfied;
    };
    Report check(const std::map<std::string, Surd>& assignment) const;
};
ConstraintSet rescale_constraints(const NamedEquation& source, const NamedEquation& target,
                                  const std::vector<std::string>& constants);

struct StationaryReport {
    Certificate with_constraint;
    Certificate as_flows;  // residual equals 5 tau5 v_t5 + 7 tau7 v_t7
    std::string unconstrained_residual;
    Certificate at_zero;
};
StationaryReport stationary_reduction_verify();

// d/dt0 of pKdV with h_{t0} = factor * y, compared with 2 KdV.
Certificate pkdv_to_kdv(const Registry& reg, std::optional<Scalar> handy_factor = std::nullopt);

// Rules h_{t0^n ...} -> D^(n-1)(rhs) from the registered handy relation (or a replacement).
std::map<Key, DiffPoly> handy_rules(const DiffPoly& expr, const std::optional<Scalar>& factor, const Registry& reg);

}  // namespace kdvw
