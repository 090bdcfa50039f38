#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kdvw/diffpoly.hpp"

namespace kdvw {

// Total derivative along a ring coordinate. Jets shift their index, ordinary
// generators map to their declared image (0 when none), constants to 0.
DiffPoly derive(const DiffPoly& p, const std::string& coord);
DiffPoly derive(const DiffPoly& p, int coord);
DiffPoly derive(const DiffPoly& p, int coord, int times);

// Partial derivative with respect to one variable.
DiffPoly partial(const DiffPoly& p, Key k);

// sum_j c_j D_j acting on jets, with explicit images for ordinary generators
// (used for chain rules after a change of independent variables).
struct VectorField {
    std::vector<std::pair<int, DiffPoly>> comps;
    std::map<Key, DiffPoly> ordinary;
    DiffPoly apply(const DiffPoly& p) const;
};

// sum_n (-D_0)^n dp/d g^(n) for the generator g (spatial order of g ignored).
DiffPoly euler_derivative(const DiffPoly& p, Key generator);

// q with D_0 q = p and no constant term; NotExact when p is not a total derivative.
DiffPoly integrate_total(const DiffPoly& p);

// Evolution equations g_{t_j} = rhs, one per (generator, non-spatial coordinate).
struct FlowEquation {
    Key lhs;  // jet with a single unit index in coordinate j
    DiffPoly rhs;
};

class EquationSystem {
public:
    EquationSystem() = default;
    explicit EquationSystem(std::vector<FlowEquation> eqs);
    const std::vector<FlowEquation>& equations() const { return eqs_; }
    bool empty() const { return eqs_.empty(); }
    // true when k is a derivative of some left-hand side
    bool is_system_symbol(Key k) const;

private:
    std::vector<FlowEquation> eqs_;
};

DiffPoly reduce_on_shell(const DiffPoly& p, const EquationSystem& eqs);

DiffPoly substitute(const DiffPoly& p, const std::map<Key, DiffPoly>& sub);

// Replace every jet of family fam by the matching total derivative of value.
DiffPoly substitute_family(const DiffPoly& p, int fam, const DiffPoly& value);

// Rewrite p into another ring: every variable of p must have an image in sub
// (constants of p's ring included); MissingSymbol otherwise.
DiffPoly transplant(const DiffPoly& p, const std::map<Key, DiffPoly>& sub, const Ring* target);

// Solve a relation linear in flow (constant coefficient) for that symbol.
FlowEquation solve_for(const DiffPoly& relation, Key flow);

// Total derivative along a multi-index alpha (one entry per coordinate).
DiffPoly derive_alpha(const DiffPoly& p, const std::vector<int>& alpha);
std::vector<int> key_alpha(const Ring& r, Key k);

}  // namespace kdvw
