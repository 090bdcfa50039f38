#pragma once

#include <set>
#include <string>
#include <vector>

#include "kdvw/diffpoly.hpp"

namespace kdvw {

// One printed equation, formula or matrix. Evolution equations keep their
// flow symbol and right side in parts[0]; relations are stored as "= 0"
// residuals; matrices as four entries (11, 12, 21, 22); formula families as
// labelled right sides.
struct NamedEquation {
    std::string name;
    std::string citation;
    Key flow = 0;  // 0 for relations
    std::vector<std::string> labels;
    std::vector<DiffPoly> parts;

    const DiffPoly& part(const std::string& label) const;
    const DiffPoly& rhs() const { return parts.at(0); }
    // flow - rhs for evolution equations, parts[0] otherwise
    DiffPoly residual() const;
};

// Location of a single stored coefficient.
struct CoefficientSite {
    std::string entry;
    size_t part;
    size_t term;
};

class Registry {
public:
    // The typed-in equations; immutable.
    static const Registry& paper();

    const std::vector<NamedEquation>& entries() const { return entries_; }
    const NamedEquation& at(const std::string& name) const;  // MissingSymbol
    bool has(const std::string& name) const;

    // Copy restricted to the named entries; reads of anything else throw.
    Registry subset(const std::set<std::string>& names) const;

    std::vector<CoefficientSite> sites() const;
    // Copy with one coefficient scaled by 3/2.
    Registry corrupted(const CoefficientSite& s) const;
    std::string describe(const CoefficientSite& s) const;

private:
    std::vector<NamedEquation> entries_;
};

}  // namespace kdvw
