#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kdvw/diffpoly.hpp"

namespace kdvw {

// Outcome of one exact check. residual is the canonical text of the
// surviving polynomial ("0" on success).
struct Certificate {
    std::string claim;
    std::vector<std::string> deps;  // registry entries read
    bool pass = false;
    std::string residual = "0";
    std::optional<std::string> multiplier;
    std::string location;  // entry/power for collapse certificates
    std::string detail;
};

inline Certificate zero_certificate(std::string claim, const DiffPoly& r, std::vector<std::string> deps = {}) {
    Certificate c;
    c.claim = std::move(claim);
    c.deps = std::move(deps);
    c.pass = r.is_zero();
    c.residual = r.is_zero() ? "0" : r.str();
    return c;
}

Certificate exact_match(std::string claim, const DiffPoly& derived, const DiffPoly& printed,
                        std::vector<std::string> deps);
// Multiplier m making printed = m * derived, fixed by the term carrying key top.
Certificate multiple_match(std::string claim, const DiffPoly& derived, const DiffPoly& printed, Key top,
                           std::vector<std::string> deps);

}  // namespace kdvw
