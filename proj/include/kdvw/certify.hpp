#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdvw/certificate.hpp"
#include "kdvw/registry.hpp"

namespace kdvw {

struct CertifiedCheck {
    std::string group;  // hierarchy, zero-curvature, x-series, pi-lax, density, mkdv, reductions, rescaling
    Certificate cert;
};

struct CertifySummary {
    std::vector<CertifiedCheck> checks;
    int passed = 0;
    int failed = 0;
    // registry entries blamed for the failures
    std::vector<std::string> culprits;
    // recorded, never counted as failures
    std::vector<std::string> notes;

    bool ok() const { return failed == 0; }
    nlohmann::json to_json() const;
};

const std::vector<std::string>& certify_groups();

// Every exact certificate of the selected groups (all of them by default; an
// empty selection runs nothing). Exceptions inside a check become failures.
CertifySummary certify_all(const Registry& reg = Registry::paper());
CertifySummary certify_all(const Registry& reg, const std::set<std::string>& groups);

// Entries read by every failing certificate; among those, the ones that no
// passing certificate also reads. Falls back to the plain intersection when
// the second filter would leave nothing.
std::vector<std::string> diagnose(const std::vector<CertifiedCheck>& checks);

nlohmann::json certificate_json(const Certificate& c);

}  // namespace kdvw
