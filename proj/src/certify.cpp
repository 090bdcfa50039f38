#include "kdvw/certify.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "kdvw/error.hpp"
#include "kdvw/hierarchy.hpp"
#include "kdvw/laxsym.hpp"

namespace kdvw {

namespace {

using Producer = std::function<std::vector<Certificate>(const Registry&)>;

struct Job {
    std::string group;
    std::string name;
    std::vector<std::string> deps;  // blamed when the producer throws
    Producer run;
};

std::vector<Certificate> one(Certificate c) { return {std::move(c)}; }

Certificate constraint_certificate(const Registry& reg, const std::string& src, const std::string& dst,
                                   const std::vector<std::string>& vars) {
    const ConstraintSet cs = rescale_constraints(reg.at(src), reg.at(dst), vars);
    Certificate c;
    c.claim = "rescaling " + src + " -> " + dst + ": constraints sufficient and necessary";
    c.deps = {src, dst};
    c.pass = cs.sufficient && cs.necessary;
    c.residual = cs.residual_under_constraints;
    std::string d;
    for (const DiffPoly& k : cs.constraints) d += (d.empty() ? "" : "; ") + k.str() + " = 0";
    c.detail = d;
    return c;
}

const std::vector<Job>& jobs() {
    static const std::vector<Job> all = [] {
        std::vector<Job> j;
        for (int k = 1; k <= 3; ++k) {
            const std::string n = std::to_string(k);
            j.push_back({"hierarchy", "kdv" + n, {"kdv" + n}, [k](const Registry& r) { return one(kdv_matches(k, r)); }});
            j.push_back(
                {"hierarchy", "pkdv" + n, {"pkdv" + n}, [k](const Registry& r) { return one(pkdv_matches(k, r)); }});
        }
        j.push_back({"hierarchy", "lenard closure", {}, [](const Registry&) { return lenard_closure(); }});
        j.push_back({"hierarchy", "flows commute", {}, [](const Registry&) { return one(flows_commute()); }});
        j.push_back({"hierarchy", "miura", {"kdv1", "mKdV1"}, [](const Registry& r) { return one(miura_verify(r)); }});
        for (int k : {3, 5, 7}) {
            const std::string n = std::to_string(k);
            const std::string b = k == 3 ? "b012" : k == 5 ? "b346" : "b7810";
            j.push_back({"zero-curvature", "b along t" + n, {b},
                         [k](const Registry& r) { return one(zero_curvature_b(k, r)); }});
            j.push_back({"zero-curvature", "scalar along t" + n, {"proofkdv" + std::to_string((k - 1) / 2)},
                         [k](const Registry& r) { return one(zero_curvature_scalar(k, r)); }});
            j.push_back({"zero-curvature", "kdv from t" + n, {}, [k](const Registry&) { return one(zero_curvature_kdv(k)); }});
        }
        for (int k = 1; k <= 3; ++k)
            j.push_back({"zero-curvature", "C A D form " + std::to_string(k), {},
                         [k](const Registry&) { return one(verify_CAD(k)); }});
        for (int i = 1; i <= 3; ++i)
            j.push_back({"x-series", "ApppKdV " + std::to_string(i), {"ApppKdV"},
                         [i](const Registry& r) { return one(series_identity(i, r)); }});
        for (const char* e : {"Xrel", "Xb3", "Xb5", "Xb7", "uvsX"})
            j.push_back({"x-series", e, {e}, [e](const Registry& r) { return series_formulas(e, r); }});
        j.push_back({"x-series", "u v consistency", {"uvsX", "vvsX"},
                     [](const Registry& r) { return one(uv_consistency(r)); }});
        j.push_back({"x-series", "det S", {}, [](const Registry&) { return one(series_det()); }});
        j.push_back({"pi-lax", "handy", {"handy"}, [](const Registry& r) { return one(lax_handy(r)); }});
        j.push_back({"pi-lax", "pKdV", {"pKdV"}, [](const Registry& r) { return one(lax_pkdv(r)); }});
        for (const char* m : {"W", "V", "U"})
            j.push_back({"pi-lax", std::string("matrix ") + m, {m},
                         [m](const Registry& r) { return one(lax_matches(m, r)); }});
        j.push_back({"pi-lax", "KdV", {"KdV"}, [](const Registry& r) { return one(lax_kdv(r)); }});
        j.push_back({"pi-lax", "PI2", {"PI2"}, [](const Registry& r) { return one(lax_pi2(r)); }});
        j.push_back({"pi-lax", "compatibility a", {"W", "U"}, [](const Registry& r) { return one(compat_a(r)); }});
        j.push_back({"pi-lax", "compatibility b", {"W", "V"}, [](const Registry& r) { return one(compat_b(r)); }});
        j.push_back({"density", "density", {"U"}, [](const Registry& r) { return one(density_certificate(r)); }});
        for (int k = 1; k <= 2; ++k)
            j.push_back({"mkdv", "mKdV" + std::to_string(k), {"mKdV" + std::to_string(k)},
                         [k](const Registry& r) { return one(mkdv_matches(k, r)); }});
        j.push_back({"mkdv", "PII3", {"PII3"}, [](const Registry& r) { return one(pii3_matches(r)); }});
        j.push_back({"reductions", "y tilde", {}, [](const Registry& r) { return one(tilde_verify(Tilde::Y, r)); }});
        j.push_back({"reductions", "h tilde, sign corrected", {}, [](const Registry& r) {
                         TildeOptions o;
                         o.sign = Scalar(-1);
                         return one(tilde_verify(Tilde::H, r, o));
                     }});
        j.push_back({"reductions", "stationary reduction", {}, [](const Registry&) {
                         const StationaryReport s = stationary_reduction_verify();
                         return std::vector<Certificate>{s.with_constraint, s.as_flows, s.at_zero};
                     }});
        j.push_back({"reductions", "pKdV to KdV", {"pKdV", "handy", "KdV"},
                     [](const Registry& r) { return one(pkdv_to_kdv(r)); }});
        j.push_back({"rescaling", "KdV -> kdv1", {"KdV", "kdv1"},
                     [](const Registry& r) { return one(constraint_certificate(r, "KdV", "kdv1", {"k0", "k1", "k3"})); }});
        j.push_back({"rescaling", "pKdV -> pkdv1", {"pKdV", "pkdv1"},
                     [](const Registry& r) { return one(constraint_certificate(r, "pKdV", "pkdv1", {"n0", "n1", "n3"})); }});
        return j;
    }();
    return all;
}

}  // namespace

const std::vector<std::string>& certify_groups() {
    static const std::vector<std::string> g{"hierarchy", "zero-curvature", "x-series", "pi-lax",
                                            "density",   "mkdv",           "reductions", "rescaling"};
    return g;
}

nlohmann::json certificate_json(const Certificate& c) {
    nlohmann::json j{{"claim", c.claim}, {"pass", c.pass}, {"residual", c.residual}, {"deps", c.deps}};
    if (c.multiplier) j["multiplier"] = *c.multiplier;
    if (!c.location.empty()) j["location"] = c.location;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

nlohmann::json CertifySummary::to_json() const {
    nlohmann::json j;
    j["passed"] = passed;
    j["failed"] = failed;
    j["culprits"] = culprits;
    j["notes"] = notes;
    nlohmann::json list = nlohmann::json::array();
    for (const CertifiedCheck& c : checks) {
        nlohmann::json e = certificate_json(c.cert);
        e["group"] = c.group;
        list.push_back(e);
    }
    j["checks"] = list;
    return j;
}

std::vector<std::string> diagnose(const std::vector<CertifiedCheck>& checks) {
    std::optional<std::set<std::string>> common;
    std::set<std::string> trusted;
    for (const CertifiedCheck& c : checks) {
        const std::set<std::string> d(c.cert.deps.begin(), c.cert.deps.end());
        if (c.cert.pass) {
            trusted.insert(d.begin(), d.end());
            continue;
        }
        if (!common) {
            common = d;
        } else {
            std::set<std::string> keep;
            std::set_intersection(common->begin(), common->end(), d.begin(), d.end(), std::inserter(keep, keep.end()));
            common = keep;
        }
    }
    if (!common) return {};
    std::vector<std::string> out;
    for (const std::string& e : *common)
        if (!trusted.count(e)) out.push_back(e);
    if (out.empty()) out.assign(common->begin(), common->end());
    return out;
}

CertifySummary certify_all(const Registry& reg, const std::set<std::string>& groups) {
    CertifySummary s;
    for (const Job& job : jobs()) {
        if (!groups.count(job.group)) continue;
        std::vector<Certificate> certs;
        try {
            certs = job.run(reg);
        } catch (const Error& e) {
            Certificate c;
            c.claim = job.name;
            c.deps = job.deps;
            c.pass = false;
            c.residual = "";
            c.detail = std::string(e.kind()) + ": " + e.what();
            certs = {c};
        }
        for (Certificate& c : certs) {
            if (c.deps.empty()) c.deps = job.deps;
            if (c.pass) ++s.passed;
            else ++s.failed;
            s.checks.push_back({job.group, std::move(c)});
        }
    }
    if (s.failed) s.culprits = diagnose(s.checks);
    if (groups.count("rescaling")) {
        const ConstraintSet cs = rescale_constraints(reg.at("KdV"), reg.at("kdv1"), {"k0", "k1", "k3"});
        const auto r = cs.check({{"k0", Surd::power(6, Rational(2, 5))},
                                 {"k1", Surd::power(2, Rational(4, 5)) * Surd::power(3, Rational(1, 5))},
                                 {"k3", -Surd::power(6, Rational(2, 5))}});
        s.notes.push_back(std::string("printed kappa values against the KdV -> kdv1 constraints: ") +
                          (r.satisfied ? "satisfied" : "not satisfied"));
    }
    return s;
}

CertifySummary certify_all(const Registry& reg) {
    const auto& g = certify_groups();
    return certify_all(reg, std::set<std::string>(g.begin(), g.end()));
}

}  // namespace kdvw
