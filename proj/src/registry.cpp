#include "kdvw/registry.hpp"

#include "kdvw/error.hpp"
#include "kdvw/rings.hpp"

namespace kdvw {

const DiffPoly& NamedEquation::part(const std::string& label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return parts[i];
    fail("MissingSymbol", name + " has no part '" + label + "'");
}

DiffPoly NamedEquation::residual() const {
    if (!flow) return parts.at(0);
    const Ring* r = parts.at(0).ring();
    return DiffPoly::monomial(r, Monomial::single(flow)) - parts.at(0);
}

namespace {

NamedEquation flow_eq(const Ring& r, const std::string& name, const std::string& cite, const std::string& lhs,
                      const std::string& rhs) {
    return {name, cite, r.parse_key(lhs), {"rhs"}, {r.parse(rhs)}};
}

NamedEquation relation(const Ring& r, const std::string& name, const std::string& cite, const std::string& expr) {
    return {name, cite, 0, {"expr"}, {r.parse(expr)}};
}

NamedEquation formulas(const Ring& r, const std::string& name, const std::string& cite,
                       const std::vector<std::pair<std::string, std::string>>& items) {
    NamedEquation e{name, cite, 0, {}, {}};
    for (const auto& [label, text] : items) {
        e.labels.push_back(label);
        e.parts.push_back(r.parse(text));
    }
    return e;
}

std::vector<NamedEquation> build() {
    const Ring& T = tau_ring();
    const Ring& P = pi_ring();
    const Ring& M = mkdv_ring();
    std::vector<NamedEquation> e;

    e.push_back(flow_eq(T, "kdv1", "KdV hierarchy, explicit tau3 flow", "v_t3", "1/4*v_3 + 3*v_0*v_1"));
    e.push_back(flow_eq(T, "kdv2", "KdV hierarchy, explicit tau5 flow", "v_t5",
                        "1/16*v_5 + 5/2*v_1*v_2 + 5/4*v_0*v_3 + 15/2*v_0^2*v_1"));
    e.push_back(flow_eq(T, "kdv3", "KdV hierarchy, explicit tau7 flow", "v_t7",
                        "1/64*v_7 + 35/16*v_2*v_3 + 35/2*v_0*v_1*v_2 + 7/16*v_0*v_5 + 35/2*v_0^3*v_1 "
                        "+ 35/8*v_1^3 + 21/16*v_1*v_4 + 35/8*v_0^2*v_3"));
    e.push_back(flow_eq(T, "pkdv1", "potential KdV hierarchy, tau3 flow", "u_t3", "1/4*u_3 + 3/2*u_1^2"));
    e.push_back(flow_eq(T, "pkdv2", "potential KdV hierarchy, tau5 flow", "u_t5",
                        "1/16*u_5 + 5/4*u_1*u_3 + 5/8*u_2^2 + 5/2*u_1^3"));
    e.push_back(flow_eq(T, "pkdv3", "potential KdV hierarchy, tau7 flow", "u_t7",
                        "1/64*u_7 + 7/16*u_1*u_5 + 21/32*u_3^2 + 7/8*u_2*u_4 + 35/8*u_3*u_1^2 "
                        "+ 35/8*u_1*u_2^2 + 35/8*u_1^4"));

    e.push_back(formulas(T, "b012", "zero-curvature coefficients, k = 3",
                         {{"b0", "-2*u_1"}, {"b1", "-1/2*u_2"}, {"b2", "-2*u_1^2 - 1/2*u_3"}}));
    e.push_back(relation(T, "proofkdv1", "zero-curvature scalar equation, k = 3",
                         "6*u_1*u_2 + 1/2*u_4 - 2*u_t3_1"));
    e.push_back(formulas(T, "b346", "zero-curvature coefficients, k = 5",
                         {{"b3", "-1/2*u_t3_1"}, {"b4", "u_t3"}, {"b6", "-2*u_1*u_t3 - 1/2*u_t3_2"}}));
    e.push_back(relation(T, "proofkdv2", "zero-curvature scalar equation, k = 5",
                         "4*u_1*u_t3_1 + 2*u_2*u_t3 - 2*u_t5_1 + 1/2*u_t3_3"));
    e.push_back(formulas(T, "b7810", "zero-curvature coefficients, k = 7",
                         {{"b7", "-1/2*u_t5_1"}, {"b8", "u_t5"}, {"b10", "-2*u_t5*u_1 - 1/2*u_t5_2"}}));
    e.push_back(relation(T, "proofkdv3", "zero-curvature scalar equation, k = 7",
                         "4*u_1*u_t5_1 + 2*u_2*u_t5 - 2*u_t7_1 + 1/2*u_t5_3"));
    e.push_back(formulas(T, "ApppKdV", "b-identities from the X-series at zeta^-1, zeta^-2",
                         {{"1", "b2 - 1/4*b0^2 + 2*u_t3"},
                          {"2", "b6 + b1^2 - 1/8*b0^3 + b0*b4 + 2*u_t5"},
                          {"3", "b10 - 1/2*b0*b6 + 2*b1*b3 + b4*b5 + 2*u_t7"}}));
    e.push_back(formulas(T, "uvsX", "u in terms of X^(1)", {{"u", "X11_1 + I*X12_1"}}));
    e.push_back(formulas(T, "vvsX", "v in terms of X^(1), X^(2)",
                         {{"v", "-2*I*X11_1*X12_1 + 2*X12_1^2 - 2*I*X12_2"}}));

    // X-series relations and b read-offs, right sides as printed
    e.push_back(formulas(
        T, "Xrel", "X-series relations along tau1",
        {{"X11_2", "1/2*X11_1^2 + 1/2*X12_1^2"},
         {"X11_4", "-1/2*(X11_2^2 + X12_2^2) + X11_1*X11_3 + X12_1*X12_3"}}));
    e.push_back(formulas(
        T, "Xb3", "b1, b2 and u_tau3 from the tau3 X-series",
        {{"b1",
          "-2*I*X11_1^2*X12_1 + 4*X11_1*X12_1^2 - 2*I*X11_1*X12_2 + 2*I*X11_2*X12_1 + 2*I*X12_1^3 "
          "+ 4*X12_1*X12_2 - 2*I*X12_3"},
         {"b2",
          "2*I*X11_1^3*X12_1 - 6*X11_1^2*X12_1^2 + 2*I*X11_1^2*X12_2 - 4*I*X11_1*X11_2*X12_1 "
          "- 6*I*X11_1*X12_1^3 - 8*X11_1*X12_1*X12_2 + 2*I*X11_1*X12_3 + 4*X11_2*X12_1^2 - 2*I*X11_2*X12_2 "
          "+ 2*I*X11_3*X12_1 + 2*X12_1^4 - 6*I*X12_1^2*X12_2 - 4*X12_1*X12_3 - 2*X12_2^2 "
          "+ 2*I*X12_4 - X11_1_t3 - I*X12_1_t3"},
         {"u_t3",
          "-I*X11_1^2*X12_2 - 2*I*X11_1*X12_3 - 2*I*X11_3*X12_1 - I*X12_1^2*X12_2 "
          "+ 4*X12_1*X12_3 - 2*X12_2^2 - 2*I*X12_4"}}));
    e.push_back(formulas(
        T, "Xb5", "b3, b4, b6 from the tau5 X-series",
        {{"b3",
          "1/4*I*X11_1^4*X12_1 + 1/2*I*X11_1^2*X12_1^3 + 2*X11_1^2*X12_1*X12_2 - I*X11_1^2*X12_3 "
          "- 2*I*X11_1*X11_3*X12_1 + 4*X11_1*X12_1*X12_3 - 2*I*X11_1*X12_4 + 4*X11_3*X12_1^2 - 2*I*X11_3*X12_2 "
          "+ 1/4*I*X12_1^5 + 2*X12_1^3*X12_2 + 5*I*X12_1^2*X12_3 - 3*I*X12_1*X12_2^2 + 4*X12_1*X12_4 "
          "- 2*I*X12_5"},
         {"b4",
          "-2*I*X11_1^3*X12_1 + 2*X11_1^2*X12_1^2 - 2*I*X11_1^2*X12_2 + 4*I*X11_1*X11_2*X12_1 "
          "- 2*I*X11_1*X12_1^3 - 2*I*X11_1*X12_3 - 4*X11_2*X12_1^2 + 2*I*X11_2*X12_2 - 2*I*X11_3*X12_1 "
          "+ 2*X12_1^4 - 2*I*X12_1^2*X12_2 + 4*X12_1*X12_3 - 2*X12_2^2 - 2*I*X12_4"},
         {"b6",
          "X11_1^4*X12_1^2 + 2*X11_1^2*X12_1^4 - 4*I*X11_1^2*X12_1^2*X12_2 - 4*X11_1^2*X12_1*X12_3 "
          "- 8*X11_1*X11_3*X12_1^2 - 8*I*X11_1*X12_1^2*X12_3 - 8*X11_1*X12_1*X12_4 - 8*I*X11_3*X12_1^3 "
          "- 8*X11_3*X12_1*X12_2 + X12_1^6 - 4*I*X12_1^4*X12_2 + 4*X12_1^3*X12_3 - 4*X12_1^2*X12_2^2 "
          "- 8*I*X12_1^2*X12_4 - 8*X12_2*X12_4 + 4*X12_3^2 - 2*u_t5"}}));
    e.push_back(formulas(
        T, "Xb7", "b10, b8 from the tau7 X-series",
        {{"b10",
          "-1/2*X11_1^6*X12_1^2 - 3/2*X11_1^4*X12_1^4 + I*X11_1^4*X12_1^2*X12_2 "
          "+ X11_1^4*X12_1*X12_3 + 4*X11_1^3*X11_3*X12_1^2 - 3/2*X11_1^2*X12_1^6 "
          "+ 2*I*X11_1^2*X12_1^4*X12_2 + 6*X11_1^2*X12_1^3*X12_3 - 2*X11_1^2*X12_1^2*X12_2^2 "
          "- 4*I*X11_1^2*X12_1^2*X12_4 - 4*X11_1^2*X12_1*X12_5 + 4*X11_1*X11_3*X12_1^4 "
          "- 8*I*X11_1*X11_3*X12_1^2*X12_2 - 8*X11_1*X11_3*X12_1*X12_3 - 8*X11_1*X11_5*X12_1^2 "
          "- 8*I*X11_1*X12_1^2*X12_5 - 8*X11_1*X12_1*X12_6 - 4*X11_3^2*X12_1^2 "
          "- 8*I*X11_3*X12_1^2*X12_3 - 8*X11_3*X12_1*X12_4 - 8*I*X11_5*X12_1^3 - 8*X11_5*X12_1*X12_2 "
          "- 1/2*X12_1^8 + I*X12_1^6*X12_2 + 5*X12_1^5*X12_3 - 2*X12_1^4*X12_2^2 "
          "- 4*I*X12_1^4*X12_4 - 8*I*X12_1^3*X12_2*X12_3 + 4*X12_1^3*X12_5 + 4*I*X12_1^2*X12_2^3 "
          "- 8*X12_1^2*X12_2*X12_4 - 4*X12_1^2*X12_3^2 - 8*I*X12_1^2*X12_6 "
          "+ 4*X12_1*X12_2^2*X12_3 - 8*X12_2*X12_6 + 8*X12_3*X12_5 - 4*X12_4^2 - 2*u_t7"},
         {"b8",
          "1/4*I*X11_1^4*X12_2 + 1/2*I*X11_1^2*X12_1^2*X12_2 - I*X11_1^2*X12_4 - 2*I*X11_1*X11_3*X12_2 "
          "- 2*I*X11_1*X12_5 - 2*I*X11_3*X12_3 - 2*I*X11_5*X12_1 + 1/4*I*X12_1^4*X12_2 - I*X12_1^2*X12_4 "
          "- 2*I*X12_1*X12_2*X12_3 + 4*X12_1*X12_5 + I*X12_2^3 - 4*X12_2*X12_4 + 2*X12_3^2 - 2*I*X12_6"}}));

    // PI^(2) Lax data in (t0, t1)
    e.push_back(relation(P, "handy", "relation between h and y", "h_1 - 2*y_0"));
    e.push_back(relation(P, "pKdV", "potential KdV in (t0, t1)", "h_t1 + 1/4*h_1^2 + 1/48*h_3"));
    e.push_back(relation(P, "PI2", "second member of the Painleve I hierarchy",
                         "1/64*y_4 + 5/8*(y_1^2 + 2*y_0*y_2) + 10*y_0^3 + 4*y_0*t1 - 4*t0"));
    e.push_back(relation(P, "KdV", "KdV in (t0, t1)", "y_t1 + y_0*y_1 + 1/48*y_3"));
    e.push_back(formulas(P, "W", "t0 Lax matrix", {{"11", "0"}, {"12", "-2"}, {"21", "-2*z + 2*y_0 + h_1"}, {"22", "0"}}));
    e.push_back(formulas(P, "V", "t1 Lax matrix",
                         {{"11", "1/6*y_1"},
                          {"12", "2/3*z + 2/3*y_0"},
                          {"21", "2/3*z^2 - 2/3*z*y_0 + 2/3*y_0^2 + 2*h_t1"},
                          {"22", "-1/6*y_1"}}));
    e.push_back(formulas(
        P, "U", "z Lax matrix",
        {{"11", "1/4*y_1*z + 3/4*y_0*y_1 + 1/64*y_3"},
         {"12", "z^2 + y_0*z + 3/2*y_0^2 + 1/16*y_2 + t1"},
         {"21", "z^3 - y_0*z^2 + (t1 - 1/2*y_0^2 - 1/16*y_2)*z + 2*y_0^3 + 1/8*y_0*y_2 - 1/16*y_1^2 - 2*t0"},
         {"22", "-1/4*y_1*z - 3/4*y_0*y_1 - 1/64*y_3"}}));

    // regime-2 equations in (x0, x1, x2)
    e.push_back(flow_eq(M, "mKdV1", "first modified KdV flow", "q_x1", "2*q_0^2*q_1 - 1/3*q_3"));
    e.push_back(flow_eq(M, "mKdV2", "second modified KdV flow", "q_x2",
                        "-6*q_0^4*q_1 + 2*q_0^2*q_3 + 8*q_0*q_1*q_2 + 2*q_1^3 - 1/5*q_5"));
    // left side minus right side; the x2 bracket term 10 q d(q)^2 read as 10 q (q')^2
    e.push_back(relation(M, "PII3", "third member of the Painleve II hierarchy",
                         "q_6 - (x0*q_0 + x1*(2*q_0^3 - q_2) + x2*(-6*q_0^5 + 10*q_0^2*q_2 + 10*q_0*q_1^2 - q_4) "
                         "+ 20*q_0^7 - 70*q_0^4*q_2 - 140*q_0^3*q_1^2 + 14*q_0^2*q_4 + 56*q_0*q_1*q_3 "
                         "+ 42*q_0*q_2^2 + 70*q_1^2*q_2 - 1/2)"));
    return e;
}

}  // namespace

const Registry& Registry::paper() {
    static const Registry r = [] {
        Registry x;
        x.entries_ = build();
        return x;
    }();
    return r;
}

const NamedEquation& Registry::at(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e;
    fail("MissingSymbol", "registry has no entry '" + name + "'");
}

bool Registry::has(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return true;
    return false;
}

Registry Registry::subset(const std::set<std::string>& names) const {
    Registry r;
    for (const auto& e : entries_)
        if (names.count(e.name)) r.entries_.push_back(e);
    return r;
}

std::vector<CoefficientSite> Registry::sites() const {
    std::vector<CoefficientSite> out;
    for (const auto& e : entries_)
        for (size_t p = 0; p < e.parts.size(); ++p)
            for (size_t t = 0; t < e.parts[p].size(); ++t) out.push_back({e.name, p, t});
    return out;
}

Registry Registry::corrupted(const CoefficientSite& s) const {
    Registry r = *this;
    for (auto& e : r.entries_) {
        if (e.name != s.entry) continue;
        DiffPoly& p = e.parts.at(s.part);
        if (s.term >= p.size()) fail("RangeError", "no such coefficient");
        auto it = p.terms().begin();
        std::advance(it, static_cast<long>(s.term));
        DiffPoly bump = DiffPoly::monomial(p.ring(), it->first, it->second * Scalar::frac(1, 2));
        p += bump;
        return r;
    }
    fail("MissingSymbol", "registry has no entry '" + s.entry + "'");
}

std::string Registry::describe(const CoefficientSite& s) const {
    const NamedEquation& e = at(s.entry);
    const DiffPoly& p = e.parts.at(s.part);
    auto it = p.terms().begin();
    std::advance(it, static_cast<long>(s.term));
    return e.name + "[" + e.labels.at(s.part) + "] term " + DiffPoly::monomial(p.ring(), it->first, it->second).str();
}

}  // namespace kdvw
