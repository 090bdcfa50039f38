#include "kdvw/hierarchy.hpp"

#include <mutex>

#include "kdvw/coords.hpp"
#include "kdvw/error.hpp"
#include "kdvw/rings.hpp"

namespace kdvw {

namespace {

const Ring& T() { return tau_ring(); }

Key tau_jet(const char* fam, std::vector<int> alpha) {
    alpha.resize(T().coords().size(), 0);
    return T().key(T().family(fam), alpha);
}

DiffPoly var_of(const Ring& r, Key k, int e = 1) { return DiffPoly::monomial(&r, Monomial::single(k, e)); }

// Replace v^(n) by u^(n+1).
DiffPoly v_to_ux(const DiffPoly& p) {
    std::map<Key, DiffPoly> sub;
    const int u = T().family("u");
    for (const Key k : p.keys())
        if (key_family(k) == T().family("v")) sub.emplace(k, var_of(T(), T().key(u, key_order(k) + 1)));
    return substitute(p, sub);
}

Key flow_key_of(const DiffPoly& relation, int coord) {
    for (const Key k : relation.keys()) {
        const Family& f = relation.ring()->fam(key_family(k));
        if (f.kind == Kind::Jet && key_index(k, coord) == 1 && key_order(k) == 0 && relation.max_exp(k) == 1)
            return k;
    }
    fail("InvalidSpec", "relation has no first-order flow symbol");
}

}  // namespace

DiffPoly lenard(int k) {
    if (k < 0 || k > kLenardDepth) fail("RangeError", "Lenard index beyond configured depth");
    static std::mutex mu;
    static std::vector<DiffPoly> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (cache.empty()) cache.push_back(tau("v"));
    while (static_cast<int>(cache.size()) <= k) {
        const DiffPoly& r = cache.back();
        const DiffPoly v = tau("v");
        const DiffPoly step = Scalar::frac(1, 4) * derive(r, 0, 3) + Scalar(2) * v * derive(r, 0) + derive(v, 0) * r;
        cache.push_back(integrate_total(step));
    }
    return cache[static_cast<size_t>(k)];
}

DiffPoly lenard_step(int k) {
    const DiffPoly r = lenard(k), v = tau("v");
    return Scalar::frac(1, 4) * derive(r, 0, 3) + Scalar(2) * v * derive(r, 0) + derive(v, 0) * r;
}

DiffPoly kdv_rhs(int k) { return derive(lenard(k), 0); }
DiffPoly pkdv_rhs(int k) { return v_to_ux(lenard(k)); }

EquationSystem kdv_system(int kmax) {
    std::vector<FlowEquation> eqs;
    for (int k = 1; k <= kmax; ++k) {
        std::vector<int> a(4, 0);
        a[static_cast<size_t>(k)] = 1;
        eqs.push_back({tau_jet("v", a), kdv_rhs(k)});
    }
    return EquationSystem(eqs);
}

EquationSystem pkdv_system(int kmax) {
    std::vector<FlowEquation> eqs;
    for (int k = 1; k <= kmax; ++k) {
        std::vector<int> a(4, 0);
        a[static_cast<size_t>(k)] = 1;
        eqs.push_back({tau_jet("u", a), pkdv_rhs(k)});
    }
    return EquationSystem(eqs);
}

Certificate kdv_matches(int k, const Registry& reg) {
    const std::string name = "kdv" + std::to_string(k);
    const NamedEquation& e = reg.at(name);
    std::vector<int> a(4, 0);
    a[static_cast<size_t>(k)] = 1;
    Certificate c = exact_match("D1 R_" + std::to_string(2 * k + 1) + " equals " + name, kdv_rhs(k), e.rhs(), {name});
    if (e.flow != tau_jet("v", a)) {
        c.pass = false;
        c.detail = "flow symbol differs";
    }
    return c;
}

Certificate pkdv_matches(int k, const Registry& reg) {
    const std::string name = "pkdv" + std::to_string(k);
    const NamedEquation& e = reg.at(name);
    std::vector<int> a(4, 0);
    a[static_cast<size_t>(k)] = 1;
    Certificate c = exact_match("R_" + std::to_string(2 * k + 1) + "[u'] equals " + name, pkdv_rhs(k), e.rhs(), {name});
    if (e.flow != tau_jet("u", a)) {
        c.pass = false;
        c.detail = "flow symbol differs";
    }
    return c;
}

std::vector<Certificate> lenard_closure(int depth) {
    std::vector<Certificate> out;
    const Key v = tau_jet("v", {});
    for (int k = 0; k < depth; ++k) {
        Certificate c = zero_certificate("Lenard step " + std::to_string(k) + " is a total derivative",
                                         euler_derivative(lenard_step(k), v));
        try {
            lenard(k + 1);
        } catch (const Error& e) {
            c.pass = false;
            c.detail = e.what();
        }
        out.push_back(c);
    }
    return out;
}

Certificate flows_commute() {
    const EquationSystem sys = kdv_system(2);
    const DiffPoly d35 = derive(kdv_rhs(2), 1), d53 = derive(kdv_rhs(1), 2);
    return zero_certificate("t3 and t5 flows commute", reduce_on_shell(d35 - d53, sys));
}

DiffPoly mkdv_flux(int n) {
    if (n < 0 || n > 4) fail("RangeError", "mKdV recursion index out of range");
    static std::mutex mu;
    static std::vector<DiffPoly> cache;
    std::lock_guard<std::mutex> lock(mu);
    const DiffPoly q = mk("q");
    if (cache.empty()) cache.push_back(derive(q, 0));
    while (static_cast<int>(cache.size()) <= n) {
        const DiffPoly& K = cache.back();
        cache.push_back(derive(K, 0, 2) - Scalar(4) * q * q * K -
                        Scalar(4) * derive(q, 0) * integrate_total(q * K));
    }
    return cache[static_cast<size_t>(n)];
}

DiffPoly mkdv_gradient(int n) { return integrate_total(mkdv_flux(n)); }

Certificate mkdv_matches(int k, const Registry& reg) {
    const std::string name = "mKdV" + std::to_string(k);
    const NamedEquation& e = reg.at(name);
    const Ring& M = mkdv_ring();
    const Key top = M.key(M.family("q"), 2 * k + 1);
    Certificate c = multiple_match(name + " is a multiple of K_" + std::to_string(k), mkdv_flux(k), e.rhs(), top, {name});
    std::vector<int> a(3, 0);
    a[static_cast<size_t>(k)] = 1;
    if (e.flow != M.key(M.family("q"), a)) {
        c.pass = false;
        c.detail = "flow symbol differs";
    }
    return c;
}

Certificate pii3_matches(const Registry& reg) {
    const Ring& M = mkdv_ring();
    const DiffPoly printed = reg.at("PII3").residual();
    const DiffPoly G3 = mkdv_gradient(3);
    const Key q6 = M.key(M.family("q"), 6);
    const DiffPoly top = G3.coeff(q6, 1), ptop = printed.coeff(q6, 1);
    const Scalar a3 = ptop.is_constant() && top.is_constant() ? ptop.constant_term() / top.constant_term() : Scalar(0);
    const DiffPoly built = -(mk("x0") * mkdv_gradient(0)) + mk("x1") * mkdv_gradient(1) +
                           mk("x2") * mkdv_gradient(2) + G3 * a3 + DiffPoly(&M, Scalar::frac(1, 2));
    Certificate c = zero_certificate("PII3 = -x0 G0 + x1 G1 + x2 G2 + a3 G3 + 1/2", printed - built, {"PII3"});
    c.multiplier = a3.str();
    if (a3.is_zero()) c.pass = false;
    return c;
}

DiffPoly pii3_residual(const std::map<Key, DiffPoly>& assignment, const Registry& reg) {
    const DiffPoly e = reg.at("PII3").residual();
    for (const Key k : e.keys())
        if (!assignment.count(k)) fail("MissingSymbol", "PII3 symbol " + mkdv_ring().key_name(k) + " not assigned");
    return substitute(e, assignment);
}

DiffPoly pii3_residual_for(const DiffPoly& q_of_x, const Registry& reg) {
    const Ring& M = mkdv_ring();
    const DiffPoly e = reg.at("PII3").residual();
    std::map<Key, DiffPoly> a;
    for (const Key k : e.keys()) {
        if (key_family(k) == M.family("q")) a.emplace(k, derive_alpha(q_of_x, key_alpha(M, k)));
        else a.emplace(k, var_of(M, k));
    }
    return pii3_residual(a, reg);
}

MiuraCoefficient miura_coefficient(const Registry& reg) {
    const Ring& M = mkdv_ring();
    const DiffPoly rhs = reg.at("mKdV1").rhs();
    const Key q0 = M.key(M.family("q"), 0), q1 = M.key(M.family("q"), 1), q3 = M.key(M.family("q"), 3);
    const DiffPoly alpha = rhs.coeff(q0, 2).coeff(q1, 1), beta = rhs.coeff(q3, 1);
    if (!alpha.is_constant() || !beta.is_constant() || !alpha.constant_term().is_rational() ||
        !beta.constant_term().is_rational())
        fail("InvalidSpec", "mKdV1 coefficients are not rational constants");
    const XScaleSurd s = x_scale_surd();
    // q_{tau3} = (dx1/dtau3) q_{x1},  q_{x0} = q_{tau1} / (dx0/dtau1)
    MiuraCoefficient m;
    m.coefficient = Surd(alpha.constant_term().a()) * s.d1 / s.d0;
    const Surd third = Surd(beta.constant_term().a()) * s.d1 / s.d0.pow(3);
    m.third = third.rational();
    m.c_squared = (s.a * Surd::symbol("tau7", Rational(-1, 7))).pow(2);
    m.ratio = (m.coefficient / m.c_squared).rational();
    return m;
}

Certificate miura_verify(const Registry& reg, std::optional<Rational> ratio) {
    const MiuraCoefficient m = miura_coefficient(reg);
    const Rational r = ratio ? *ratio : m.ratio;
    const DiffPoly vt = tau("1/2*c*q_1 - 1/2*c^2*q_0^2");
    const DiffPoly qflow = DiffPoly(&T(), Scalar(r)) * tau("c^2*q_0^2*q_1") + DiffPoly(&T(), Scalar(m.third)) * tau("q_3");
    const EquationSystem sys({{tau_jet("q", {0, 1}), qflow}});
    const DiffPoly res = reduce_on_shell(substitute_family(reg.at("kdv1").residual(), T().family("v"), vt), sys);
    Certificate c = zero_certificate("(c/2)q' - (c^2/2)q^2 solves kdv1 when q_t3 = " + qflow.str(), res,
                                     {"kdv1", "mKdV1"});
    c.multiplier = Scalar(r).str();
    return c;
}

std::map<Key, DiffPoly> handy_rules(const DiffPoly& expr, const std::optional<Scalar>& factor, const Registry& reg) {
    const Ring& P = pi_ring();
    const int h = P.family("h");
    DiffPoly h0;
    if (factor) h0 = pi("y") * *factor;
    else h0 = solve_for(reg.at("handy").residual(), P.key(h, 1)).rhs;
    std::map<Key, DiffPoly> sub;
    std::optional<DiffPoly> h1;
    for (const Key k : expr.keys()) {
        if (key_family(k) != h) continue;
        std::vector<int> a = key_alpha(P, k);
        if (a[0] >= 1) {
            a[0] -= 1;
            sub.emplace(k, derive_alpha(h0, a));
        } else if (a[1] >= 1) {
            if (!h1) {
                // h_{t1} = D0^-1 (h_{t0})_{t1}, on shell with KdV
                const Key yt = P.key(P.family("y"), std::vector<int>{0, 1});
                const EquationSystem kdv({solve_for(reg.at("KdV").residual(), yt)});
                h1 = integrate_total(reduce_on_shell(derive(h0, 1), kdv));
            }
            a[1] -= 1;
            sub.emplace(k, derive_alpha(*h1, a));
        } else {
            fail("InvalidSpec", "undifferentiated h has no rule");
        }
    }
    return sub;
}

Certificate tilde_verify(Tilde which, const Registry& reg, const TildeOptions& opt) {
    const Ring& P = pi_ring();
    const SymbolicInverse& inv = symbolic_inverse();
    DiffPoly tilde;
    std::string target;
    if (which == Tilde::Y) {
        tilde = sym_scaled_tau7(2) * pi("y") - pi("1/7*s1") * sym_tau7_pow(-1);
        target = "kdv1";
    } else {
        tilde = sym_scaled_tau7(1) * pi("h") - pi("3/98*T3*s1^2") * sym_tau7_pow(-2) +
                pi("15/2744*s1^4") * sym_tau7_pow(-3) + pi("1/7*T1*s1") * sym_tau7_pow(-1);
        target = "pkdv1";
    }
    tilde *= opt.sign;
    const DiffPoly R = reg.at(target).residual();
    std::map<Key, DiffPoly> images;
    for (const Key k : R.keys()) {
        const std::vector<int> a = key_alpha(T(), k);
        if (a[2] || a[3]) fail("InvalidSpec", "target involves t5/t7 derivatives");
        DiffPoly d = tilde;
        for (int i = 0; i < a[0]; ++i) d = inv.d_tau1.apply(d);
        for (int i = 0; i < a[1]; ++i) d = inv.d_tau3.apply(d);
        images.emplace(k, d);
    }
    DiffPoly mapped = transplant(R, images, &P);
    std::vector<std::string> deps{target};
    const Key yt = P.key(P.family("y"), std::vector<int>{0, 1});
    const Key ht = P.key(P.family("h"), std::vector<int>{0, 1});
    if (which == Tilde::Y) {
        deps.push_back("KdV");
        mapped = reduce_on_shell(mapped, EquationSystem({solve_for(reg.at("KdV").residual(), yt)}));
    } else if (!opt.handy_route && !opt.handy_factor) {
        deps.push_back("pKdV");
        mapped = reduce_on_shell(mapped, EquationSystem({solve_for(reg.at("pKdV").residual(), ht)}));
    } else {
        if (!opt.handy_factor) deps.push_back("handy");
        deps.push_back("KdV");
        mapped = substitute(mapped, handy_rules(mapped, opt.handy_factor, reg));
        mapped = reduce_on_shell(mapped, EquationSystem({solve_for(reg.at("KdV").residual(), yt)}));
    }
    return zero_certificate(std::string(which == Tilde::Y ? "y~" : "h~") + " solves " + target, mapped, deps);
}

namespace {

// Divide out the monomial gcd (the constants are taken nonzero).
DiffPoly strip_content(const DiffPoly& p) {
    if (p.is_zero()) return p;
    std::map<Key, int> low;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        std::map<Key, int> here;
        for (const auto& x : m.f) here[x.key] = x.exp;
        if (first) {
            low = here;
            first = false;
            continue;
        }
        for (auto it = low.begin(); it != low.end();) {
            auto h = here.find(it->first);
            if (h == here.end()) {
                it = low.erase(it);
            } else {
                it->second = std::min(it->second, h->second);
                ++it;
            }
        }
    }
    DiffPoly out(p.ring());
    for (const auto& [m, c] : p.terms()) {
        Monomial q = m;
        for (const auto& [k, e] : low) q = q.with_exp(k, m.exponent(k) - e);
        out.add_term(q, c);
    }
    return out;
}

Surd eval_surd(const DiffPoly& p, const std::map<Key, Surd>& at) {
    Surd s;
    for (const auto& [m, c] : p.terms()) {
        if (!c.is_rational()) fail("DomainError", "constraint coefficient is not rational");
        Surd t(c.a());
        for (const auto& x : m.f) {
            auto it = at.find(x.key);
            if (it == at.end()) fail("MissingSymbol", "constant not assigned");
            if (x.exp < 0) fail("DomainError", "negative power in constraint");
            t = t * it->second.pow(x.exp);
        }
        s += t;
    }
    return s;
}

}  // namespace

ConstraintSet::Report ConstraintSet::check(const std::map<std::string, Surd>& assignment) const {
    const Ring& P = pi_ring();
    std::map<Key, Surd> at;
    for (const auto& n : vars) {
        auto it = assignment.find(n);
        if (it == assignment.end()) fail("MissingSymbol", "no value for " + n);
        at.emplace(P.key(P.family(n)), it->second);
    }
    Report r{{}, true};
    for (const auto& c : constraints) {
        r.values.push_back(eval_surd(c, at));
        if (!r.values.back().is_zero()) r.satisfied = false;
    }
    return r;
}

ConstraintSet rescale_constraints(const NamedEquation& source, const NamedEquation& target,
                                  const std::vector<std::string>& constants) {
    if (constants.size() != 3) fail("InvalidSpec", "rescaling needs three constants");
    const Ring& P = pi_ring();
    const DiffPoly src = source.residual();
    const Key sflow = flow_key_of(src, 1);
    const int sfam = key_family(sflow);
    const std::vector<DiffPoly> K{pi(constants[0]), pi(constants[1]), pi(constants[2])};

    const DiffPoly R = target.residual();
    const int tfam = key_family(target.flow);
    std::map<Key, DiffPoly> images;
    for (const Key k : R.keys()) {
        if (key_family(k) != tfam) fail("InvalidSpec", "target mixes families");
        const std::vector<int> a = key_alpha(T(), k);
        if (a[2] || a[3]) fail("InvalidSpec", "target involves t5/t7 derivatives");
        images.emplace(k, K[0] * K[1].pow(a[0]) * K[2].pow(a[1]) * var_of(P, P.key(sfam, std::vector<int>{a[0], a[1]})));
    }
    const EquationSystem sys({solve_for(src, sflow)});
    const DiffPoly mapped = reduce_on_shell(transplant(R, images, &P), sys);

    ConstraintSet cs;
    cs.vars = constants;
    std::set<Key> ck;
    for (const auto& k : K) ck.insert(*k.keys().begin());
    std::map<Monomial, DiffPoly, MonoLess> groups;
    for (const auto& [m, c] : mapped.terms()) {
        std::vector<Factor> jf, cf;
        for (const auto& x : m.f) (ck.count(x.key) ? cf : jf).push_back(x);
        auto it = groups.emplace(Monomial(jf), DiffPoly(&P)).first;
        it->second.add_term(Monomial(cf), c);
    }
    for (auto& [m, c] : groups) cs.raw.push_back(strip_content(c));

    // eliminate constants[2], constants[0], constants[1] in that order of preference
    const std::vector<Key> pref{*K[2].keys().begin(), *K[0].keys().begin(), *K[1].keys().begin()};
    std::map<Key, DiffPoly> sol;
    std::vector<Key> order;
    std::vector<DiffPoly> pending = cs.raw;
    while (true) {
        std::vector<DiffPoly> next;
        for (auto& p : pending) {
            DiffPoly q = strip_content(substitute(p, sol));
            if (q.is_zero()) continue;
            if (q.is_constant()) fail("NoConstraintClosure", "coefficient matching is inconsistent: " + q.str());
            next.push_back(q);
        }
        pending = next;
        if (pending.empty()) break;
        bool done = false;
        for (const Key x : pref) {
            if (sol.count(x)) continue;
            for (size_t i = 0; i < pending.size() && !done; ++i) {
                const DiffPoly& p = pending[i];
                if (p.max_exp(x) != 1) continue;
                const DiffPoly cx = p.coeff(x, 1);
                if (!cx.is_constant() || cx.is_zero()) continue;
                const DiffPoly val = solve_for(p, x).rhs;
                for (auto& [k, v] : sol) v = substitute(v, {{x, val}});
                sol.emplace(x, val);
                order.push_back(x);
                pending.erase(pending.begin() + static_cast<long>(i));
                done = true;
            }
            if (done) break;
        }
        if (!done) fail("NoConstraintClosure", "remaining constraints are not triangular");
    }
    for (const Key x : order) cs.constraints.push_back(var_of(P, x) - sol.at(x));

    const DiffPoly under = substitute(mapped, sol);
    cs.sufficient = under.is_zero() && !mapped.is_zero();
    cs.residual_under_constraints = under.is_zero() ? "0" : under.str();
    cs.necessary = !order.empty();
    for (const Key x : order) {
        std::map<Key, DiffPoly> partial_sol = sol;
        partial_sol.erase(x);
        if (substitute(mapped, partial_sol).is_zero()) cs.necessary = false;
    }
    return cs;
}

StationaryReport stationary_reduction_verify() {
    const EquationSystem sys = kdv_system(3);
    const DiffPoly t5 = tau("tau5"), t7 = tau("tau7");
    const DiffPoly E = derive(Scalar(5) * t5 * lenard(2) + Scalar(7) * t7 * lenard(3), 0);
    const DiffPoly flows = Scalar(5) * t5 * tau("v_t5") + Scalar(7) * t7 * tau("v_t7");
    const DiffPoly H = t5 * tau("v_t5") + Scalar::frac(7, 5) * t7 * tau("v_t7");
    StationaryReport r;
    r.as_flows = zero_certificate("D1(5 tau5 R5 + 7 tau7 R7) = 5 tau5 v_t5 + 7 tau7 v_t7 on shell",
                                  reduce_on_shell(E - flows, sys));
    r.with_constraint = zero_certificate("D1(5 tau5 R5 + 7 tau7 R7) - 5 (tau5 v_t5 + 7/5 tau7 v_t7) = 0 on shell",
                                         reduce_on_shell(E - Scalar(5) * H, sys));
    r.unconstrained_residual = flows.str();
    const DiffPoly zero(&T());
    r.at_zero = zero_certificate("tau5 = tau7 = 0 kills the expression",
                                 substitute(E, {{*t5.keys().begin(), zero}, {*t7.keys().begin(), zero}}));
    return r;
}

Certificate pkdv_to_kdv(const Registry& reg, std::optional<Scalar> handy_factor) {
    const Ring& P = pi_ring();
    std::vector<std::string> deps{"pKdV", "KdV"};
    if (!handy_factor) deps.push_back("handy");
    const DiffPoly d = derive(reg.at("pKdV").residual(), 0);
    const DiffPoly res = substitute(d, handy_rules(d, handy_factor, reg));
    const Key yt = P.key(P.family("y"), std::vector<int>{0, 1});
    Certificate c = multiple_match("d/dt0 pKdV with handy is a multiple of KdV", reg.at("KdV").residual(), res, yt, deps);
    if (c.multiplier != "2") c.pass = false;
    return c;
}

}  // namespace kdvw
