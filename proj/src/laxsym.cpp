#include "kdvw/laxsym.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "kdvw/error.hpp"
#include "kdvw/hierarchy.hpp"
#include "kdvw/rings.hpp"

namespace kdvw {

// ---- matrices ---------------------------------------------------------------

Mat2 Mat2::of(DiffPoly a, DiffPoly b, DiffPoly c, DiffPoly d) {
    const Ring* r = a.ring() ? a.ring() : b.ring() ? b.ring() : c.ring() ? c.ring() : d.ring();
    Mat2 m;
    m.e = {std::move(a), std::move(b), std::move(c), std::move(d)};
    for (auto& x : m.e)
        if (!x.ring()) x.set_ring(r);
    return m;
}

Mat2 Mat2::zero(const Ring* r) { return of(DiffPoly(r), DiffPoly(r), DiffPoly(r), DiffPoly(r)); }

Mat2 Mat2::identity(const Ring* r) { return constant(r, 1, 0, 0, 1); }

Mat2 Mat2::constant(const Ring* r, const Scalar& a, const Scalar& b, const Scalar& c, const Scalar& d) {
    return of(DiffPoly(r, a), DiffPoly(r, b), DiffPoly(r, c), DiffPoly(r, d));
}

Mat2 Mat2::map(const std::function<DiffPoly(const DiffPoly&)>& f) const {
    Mat2 m;
    for (size_t i = 0; i < 4; ++i) {
        m.e[i] = f(e[i]);
        if (!m.e[i].ring()) m.e[i].set_ring(e[i].ring());
    }
    return m;
}

bool Mat2::is_zero() const {
    for (const auto& x : e)
        if (!x.is_zero()) return false;
    return true;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 m;
    for (size_t i = 0; i < 4; ++i) m.e[i] = a.e[i] + b.e[i];
    return m;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 m;
    for (size_t i = 0; i < 4; ++i) m.e[i] = a.e[i] - b.e[i];
    return m;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.at(i, j) = a.at(i, 0) * b.at(0, j) + a.at(i, 1) * b.at(1, j);
    return m;
}

Mat2 operator*(const DiffPoly& s, const Mat2& a) {
    return a.map([&](const DiffPoly& x) { return s * x; });
}

Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

// ---- truncated series -------------------------------------------------------

DiffPoly truncate(const DiffPoly& p, Key var, int hi) {
    DiffPoly out(p.ring());
    for (const auto& [m, c] : p.terms())
        if (m.exponent(var) < hi) out.add_term(m, c);
    return out;
}

DiffPoly mul_trunc(const DiffPoly& a, const DiffPoly& b, Key var, int hi) {
    DiffPoly out(common_ring(a, b));
    std::vector<std::pair<int, const std::pair<const Monomial, Scalar>*>> bt;
    bt.reserve(b.size());
    for (const auto& t : b.terms()) bt.emplace_back(t.first.exponent(var), &t);
    for (const auto& [ma, ca] : a.terms()) {
        const int ea = ma.exponent(var);
        for (const auto& [eb, t] : bt)
            if (ea + eb < hi) out.add_term(ma.times(t->first), ca * t->second);
    }
    return out;
}

Mat2 mul_trunc(const Mat2& a, const Mat2& b, Key var, int hi) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m.at(i, j) = mul_trunc(a.at(i, 0), b.at(0, j), var, hi) + mul_trunc(a.at(i, 1), b.at(1, j), var, hi);
    return m;
}

Mat2 inverse_trunc(const Mat2& s, Key var, int hi) {
    const Ring* r = s.e[0].ring();
    const Mat2 one = Mat2::identity(r);
    const Mat2 e = s - one;
    for (const auto& x : e.e)
        for (const auto& [m, c] : x.terms())
            if (m.exponent(var) < 1) fail("InvalidSpec", "series inverse needs S = I + O(var)");
    Mat2 sum = one, term = one;
    for (int i = 1; i < hi; ++i) {
        term = mul_trunc(term, e, var, hi);
        term = Mat2::zero(r) - term;
        if (term.is_zero()) break;
        sum = sum + term;
    }
    return sum.map([&](const DiffPoly& x) { return truncate(x, var, hi); });
}

Mat2 coefficient(const Mat2& m, Key var, int p) {
    return m.map([&](const DiffPoly& x) {
        auto parts = x.by_power(var);
        auto it = parts.find(p);
        return it == parts.end() ? DiffPoly(x.ring()) : it->second;
    });
}

// ---- elimination ------------------------------------------------------------

DiffPoly Eliminator::apply(const DiffPoly& p) const {
    DiffPoly q = p;
    for (int pass = 0; pass < 64; ++pass) {
        bool hit = false;
        for (const Key k : q.keys())
            if (rules_.count(k)) {
                hit = true;
                break;
            }
        if (!hit) return q;
        q = substitute(q, rules_);
    }
    fail("InconsistentSystem", "elimination rules do not terminate");
}

Mat2 Eliminator::apply(const Mat2& m) const {
    return m.map([&](const DiffPoly& x) { return apply(x); });
}

Key Eliminator::absorb(const DiffPoly& relation) {
    const DiffPoly r = apply(relation);
    if (r.is_zero()) return 0;
    std::vector<std::pair<std::vector<int>, Key>> cand;
    for (const Key k : r.keys())
        if (auto p = prio_(k)) cand.emplace_back(*p, k);
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second > b.second;
    });
    for (const auto& [p, k] : cand) {
        if (r.max_exp(k) != 1) continue;
        const DiffPoly c = r.coeff(k, 1);
        if (!c.is_constant()) continue;
        const FlowEquation sol = solve_for(r, k);
        const std::map<Key, DiffPoly> one{{k, sol.rhs}};
        for (auto& [kk, v] : rules_)
            if (v.contains(k)) v = substitute(v, one);
        rules_[k] = sol.rhs;
        return k;
    }
    ++unresolved_;
    return 0;
}

namespace {

const Ring& T() { return tau_ring(); }
const Ring& P() { return pi_ring(); }

DiffPoly var_of(const Ring& r, Key k, int e = 1) { return DiffPoly::monomial(&r, Monomial::single(k, e)); }

DiffPoly power_of(const Ring& r, const char* name, int e) {
    return var_of(r, r.key(r.family(name)), e);
}

const Scalar kI = Scalar::i();

// N = [[1 - i, 1 + i], [-(1 - i), 1 + i]] / 2 and its inverse
Mat2 n_matrix(const Ring* r) {
    const Scalar h = Scalar::frac(1, 2);
    return Mat2::constant(r, h * (1 - kI), h * (1 + kI), -h * (1 - kI), h * (1 + kI));
}

Mat2 n_inverse(const Ring* r) {
    const Scalar h = Scalar::frac(1, 2);
    return Mat2::constant(r, h * (1 + kI), -h * (1 + kI), h * (1 - kI), h * (1 - kI));
}

Mat2 sigma3(const Ring* r) { return Mat2::constant(r, 1, 0, 0, -1); }

std::vector<int> flow_alpha(const Ring& r, int flow) {
    std::vector<int> a(r.coords().size(), 0);
    if (flow > 0) a.at(static_cast<size_t>((flow - 1) / 2)) = 1;
    return a;
}

// Replace u^(n+1) by v^(n) (spatial jets only).
DiffPoly u_to_v(const DiffPoly& p) {
    const int u = T().family("u"), v = T().family("v");
    std::map<Key, DiffPoly> sub;
    for (const Key k : p.keys()) {
        if (key_family(k) != u) continue;
        if (key_generator(k) != T().key(u, 0) || key_order(k) == 0)
            fail("InvalidSpec", "u jet " + T().key_name(k) + " has no v image");
        sub.emplace(k, var_of(T(), T().key(v, key_order(k) - 1)));
    }
    return substitute(p, sub);
}

std::string mat_residual(const Mat2& m) {
    std::string out;
    const char* names[] = {"11", "12", "21", "22"};
    for (size_t i = 0; i < 4; ++i) {
        if (m.e[i].is_zero()) continue;
        if (!out.empty()) out += "; ";
        out += std::string(names[i]) + ": " + m.e[i].str();
    }
    return out.empty() ? "0" : out;
}

Certificate mat_certificate(std::string claim, const Mat2& m, std::vector<std::string> deps) {
    Certificate c;
    c.claim = std::move(claim);
    c.deps = std::move(deps);
    c.pass = m.is_zero();
    c.residual = mat_residual(m);
    return c;
}

// a = m b for a scalar m
std::optional<Scalar> ratio(const DiffPoly& a, const DiffPoly& b) {
    if (b.is_zero()) return std::nullopt;
    const auto& [mono, cb] = *b.terms().begin();
    auto it = a.terms().find(mono);
    if (it == a.terms().end()) return std::nullopt;
    const Scalar m = it->second / cb;
    if (!(a - b * m).is_zero()) return std::nullopt;
    return m;
}

}  // namespace

Mat2 registry_matrix(const Registry& reg, const std::string& name) {
    const NamedEquation& e = reg.at(name);
    return Mat2::of(e.part("11"), e.part("12"), e.part("21"), e.part("22"));
}

Certificate collapse(std::string claim, const Mat2& m, Key var, const DiffPoly& target, Key top,
                     std::vector<std::string> deps) {
    Certificate c;
    c.claim = std::move(claim);
    c.deps = std::move(deps);
    const DiffPoly tt = target.coeff(top, 1);
    const char* names[] = {"11", "12", "21", "22"};
    const std::string vname = m.e[0].ring() ? m.e[0].ring()->key_name(var) : "z";
    std::vector<std::string> where;
    std::vector<Scalar> lambdas;
    c.pass = true;
    for (size_t i = 0; i < 4; ++i) {
        for (const auto& [p, coef] : m.e[i].by_power(var)) {
            if (coef.is_zero()) continue;
            const std::string loc = std::string("entry ") + names[i] + ", " + vname + "^" + std::to_string(p);
            const DiffPoly ct = coef.coeff(top, 1);
            std::optional<Scalar> lam;
            if (ct.is_constant() && !ct.is_zero() && tt.is_constant() && !tt.is_zero()) {
                const Scalar l = ct.constant_term() / tt.constant_term();
                if ((coef - target * l).is_zero()) lam = l;
            }
            if (!lam) {
                if (c.pass) {
                    c.residual = coef.str();
                    c.detail = "NonCollapsing at " + loc;
                }
                c.pass = false;
                continue;
            }
            where.push_back(loc);
            lambdas.push_back(*lam);
        }
    }
    if (where.empty() && c.pass) {
        c.pass = false;
        c.detail = "compatibility vanished identically";
    }
    std::string loc, mult;
    for (size_t i = 0; i < where.size(); ++i) {
        if (i) {
            loc += "; ";
            mult += "; ";
        }
        loc += where[i];
        mult += lambdas[i].str();
    }
    c.location = loc;
    if (!lambdas.empty()) c.multiplier = mult;
    return c;
}

// ---- zero curvature ---------------------------------------------------------

Mat2 lax_ansatz(int k) {
    switch (k) {
        case 1: return Mat2::of(tau("0"), tau("1"), tau("zeta + b0"), tau("0"));
        case 3: return Mat2::of(tau("b1"), tau("zeta + u_1"), tau("zeta^2 - u_1*zeta + b2"), tau("-b1"));
        case 5:
            return Mat2::of(tau("b1*zeta + b3"), tau("zeta^2 + u_1*zeta + b4"),
                            tau("zeta^3 - u_1*zeta^2 + (b2 + u_t3)*zeta + b6"), tau("-b1*zeta - b3"));
        case 7:
            return Mat2::of(tau("b1*zeta^2 + b3*zeta + b7"), tau("zeta^3 + u_1*zeta^2 + b4*zeta + b8"),
                            tau("zeta^4 - u_1*zeta^3 + (b2 + u_t3)*zeta^2 + (b6 + u_t5)*zeta + b10"),
                            tau("-b1*zeta^2 - b3*zeta - b7"));
        default: break;
    }
    fail("RangeError", "Lax ansatz exists for flows 1, 3, 5, 7");
}

namespace {

int b_family(int j) { return T().family("b" + std::to_string(j)); }

Mat2 substitute_bs(const Mat2& m, const std::map<int, DiffPoly>& b) {
    return m.map([&](const DiffPoly& x) {
        DiffPoly y = x;
        for (const auto& [j, val] : b) y = substitute_family(y, b_family(j), val);
        return y;
    });
}

// Solve for some b_j occurring only undifferentiated, linearly, with a constant coefficient.
bool solve_one(const DiffPoly& eq, int& j_out, DiffPoly& val) {
    for (int j = 0; j <= 10; ++j) {
        const int fam = b_family(j);
        const Key k0 = T().key(fam, 0);
        bool only_plain = eq.contains(k0);
        for (const Key k : eq.keys())
            if (key_family(k) == fam && k != k0) only_plain = false;
        if (!only_plain || eq.max_exp(k0) != 1 || !eq.coeff(k0, 1).is_constant()) continue;
        j_out = j;
        val = solve_for(eq, k0).rhs;
        return true;
    }
    return false;
}

bool has_b(const DiffPoly& p) {
    for (const Key k : p.keys()) {
        const std::string& n = T().fam(key_family(k)).name;
        if (n.size() >= 2 && n[0] == 'b') return true;
    }
    return false;
}

ZeroCurvature solve_flow(int k, const std::map<int, DiffPoly>& known, const std::vector<DiffPoly>& lower) {
    const Mat2 b1 = substitute_bs(lax_ansatz(1), known);
    const Mat2 bk = substitute_bs(lax_ansatz(k), known);
    const int ck = (k - 1) / 2;
    const Mat2 z = bk.map([](const DiffPoly& x) { return derive(x, 0); }) -
                   b1.map([&](const DiffPoly& x) { return derive(x, ck); }) - commutator(b1, bk);
    const Key zeta = T().key(T().family("zeta"));
    std::vector<DiffPoly> eqs;
    for (const auto& x : z.e)
        for (auto& [p, c] : x.by_power(zeta))
            if (!c.is_zero()) eqs.push_back(c);
    ZeroCurvature out;
    out.b = known;
    for (bool progress = true; progress;) {
        progress = false;
        for (const DiffPoly& eq : eqs) {
            int j;
            DiffPoly val;
            if (eq.is_zero() || !solve_one(eq, j, val)) continue;
            for (auto& e : eqs) e = substitute_family(e, b_family(j), val);
            for (auto& [jj, v] : out.b) v = substitute_family(v, b_family(j), val);
            out.b[j] = val;
            progress = true;
            break;
        }
    }
    for (const auto& e : eqs) {
        if (e.is_zero()) continue;
        if (has_b(e)) fail("InconsistentSystem", "unsolved coefficient left in " + e.str());
        out.leftovers.push_back(e);
    }
    // the new equation carries u_{t_k t1}; the others repeat the lower flows
    const Key top = T().key(T().family("u"), std::vector<int>{1, k == 3, k == 5, k == 7});
    for (const auto& e : out.leftovers)
        if (e.contains(top)) {
            out.scalar = e;
            break;
        }
    if (out.scalar.is_zero()) fail("InconsistentSystem", "no scalar equation for flow " + std::to_string(k));
    for (const auto& e : out.leftovers) {
        bool ok = static_cast<bool>(ratio(e, out.scalar));
        for (const auto& l : lower) ok = ok || ratio(e, l);
        if (!ok) fail("InconsistentSystem", "leftover equation " + e.str() + " is not a multiple of a flow equation");
    }
    out.B = substitute_bs(lax_ansatz(k), out.b);
    return out;
}

}  // namespace

const ZeroCurvature& zero_curvature(int k) {
    if (k != 3 && k != 5 && k != 7) fail("RangeError", "zero curvature for flows 3, 5, 7");
    static std::mutex mu;
    static std::map<int, ZeroCurvature> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (int f = 3; f <= k; f += 2) {
        if (cache.count(f)) continue;
        std::map<int, DiffPoly> known;
        std::vector<DiffPoly> lower;
        for (int g = 3; g < f; g += 2) lower.push_back(cache.at(g).scalar);
        if (f > 3) known = cache.at(f - 2).b;
        cache.emplace(f, solve_flow(f, known, lower));
    }
    return cache.at(k);
}

namespace {
const char* b_entry(int k) { return k == 3 ? "b012" : k == 5 ? "b346" : "b7810"; }
const char* proof_entry(int k) { return k == 3 ? "proofkdv1" : k == 5 ? "proofkdv2" : "proofkdv3"; }
}  // namespace

Certificate zero_curvature_b(int k, const Registry& reg) {
    const ZeroCurvature& zc = zero_curvature(k);
    const NamedEquation& e = reg.at(b_entry(k));
    Certificate c;
    c.claim = std::string("zero-curvature coefficients equal ") + b_entry(k);
    c.deps = {b_entry(k)};
    c.pass = true;
    c.residual = "0";
    for (size_t i = 0; i < e.labels.size(); ++i) {
        const int j = std::stoi(e.labels[i].substr(1));
        const DiffPoly d = zc.b.at(j) - e.parts[i];
        if (!d.is_zero()) {
            c.pass = false;
            c.residual = e.labels[i] + ": " + d.str();
            break;
        }
    }
    return c;
}

Certificate zero_curvature_scalar(int k, const Registry& reg) {
    const ZeroCurvature& zc = zero_curvature(k);
    const Key top = T().key(T().family("u"), std::vector<int>{1, k == 3, k == 5, k == 7});
    return multiple_match(std::string("zero-curvature scalar equation is a multiple of ") + proof_entry(k),
                          zc.scalar, reg.at(proof_entry(k)).residual(), top, {proof_entry(k)});
}

Certificate zero_curvature_kdv(int k) {
    const ZeroCurvature& zc = zero_curvature(k);
    const int n = (k - 1) / 2;
    DiffPoly s = zc.scalar;
    if (n > 1) s = reduce_on_shell(s, pkdv_system(n - 1));
    const Key top = T().key(T().family("u"), std::vector<int>{1, k == 3, k == 5, k == 7});
    const DiffPoly rhs = u_to_v(solve_for(s, top).rhs);
    return zero_certificate("zero-curvature equation " + std::to_string(n) + " on shell gives kdv flow",
                            rhs - kdv_rhs(n));
}

Mat2 cad_matrix(int k) {
    if (k < 1 || k > 3) fail("RangeError", "C, A, D for k = 1..3");
    const DiffPoly zeta = tau("zeta"), v = tau("v");
    auto zp = [&](int e) { return e == 0 ? DiffPoly(&T(), Scalar(1)) : zeta.pow(e); };
    auto L = [&](const DiffPoly& p) { return Scalar::frac(1, 2) * derive(p, 0, 2) + Scalar(2) * v * p; };
    DiffPoly C = zp(k);
    for (int j = 1; j <= k; ++j) C += zp(k - j) * lenard(j - 1);
    const DiffPoly A = Scalar::frac(1, 2) * derive(C, 0);
    DiffPoly D = zp(k + 1) - lenard(0) * zp(k);
    for (int j = 2; j <= k; ++j) D += (lenard(j - 1) - L(lenard(j - 2))) * zp(k + 1 - j);
    D -= L(lenard(k - 1));
    return Mat2::of(-A, C, D, A);
}

Certificate verify_CAD(int k) {
    const Mat2 cad = cad_matrix(k);
    const EquationSystem sys = pkdv_system(3);
    const Mat2 b = zero_curvature(2 * k + 1).B.map([&](const DiffPoly& x) { return u_to_v(reduce_on_shell(x, sys)); });
    return mat_certificate("B_" + std::to_string(2 * k + 1) + " has the C, A, D form", b - cad, {});
}

// ---- X-series ---------------------------------------------------------------

DiffPoly x_symbol(int j, int which, int flow) {
    if (j < 1 || j > kMaxXOrder) fail("RangeError", "X^(j) beyond the ring");
    const int fam = T().family(std::string(which ? "X12_" : "X11_") + std::to_string(j));
    return var_of(T(), T().key(fam, flow_alpha(T(), flow)));
}

DiffPoly u_alias(int flow) { return x_symbol(1, 0, flow) + kI * x_symbol(1, 1, flow); }

namespace {

Mat2 x_matrix(int j, int flow) {
    const DiffPoly a = x_symbol(j, 0, flow), b = x_symbol(j, 1, flow);
    if (j % 2) return Mat2::of(a, b, b, -a);
    return Mat2::of(a, b, -b, a);
}

std::optional<std::vector<int>> x_priority(Key k) {
    const std::string& n = T().fam(key_family(k)).name;
    if (n.rfind("X1", 0) != 0) return std::nullopt;
    const int which = n[2] == '2';
    const int j = std::stoi(n.substr(4));
    const std::vector<int> a = key_alpha(T(), k);
    int flow = 0;
    for (size_t c = 0; c < a.size(); ++c)
        if (a[c]) flow = 2 * static_cast<int>(c) + 1;
    if (flow) return std::vector<int>{3, j, flow, which};
    if (!which && j % 2 == 0) return std::vector<int>{2, j, 0, 0};
    return std::vector<int>{1, j, which, 0};
}

XSeries build_x_series(int depth) {
    const Ring* r = &T();
    const Key w = T().key(T().family("w"));
    const int n = depth + 1;
    XSeries xs;
    xs.depth = depth;
    xs.elim = Eliminator(x_priority);
    Mat2 s = Mat2::identity(r);
    for (int j = 1; j <= depth; ++j) s = s + power_of(T(), "w", j) * x_matrix(j, 0);
    const Mat2 si = inverse_trunc(s, w, n);
    const Mat2 t = mul_trunc(s * sigma3(r), si, w, n);
    const Mat2 N = n_matrix(r), Ni = n_inverse(r);
    const DiffPoly g = Scalar(-2) * kI * x_symbol(1, 1);
    const Mat2 A = Mat2::of(tau("1"), tau("0"), g, tau("1")), Ai = Mat2::of(tau("1"), tau("0"), -g, tau("1"));
    for (int f : {1, 3, 5, 7}) {
        const int k = (f - 1) / 2;
        Mat2 ds = Mat2::zero(r);
        for (int j = 1; j <= depth; ++j) ds = ds + power_of(T(), "w", j) * x_matrix(j, f);
        const Mat2 m = mul_trunc(ds, si, w, n) - power_of(T(), "w", -(2 * k + 1)) * t;
        Mat2 c = N * m * Ni;
        c.at(0, 1) = c.at(0, 1) * power_of(T(), "w", 1);
        c.at(1, 0) = c.at(1, 0) * power_of(T(), "w", -1);
        Mat2 b = A * c * Ai;
        b.at(1, 0) -= Scalar(2) * kI * x_symbol(1, 1, f);
        xs.B.emplace(f, b);
        std::vector<DiffPoly> rel;
        for (int zp = 1; zp <= 2; ++zp) {
            if (2 * zp + 2 * k + 2 >= n) continue;
            const Mat2 co = coefficient(b, w, 2 * zp);
            for (const auto& x : co.e)
                if (!x.is_zero()) rel.push_back(x);
        }
        xs.relations.emplace_back(f, rel);
    }
    const auto det = s.det().by_power(w);
    std::vector<DiffPoly> drel;
    for (int m = 2; m < n; m += 2) {
        auto it = det.find(m);
        if (it != det.end() && !it->second.is_zero()) drel.push_back(it->second);
    }
    xs.relations.emplace_back(0, drel);
    for (const auto& [f, rel] : xs.relations)
        for (const auto& x : rel) xs.elim.absorb(x);
    auto read = [&](int f, int i, int j, int p) { return xs.elim.apply(coefficient(xs.B.at(f), w, p).at(i, j)); };
    xs.b[0] = read(1, 1, 0, 0);
    xs.b[1] = read(3, 0, 0, 0);
    xs.b[2] = read(3, 1, 0, 0);
    xs.b[3] = read(5, 0, 0, 0);
    xs.b[4] = read(5, 0, 1, 0);
    xs.b[5] = read(5, 1, 0, -2);
    xs.b[6] = read(5, 1, 0, 0);
    xs.b[7] = read(7, 0, 0, 0);
    xs.b[8] = read(7, 0, 1, 0);
    xs.b[10] = read(7, 1, 0, 0);
    return xs;
}

}  // namespace

const XSeries& x_series(int depth) {
    if (depth < 2) fail("TruncationTooShallow", "X-series needs at least two terms");
    if (depth > kMaxXOrder) fail("RangeError", "X-series deeper than the ring");
    static std::mutex mu;
    static std::map<int, XSeries> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(depth);
    if (it == cache.end()) it = cache.emplace(depth, build_x_series(depth)).first;
    return it->second;
}

std::vector<DiffPoly> series_relations(int flow, int depth) {
    if (flow != 1 && flow != 3 && flow != 5 && flow != 7) fail("RangeError", "flows are 1, 3, 5, 7");
    const XSeries& xs = x_series(depth);
    Eliminator before(x_priority);
    std::vector<DiffPoly> out;
    for (const auto& [f, rel] : xs.relations) {
        const bool mine = f == flow || (flow == 1 && f == 0);
        for (const auto& x : rel) {
            if (mine) {
                const DiffPoly r = before.apply(x);
                if (!r.is_zero()) out.push_back(r);
            }
            before.absorb(x);
        }
    }
    if (out.empty()) fail("TruncationTooShallow", "no relation survives at this depth for flow " + std::to_string(flow));
    return out;
}

namespace {

DiffPoly with_alias(const DiffPoly& p) { return substitute_family(p, T().family("u"), u_alias()); }

DiffPoly with_bs(const DiffPoly& p, const XSeries& xs) {
    std::map<Key, DiffPoly> sub;
    for (const Key k : p.keys()) {
        const std::string& n = T().fam(key_family(k)).name;
        if (n.size() < 2 || n[0] != 'b') continue;
        const int j = std::stoi(n.substr(1));
        if (k != T().key(key_family(k), 0) || !xs.b.count(j))
            fail("InvalidSpec", "no series value for " + T().key_name(k));
        sub.emplace(k, xs.b.at(j));
    }
    return substitute(p, sub);
}

}  // namespace

Certificate series_identity(int which, const Registry& reg) {
    if (which < 1 || which > 3) fail("RangeError", "identities 1..3");
    const XSeries& xs = x_series();
    const DiffPoly e = reg.at("ApppKdV").part(std::to_string(which));
    return zero_certificate("b-identity " + std::to_string(which) + " holds on the X-series",
                            xs.elim.apply(with_alias(with_bs(e, xs))), {"ApppKdV"});
}

std::vector<Certificate> series_formulas(const std::string& entry, const Registry& reg) {
    const XSeries& xs = x_series();
    const NamedEquation& e = reg.at(entry);
    std::vector<Certificate> out;
    for (size_t i = 0; i < e.labels.size(); ++i) {
        const Key k = T().parse_key(e.labels[i]);
        const std::string& fam = T().fam(key_family(k)).name;
        DiffPoly derived;
        if (fam == "u")
            derived = derive_alpha(u_alias(), key_alpha(T(), k));
        else if (fam[0] == 'b')
            derived = xs.b.at(std::stoi(fam.substr(1)));
        else
            derived = var_of(T(), k);
        out.push_back(zero_certificate(entry + " " + e.labels[i] + " agrees with the X-series",
                                       xs.elim.apply(derived - with_alias(e.parts[i])), {entry}));
    }
    return out;
}

Certificate uv_consistency(const Registry& reg, bool drop_x2) {
    const XSeries& xs = x_series();
    const DiffPoly u = reg.at("uvsX").part("u");
    DiffPoly v = reg.at("vvsX").part("v");
    if (drop_x2) {
        const Key x2 = x_symbol(2, 1).terms().begin()->first.f[0].key;
        v = v - v.coeff(x2, 1) * var_of(T(), x2);
    }
    return zero_certificate(std::string("v = d_t1 u on the X-series") + (drop_x2 ? " (X12_2 dropped)" : ""),
                            xs.elim.apply(derive(u, 0) - v), {"uvsX", "vvsX"});
}

Certificate series_det() {
    const XSeries& xs = x_series();
    const Key w = T().key(T().family("w"));
    Mat2 s = Mat2::identity(&T());
    for (int j = 1; j <= xs.depth; ++j) s = s + power_of(T(), "w", j) * x_matrix(j, 0);
    const DiffPoly d = truncate(s.det(), w, xs.depth + 1) - tau("1");
    return zero_certificate("det S = 1 up to the truncation", xs.elim.apply(d));
}

// ---- Lax system in the PI ring ------------------------------------------------

namespace {

Key pi_key(const char* fam, int a0 = 0, int a1 = 0) { return P().key(P().family(fam), std::vector<int>{a0, a1}); }

Mat2 phi_matrix(int j) {
    const DiffPoly h = pi("h"), y = pi("y");
    if (j == 1) return Mat2::of(-h, pi("0"), pi("0"), h);
    if (j == 2) {
        const DiffPoly hh = Scalar::frac(1, 2) * h * h;
        return Mat2::of(hh, Scalar::frac(1, 2) * kI * y, Scalar::frac(-1, 2) * kI * y, hh);
    }
    if (j % 2) {
        const std::string k = std::to_string((j - 1) / 2);
        const DiffPoly q = pi("q" + k), r = pi("r" + k);
        return Mat2::of(q, kI * r, kI * r, -q);
    }
    const std::string k = std::to_string((j - 2) / 2);
    const DiffPoly v = pi("v" + k), w = pi("w" + k);
    return Mat2::of(v, kI * w, -kI * w, v);
}

// position of an unknown Phi family: (k, letter) or nullopt
std::optional<std::pair<int, int>> phi_family(const std::string& n) {
    if (n.size() < 2) return std::nullopt;
    const std::string letters = "qrvw";
    const auto l = letters.find(n[0]);
    if (l == std::string::npos) return std::nullopt;
    for (size_t i = 1; i < n.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(n[i]))) return std::nullopt;
    return std::make_pair(std::stoi(n.substr(1)), static_cast<int>(l));
}

std::optional<std::vector<int>> pi_priority(Key k) {
    const std::string& n = P().fam(key_family(k)).name;
    const std::vector<int> a = key_alpha(P(), k);
    if (n == "h") {
        if (a[0] == 0 && a[1] == 0) return std::nullopt;
        return std::vector<int>{1, a[0] + a[1], a[0], a[1], 0, 0};
    }
    if (auto f = phi_family(n)) return std::vector<int>{2, f->first, a[0] + a[1], a[0], a[1], f->second};
    return std::nullopt;
}

Mat2 phi_series(int depth) {
    Mat2 s = Mat2::identity(&P());
    for (int j = 1; j <= depth; ++j) s = s + power_of(P(), "s", j) * phi_matrix(j);
    return s;
}

Mat2 conjugate_n(const Mat2& m) {
    Mat2 c = n_matrix(&P()) * m * n_inverse(&P());
    c.at(0, 1) = c.at(0, 1) * power_of(P(), "s", 1);
    c.at(1, 0) = c.at(1, 0) * power_of(P(), "s", -1);
    return c;
}

// z-Lax matrix from the series, truncated at hi (before adding the constant part)
Mat2 z_lax(const Mat2& s, const Mat2& si, int n, std::optional<int> cap) {
    const Key sk = P().key(P().family("s"));
    const Mat2 ds = s.map([&](const DiffPoly& x) { return pi("-1/2*s^3") * partial(x, sk); });
    const DiffPoly thp = pi("s^-5 + t1*s^-1 - t0*s");
    Mat2 m = mul_trunc(ds, si, sk, n + 2) - thp * mul_trunc(s * sigma3(&P()), si, sk, n);
    if (cap) m = m.map([&](const DiffPoly& x) { return truncate(x, sk, *cap); });
    return conjugate_n(m) + pi("1/4*s^2") * Mat2::constant(&P(), -1, 0, 0, 1);
}

// nonpositive powers s^(-2m) -> z^m
Mat2 to_z(const Mat2& m, const Eliminator& el) {
    const Key sk = P().key(P().family("s"));
    return m.map([&](const DiffPoly& x) {
        DiffPoly out(&P());
        for (const auto& [p, c] : x.by_power(sk)) {
            if (p > 0 || c.is_zero()) continue;
            if (p % 2) fail("InvalidSpec", "odd power of z^(1/2) in a Lax matrix");
            out += c * (p == 0 ? pi("1") : pi("z").pow(-p / 2));
        }
        return el.apply(out);
    });
}

PiLax build_pi_lax(int depth) {
    const Key sk = P().key(P().family("s"));
    const int n = depth + 1;
    PiLax L;
    L.depth = depth;
    L.elim = Eliminator(pi_priority);
    const Mat2 s = phi_series(depth);
    const Mat2 si = inverse_trunc(s, sk, n);
    const Mat2 g = mul_trunc(s * sigma3(&P()), si, sk, n);
    auto lax = [&](int coord, const DiffPoly& thp) {
        const Mat2 ds = s.map([&](const DiffPoly& x) { return derive(x, coord); });
        return conjugate_n(mul_trunc(ds, si, sk, n) - thp * g);
    };
    L.Ws = lax(0, pi("-2*s^-1"));
    L.Vs = lax(1, pi("2/3*s^-3"));
    L.Us = z_lax(s, si, n, std::nullopt);
    std::vector<DiffPoly> rel;
    for (const auto& [m, valid] : {std::make_pair(&L.Ws, n - 2), std::make_pair(&L.Vs, n - 4), std::make_pair(&L.Us, n - 6)})
        for (const auto& x : m->e) {
            const auto parts = x.by_power(sk);
            for (int p = 1; p < valid; ++p) {
                auto it = parts.find(p);
                if (it != parts.end() && !it->second.is_zero()) rel.push_back(it->second);
            }
        }
    const auto det = s.det().by_power(sk);
    for (int m = 1; m < n; ++m) {
        auto it = det.find(m);
        if (it != det.end() && !it->second.is_zero()) rel.push_back(it->second);
    }
    const size_t base = rel.size();
    for (size_t i = 0; i < base; ++i) rel.push_back(derive(rel[i], 0));
    for (size_t i = base; i < 2 * base; ++i) rel.push_back(derive(rel[i], 0));
    for (const auto& x : rel) L.elim.absorb(x);
    L.W = to_z(L.Ws, L.elim);
    L.V = to_z(L.Vs, L.elim);
    L.U = to_z(L.Us, L.elim);
    // KdV from the compatibility of W and V
    const Mat2 zb = L.elim.apply(L.W.map([](const DiffPoly& x) { return derive(x, 1); }) -
                                 L.V.map([](const DiffPoly& x) { return derive(x, 0); }) + commutator(L.W, L.V));
    const Key yt = pi_key("y", 0, 1);
    for (const auto& x : zb.e) {
        for (const auto& [p, c] : x.by_power(P().key(P().family("z")))) {
            if (c.max_exp(yt) == 1 && c.coeff(yt, 1).is_constant()) {
                L.kdv = EquationSystem({solve_for(c, yt)});
                return L;
            }
        }
    }
    fail("NonCollapsing", "W, V compatibility has no y_t1 equation");
}

Mat2 d_coord(const Mat2& m, int c) {
    return m.map([&](const DiffPoly& x) { return derive(x, c); });
}

Mat2 d_z(const Mat2& m) {
    const Key z = P().key(P().family("z"));
    return m.map([&](const DiffPoly& x) { return partial(x, z); });
}

}  // namespace

const PiLax& pi_lax(int depth) {
    if (depth < 7) fail("TruncationTooShallow", "the PI Lax system needs Phi up to order 7");
    if (depth > kMaxPhiOrder) fail("RangeError", "Phi deeper than the ring");
    static std::mutex mu;
    static std::map<int, PiLax> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(depth);
    if (it == cache.end()) it = cache.emplace(depth, build_pi_lax(depth)).first;
    return it->second;
}

Certificate lax_handy(const Registry& reg) {
    const PiLax& L = pi_lax();
    const DiffPoly raw = coefficient(L.Ws, P().key(P().family("s")), 2).at(0, 1);
    Certificate c = multiple_match("s^2 term of W12 gives the handy relation", raw, reg.at("handy").residual(),
                                   pi_key("h", 1), {"handy"});
    if (c.pass) c.detail = "h_t0 = " + solve_for(raw, pi_key("h", 1)).rhs.str();
    return c;
}

Certificate lax_pkdv(const Registry& reg) {
    return zero_certificate("series rules for h_t0, h_t1 annihilate pKdV", pi_lax().elim.apply(reg.at("pKdV").residual()),
                            {"pKdV"});
}

Certificate lax_matches(const std::string& which, const Registry& reg) {
    const PiLax& L = pi_lax();
    const Mat2 reg_m = registry_matrix(reg, which);
    Mat2 d;
    if (which == "W")
        d = L.elim.apply(L.W - reg_m);
    else if (which == "V")
        d = L.elim.apply(L.V - reg_m);
    else if (which == "U")
        d = L.elim.apply(L.U - reg_m).map([&](const DiffPoly& x) { return reduce_on_shell(x, L.kdv); });
    else
        fail("RangeError", "Lax matrices are W, V, U");
    return mat_certificate("derived " + which + " equals the registered matrix", d, {which});
}

Certificate lax_kdv(const Registry& reg) {
    const PiLax& L = pi_lax();
    const Mat2 zb = L.elim.apply(d_coord(L.W, 1) - d_coord(L.V, 0) + commutator(L.W, L.V));
    return collapse("derived W, V compatibility is a multiple of KdV", zb, P().key(P().family("z")),
                    reg.at("KdV").residual(), pi_key("y", 0, 1), {"KdV"});
}

Certificate lax_pi2(const Registry& reg) {
    const PiLax& L = pi_lax();
    const Mat2 za = L.elim.apply(d_z(L.W) - d_coord(L.U, 0) + commutator(L.W, L.U))
                        .map([&](const DiffPoly& x) { return L.elim.apply(reduce_on_shell(x, L.kdv)); });
    return collapse("derived W, U compatibility is a multiple of PI2", za, P().key(P().family("z")),
                    reg.at("PI2").residual(), pi_key("y", 4), {"PI2"});
}

Certificate compat_a(const Registry& reg) {
    const Mat2 W = registry_matrix(reg, "W"), U = registry_matrix(reg, "U");
    const Mat2 z = (d_z(W) - d_coord(U, 0) + commutator(W, U)).map([&](const DiffPoly& x) {
        return substitute(x, handy_rules(x, std::nullopt, reg));
    });
    return collapse("dz W - dt0 U + [W, U] collapses to PI2", z, P().key(P().family("z")), reg.at("PI2").residual(),
                    pi_key("y", 4), {"W", "U", "PI2", "handy"});
}

Certificate compat_b(const Registry& reg) {
    const Mat2 W = registry_matrix(reg, "W"), V = registry_matrix(reg, "V");
    const int h = P().family("h");
    const DiffPoly ht1 = solve_for(reg.at("pKdV").residual(), pi_key("h", 0, 1)).rhs;
    const Mat2 z = (d_coord(W, 1) - d_coord(V, 0) + commutator(W, V)).map([&](const DiffPoly& x) {
        std::map<Key, DiffPoly> sub;
        for (const Key k : x.keys()) {
            if (key_family(k) != h) continue;
            std::vector<int> a = key_alpha(P(), k);
            if (a[1] == 0) continue;
            if (a[1] > 1) fail("InvalidSpec", "second t1 derivative of h");
            sub.emplace(k, derive_alpha(ht1, {a[0], 0}));
        }
        const DiffPoly y = substitute(x, sub);
        return substitute(y, handy_rules(y, std::nullopt, reg));
    });
    return collapse("dt1 W - dt0 V + [W, V] collapses to KdV", z, P().key(P().family("z")), reg.at("KdV").residual(),
                    pi_key("y", 0, 1), {"W", "V", "KdV", "handy", "pKdV"});
}

// ---- density ----------------------------------------------------------------

DensityExpansion density_expansion(const Registry& reg, int lowest, int depth) {
    if (lowest > 5) fail("RangeError", "density coefficients run from w^5 down");
    if (depth < 5 - lowest) fail("TruncationTooShallow", "Phi depth " + std::to_string(depth) + " cannot reach w^" + std::to_string(lowest));
    if (depth > kMaxPhiOrder) fail("RangeError", "Phi deeper than the ring");
    const Key sk = P().key(P().family("s")), wk = P().key(P().family("w")), ek = P().key(P().family("E"));
    const Key zk = P().key(P().family("z"));
    const int n = depth + 1;
    const Mat2 U = registry_matrix(reg, "U");

    // relations: the z-Lax matrix from the series equals the registered U
    auto prio = [](Key k) -> std::optional<std::vector<int>> {
        if (auto f = phi_family(P().fam(key_family(k)).name)) return std::vector<int>{2, f->first, f->second};
        return std::nullopt;
    };
    Eliminator el(prio);
    {
        const Mat2 s = phi_series(depth);
        const Mat2 si = inverse_trunc(s, sk, n);
        const Mat2 c = z_lax(s, si, n, n - 5);
        const Mat2 um = U.map([&](const DiffPoly& x) { return substitute(x, {{zk, pi("s^-2")}}); });
        const Mat2 dm = c - um;
        for (const auto& x : dm.e) {
            const auto parts = x.by_power(sk);
            for (int p = -8; p <= n - 6; ++p) {
                auto it = parts.find(p);
                if (it != parts.end() && !it->second.is_zero()) el.absorb(it->second);
            }
        }
        const auto det = s.det().by_power(sk);
        for (int m = 1; m < n; ++m) {
            auto it = det.find(m);
            if (it != det.end() && !it->second.is_zero()) el.absorb(it->second);
        }
    }

    // Phi_+ on the negative axis: z^(1/2) = i w, the exponential pulled out as E = exp(-2 theta)
    Mat2 sd = Mat2::identity(&P());
    for (int j = 1; j <= depth; ++j) sd = sd + (Scalar(-1) * kI).pow(j) * power_of(P(), "w", -j) * phi_matrix(j);
    const Mat2 ns = n_matrix(&P()) * sd;
    const DiffPoly E = pi("E");
    const DiffPoly f1 = E * ns.at(0, 0) + ns.at(0, 1), f2 = E * ns.at(1, 0) + ns.at(1, 1);
    const Mat2 uw = U.map([&](const DiffPoly& x) { return substitute(x, {{zk, pi("-w^2")}}); });
    const DiffPoly zh = kI * pi("w");
    const DiffPoly q = (uw.at(1, 0) * f1 * f1 * (Scalar(-1) * kI * pi("w^-1")) - Scalar(2) * uw.at(0, 0) * f1 * f2 -
                        uw.at(0, 1) * f2 * f2 * zh) *
                       pi("E^-1");
    DensityExpansion out;
    out.depth = depth;
    const auto by_w = q.by_power(wk);
    for (int p = 5; p >= lowest; --p) {
        auto it = by_w.find(p);
        const auto by_e = it == by_w.end() ? std::map<int, DiffPoly>{} : it->second.by_power(ek);
        for (int m = -1; m <= 1; ++m) {
            auto jt = by_e.find(m);
            DiffPoly c = jt == by_e.end() ? DiffPoly(&P()) : el.apply(jt->second);
            for (const Key k : c.keys())
                if (phi_family(P().fam(key_family(k)).name))
                    fail("UnknownSurvivor", "w^" + std::to_string(p) + " E^" + std::to_string(m) + ": " + c.str());
            out.coeff.emplace(std::make_pair(p, m), std::move(c));
        }
    }
    return out;
}

Certificate density_certificate(const Registry& reg) {
    const DensityExpansion d = density_expansion(reg);
    Certificate c;
    c.claim = "density expansion: 2i w^5 + 2i t1 w, everything else through w^0 vanishes";
    c.deps = {"U"};
    c.pass = true;
    std::string res;
    for (const auto& [pm, v] : d.coeff) {
        DiffPoly want(&P());
        if (pm == std::make_pair(5, 0)) want = DiffPoly(&P(), Scalar(2) * kI);
        if (pm == std::make_pair(1, 0)) want = Scalar(2) * kI * pi("t1");
        if (v != want) {
            c.pass = false;
            if (!res.empty()) res += "; ";
            res += "w^" + std::to_string(pm.first) + " E^" + std::to_string(pm.second) + ": " + (v - want).str();
        }
    }
    c.residual = res.empty() ? "0" : res;
    return c;
}

}  // namespace kdvw
