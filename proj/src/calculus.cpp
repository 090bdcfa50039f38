#include "kdvw/calculus.hpp"

#include <functional>

#include "kdvw/error.hpp"

namespace kdvw {

namespace {

const Ring& ring_of(const DiffPoly& p) {
    if (!p.ring()) fail("InvalidSpec", "polynomial without a ring");
    return *p.ring();
}

}  // namespace

DiffPoly derive(const DiffPoly& p, int c) {
    if (p.is_zero() || p.is_constant()) return DiffPoly(p.ring());
    const Ring& r = ring_of(p);
    if (c < 0 || c >= static_cast<int>(r.coords().size())) fail("UnknownDerivation", std::to_string(c));
    DiffPoly out(&r);
    const Key step = key_step(c);
    for (const auto& [m, coef] : p.terms()) {
        for (const auto& x : m.f) {
            const Family& f = r.fam(key_family(x.key));
            if (f.kind == Kind::Constant) continue;
            Monomial rest = m.with_exp(x.key, x.exp - 1);
            Scalar ce = coef * Scalar(x.exp);
            if (f.kind == Kind::Jet) {
                if (key_index(x.key, c) == 255) fail("RangeError", "jet order overflow");
                Key nk = x.key + step;
                out.add_term(rest.with_exp(nk, rest.exponent(nk) + 1), ce);
            } else {
                auto it = f.images.find(c);
                if (it == f.images.end()) continue;
                for (const auto& [mi, ci] : it->second->terms()) out.add_term(rest.times(mi), ce * ci);
            }
        }
    }
    return out;
}

DiffPoly derive(const DiffPoly& p, const std::string& coord) {
    if (!p.ring()) return p;
    int c = p.ring()->coord(coord);
    if (c < 0) fail("UnknownDerivation", "derivation '" + coord + "' is not declared");
    return derive(p, c);
}

DiffPoly derive(const DiffPoly& p, int coord, int times) {
    DiffPoly q = p;
    for (int i = 0; i < times; ++i) q = derive(q, coord);
    return q;
}

DiffPoly partial(const DiffPoly& p, Key k) {
    DiffPoly out(p.ring());
    for (const auto& [m, coef] : p.terms()) {
        int e = m.exponent(k);
        if (e != 0) out.add_term(m.with_exp(k, e - 1), coef * Scalar(e));
    }
    return out;
}

DiffPoly VectorField::apply(const DiffPoly& p) const {
    if (p.is_constant()) return DiffPoly(p.ring());
    const Ring& r = ring_of(p);
    DiffPoly out(&r);
    for (const Key k : p.keys()) {
        const Family& f = r.fam(key_family(k));
        if (f.kind == Kind::Constant) continue;
        DiffPoly dk(&r);
        if (f.kind == Kind::Jet) {
            for (const auto& [c, coef] : comps)
                dk += coef * DiffPoly::monomial(&r, Monomial::single(k + key_step(c)));
        } else {
            auto it = ordinary.find(k);
            if (it != ordinary.end()) {
                dk = it->second;
            } else {
                for (const auto& [c, coef] : comps) {
                    auto im = f.images.find(c);
                    if (im != f.images.end()) dk += coef * *im->second;
                }
            }
        }
        if (!dk.is_zero()) out += partial(p, k) * dk;
    }
    return out;
}

DiffPoly euler_derivative(const DiffPoly& p, Key generator) {
    if (!p.ring()) return p;
    const Ring& r = *p.ring();
    if (r.fam(key_family(generator)).kind != Kind::Jet)
        fail("NotJetFamily", r.fam(key_family(generator)).name + " is not a jet generator");
    const Key g = key_generator(generator);
    int top = -1;
    for (const Key k : p.keys())
        if (key_generator(k) == g) top = std::max(top, key_order(k));
    DiffPoly out(&r);
    for (int n = 0; n <= top; ++n) {
        DiffPoly t = derive(partial(p, g + static_cast<Key>(n)), 0, n);
        if (n % 2) t = -t;
        out += t;
    }
    return out;
}

namespace {

// antiderivative of a polynomial in the single variable k
DiffPoly integrate_in(const DiffPoly& a, Key k) {
    DiffPoly out(a.ring());
    for (const auto& [m, coef] : a.terms()) {
        int e = m.exponent(k);
        if (e == -1) fail("NotExact", "logarithmic antiderivative");
        out.add_term(m.with_exp(k, e + 1), coef / Scalar(e + 1));
    }
    return out;
}

}  // namespace

DiffPoly integrate_total(const DiffPoly& p0) {
    if (p0.is_zero()) return p0;
    const Ring& r = ring_of(p0);
    std::set<Key> gens;
    for (const auto& [m, coef] : p0.terms()) {
        bool has_jet = false;
        for (const auto& x : m.f)
            if (r.fam(key_family(x.key)).kind == Kind::Jet) {
                has_jet = true;
                gens.insert(key_generator(x.key));
            }
        if (!has_jet) fail("NotExact", "jet-free term " + DiffPoly::monomial(&r, m, coef).str());
    }
    for (const Key g : gens) {
        DiffPoly e = euler_derivative(p0, g);
        if (!e.is_zero())
            fail("NotExact", "Euler derivative in " + r.key_name(g) + " is " + e.str());
    }
    DiffPoly p = p0, q(&r);
    for (int iter = 0; !p.is_zero(); ++iter) {
        if (iter > 100000) fail("NotExact", "integration by parts did not terminate");
        Key z = 0;
        int top = -1;
        for (const Key k : p.keys()) {
            if (r.fam(key_family(k)).kind != Kind::Jet) continue;
            int n = key_order(k);
            if (n > top || (n == top && k > z)) {
                top = n;
                z = k;
            }
        }
        if (top < 1 || p.max_exp(z) != 1) fail("NotExact", "residual " + p.str());
        DiffPoly a = p.coeff(z, 1);
        DiffPoly b = integrate_in(a, z - 1);
        q += b;
        p -= derive(b, 0);
        if (p.contains(z)) fail("NotExact", "residual " + p.str());
    }
    return q;
}

EquationSystem::EquationSystem(std::vector<FlowEquation> eqs) : eqs_(std::move(eqs)) {
    for (size_t i = 0; i < eqs_.size(); ++i) {
        Key k = eqs_[i].lhs;
        int units = 0, coord = -1;
        for (int c = 1; c < kMaxCoords; ++c) {
            int a = key_index(k, c);
            units += a;
            if (a) coord = c;
        }
        if (units != 1 || key_order(k) != 0 || coord < 0)
            fail("InvalidSpec", "flow symbol must be a first derivative in one non-spatial coordinate");
        for (size_t j = 0; j < i; ++j)
            if (eqs_[j].lhs == k) fail("InvalidSpec", "duplicate flow symbol");
    }
    for (const auto& e : eqs_)
        for (const Key k : e.rhs.keys())
            if (is_system_symbol(k))
                fail("NonTerminating", "right-hand side contains a flow symbol of the system");
}

bool EquationSystem::is_system_symbol(Key k) const {
    for (const auto& e : eqs_) {
        if (key_family(e.lhs) != key_family(k)) continue;
        bool ge = true;
        for (int c = 1; c < kMaxCoords; ++c)
            if (key_index(k, c) < key_index(e.lhs, c)) ge = false;
        if (ge) return true;
    }
    return false;
}

DiffPoly reduce_on_shell(const DiffPoly& p, const EquationSystem& eqs) {
    if (eqs.empty() || p.is_constant()) return p;
    std::map<Key, DiffPoly> memo;
    std::function<DiffPoly(Key, int)> value;
    std::function<DiffPoly(const DiffPoly&, int)> reduce;

    reduce = [&](const DiffPoly& q, int depth) -> DiffPoly {
        std::map<Key, DiffPoly> sub;
        for (const Key k : q.keys())
            if (eqs.is_system_symbol(k)) sub.emplace(k, value(k, depth + 1));
        return sub.empty() ? q : substitute(q, sub);
    };

    value = [&](Key k, int depth) -> DiffPoly {
        if (depth > 400) fail("NonTerminating", "on-shell reduction exceeded its depth guard");
        auto it = memo.find(k);
        if (it != memo.end()) return it->second;
        DiffPoly v;
        for (const auto& e : eqs.equations())
            if (e.lhs == k) v = e.rhs;
        if (!v.ring()) {
            // peel one derivative that keeps the parent a system symbol, spatial first
            int pc = -1;
            for (int c = 0; c < kMaxCoords && pc < 0; ++c) {
                if (key_index(k, c) == 0) continue;
                if (eqs.is_system_symbol(k - key_step(c))) pc = c;
            }
            if (pc < 0) fail("NonTerminating", "no parent flow symbol");
            v = reduce(derive(value(k - key_step(pc), depth + 1), pc), depth + 1);
        }
        memo.emplace(k, v);
        return v;
    };
    return reduce(p, 0);
}

DiffPoly substitute(const DiffPoly& p, const std::map<Key, DiffPoly>& sub) {
    if (sub.empty()) return p;
    const Ring* r = p.ring();
    for (const auto& [k, v] : sub)
        if (!r) r = v.ring();
    std::map<std::pair<Key, int>, DiffPoly> powers;
    auto power = [&](Key k, const DiffPoly& v, int e) -> const DiffPoly& {
        auto key = std::make_pair(k, e);
        auto it = powers.find(key);
        if (it != powers.end()) return it->second;
        DiffPoly pv = v.pow(e);
        pv.set_ring(r);
        return powers.emplace(key, std::move(pv)).first->second;
    };
    DiffPoly out(r);
    for (const auto& [m, coef] : p.terms()) {
        std::vector<Factor> keep;
        std::vector<const DiffPoly*> facs;
        for (const auto& x : m.f) {
            auto it = sub.find(x.key);
            if (it == sub.end())
                keep.push_back(x);
            else
                facs.push_back(&power(x.key, it->second, x.exp));
        }
        DiffPoly t = DiffPoly::monomial(r, Monomial(keep), coef);
        for (const DiffPoly* f : facs) {
            t = t * *f;
            if (t.is_zero()) break;
        }
        out += t;
    }
    return out;
}

std::vector<int> key_alpha(const Ring& r, Key k) {
    std::vector<int> a(r.coords().size());
    for (size_t c = 0; c < a.size(); ++c) a[c] = key_index(k, static_cast<int>(c));
    return a;
}

DiffPoly derive_alpha(const DiffPoly& p, const std::vector<int>& alpha) {
    DiffPoly q = p;
    for (size_t c = 0; c < alpha.size(); ++c) q = derive(q, static_cast<int>(c), alpha[c]);
    return q;
}

DiffPoly substitute_family(const DiffPoly& p, int fam, const DiffPoly& value) {
    if (!p.ring()) return p;
    std::map<Key, DiffPoly> sub;
    for (const Key k : p.keys())
        if (key_family(k) == fam) sub.emplace(k, derive_alpha(value, key_alpha(*p.ring(), k)));
    return substitute(p, sub);
}

DiffPoly transplant(const DiffPoly& p, const std::map<Key, DiffPoly>& sub, const Ring* target) {
    DiffPoly out(target);
    std::map<std::pair<Key, int>, DiffPoly> powers;
    for (const auto& [m, coef] : p.terms()) {
        DiffPoly t(target, coef);
        for (const auto& x : m.f) {
            auto it = sub.find(x.key);
            if (it == sub.end()) fail("MissingSymbol", "no image for " + p.ring()->key_name(x.key));
            auto pk = std::make_pair(x.key, x.exp);
            auto pw = powers.find(pk);
            if (pw == powers.end()) {
                DiffPoly v = it->second.pow(x.exp);
                v.set_ring(target);
                pw = powers.emplace(pk, std::move(v)).first;
            }
            t = t * pw->second;
        }
        out += t;
    }
    return out;
}

FlowEquation solve_for(const DiffPoly& relation, Key flow) {
    if (relation.max_exp(flow) != 1) fail("InvalidSpec", "relation is not linear in its flow symbol");
    DiffPoly c = relation.coeff(flow, 1);
    if (!c.is_constant() || c.is_zero()) fail("InvalidSpec", "flow coefficient is not a nonzero constant");
    DiffPoly rest = relation - c * DiffPoly::monomial(relation.ring(), Monomial::single(flow));
    return {flow, rest * (-c.constant_term().inverse())};
}

}  // namespace kdvw
