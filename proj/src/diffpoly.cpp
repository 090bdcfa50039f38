#include "kdvw/diffpoly.hpp"

#include <algorithm>
#include <cctype>

#include "kdvw/error.hpp"

namespace kdvw {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<Factor> fs) : f(std::move(fs)) {
    std::sort(f.begin(), f.end(), [](const Factor& a, const Factor& b) { return a.key < b.key; });
    std::vector<Factor> out;
    for (const auto& x : f) {
        if (!out.empty() && out.back().key == x.key)
            out.back().exp += x.exp;
        else
            out.push_back(x);
        if (out.back().exp == 0) out.pop_back();
    }
    f = std::move(out);
    deg = 0;
    for (const auto& x : f) deg += x.exp;
}

Monomial Monomial::single(Key k, int e) {
    Monomial m;
    if (e != 0) {
        m.f.push_back({k, e});
        m.deg = e;
    }
    return m;
}

int Monomial::exponent(Key k) const {
    auto it = std::lower_bound(f.begin(), f.end(), k, [](const Factor& a, Key b) { return a.key < b; });
    return (it != f.end() && it->key == k) ? it->exp : 0;
}

Monomial Monomial::times(const Monomial& o) const {
    Monomial r;
    r.f.reserve(f.size() + o.f.size());
    size_t i = 0, j = 0;
    while (i < f.size() || j < o.f.size()) {
        if (j == o.f.size() || (i < f.size() && f[i].key < o.f[j].key)) {
            r.f.push_back(f[i++]);
        } else if (i == f.size() || o.f[j].key < f[i].key) {
            r.f.push_back(o.f[j++]);
        } else {
            int e = f[i].exp + o.f[j].exp;
            if (e != 0) r.f.push_back({f[i].key, e});
            ++i;
            ++j;
        }
    }
    r.deg = deg + o.deg;
    return r;
}

Monomial Monomial::without(Key k) const { return with_exp(k, 0); }

Monomial Monomial::with_exp(Key k, int e) const {
    Monomial r;
    r.f.reserve(f.size() + 1);
    bool placed = false;
    for (const auto& x : f) {
        if (!placed && x.key >= k) {
            if (e != 0) r.f.push_back({k, e});
            placed = true;
            if (x.key == k) continue;
        }
        r.f.push_back(x);
    }
    if (!placed && e != 0) r.f.push_back({k, e});
    r.deg = 0;
    for (const auto& x : r.f) r.deg += x.exp;
    return r;
}

bool MonoLess::operator()(const Monomial& a, const Monomial& b) const {
    if (a.deg != b.deg) return a.deg < b.deg;
    size_t n = std::min(a.f.size(), b.f.size());
    for (size_t i = 0; i < n; ++i) {
        if (a.f[i].key != b.f[i].key) return a.f[i].key < b.f[i].key;
        if (a.f[i].exp != b.f[i].exp) return a.f[i].exp > b.f[i].exp;
    }
    return a.f.size() < b.f.size();
}

// -------------------------------------------------------------------- Ring

Ring::Ring(std::vector<std::string> coords) : coords_(std::move(coords)) {
    if (coords_.empty() || coords_.size() > static_cast<size_t>(kMaxCoords))
        fail("InvalidSpec", "a ring needs 1..7 coordinates");
}

int Ring::add(const std::string& name, Kind kind, bool compact, bool laurent) {
    if (by_name_.count(name)) fail("InvalidSpec", "duplicate generator " + name);
    if (fams_.size() >= 255) fail("InvalidSpec", "too many generator families");
    Family f;
    f.name = name;
    f.kind = kind;
    f.compact = compact;
    f.laurent = laurent;
    fams_.push_back(std::move(f));
    int id = static_cast<int>(fams_.size()) - 1;
    by_name_[name] = id;
    return id;
}

int Ring::add_jet(const std::string& name, bool compact, bool laurent) {
    return add(name, Kind::Jet, compact, laurent);
}
int Ring::add_ordinary(const std::string& name, bool laurent) {
    return add(name, Kind::Ordinary, false, laurent);
}
int Ring::add_constant(const std::string& name, bool laurent) {
    return add(name, Kind::Constant, false, laurent);
}

void Ring::set_image(int fam, const std::string& coord_name, const DiffPoly& img) {
    int c = coord(coord_name);
    if (c < 0) fail("UnknownDerivation", coord_name);
    auto& f = fams_.at(static_cast<size_t>(fam));
    if (f.kind != Kind::Ordinary) fail("InvalidSpec", "images only for ordinary generators");
    f.images[c] = std::make_shared<const DiffPoly>(img);
}

int Ring::coord(const std::string& name) const {
    for (size_t c = 0; c < coords_.size(); ++c)
        if (coords_[c] == name) return static_cast<int>(c);
    return -1;
}

int Ring::family(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) fail("MissingSymbol", name);
    return it->second;
}

bool Ring::has_family(const std::string& name) const { return by_name_.count(name) != 0; }

Key Ring::key(int fam, int order) const {
    if (order < 0 || order > 255) fail("RangeError", "jet order out of range");
    return (static_cast<Key>(fam) << 56) | static_cast<Key>(order);
}

Key Ring::key(int fam, const std::vector<int>& alpha) const {
    Key k = static_cast<Key>(fam) << 56;
    for (size_t c = 0; c < alpha.size(); ++c) {
        if (alpha[c] < 0 || alpha[c] > 255) fail("RangeError", "jet order out of range");
        k += key_step(static_cast<int>(c)) * static_cast<Key>(alpha[c]);
    }
    return k;
}

std::string Ring::key_name(Key k) const {
    const Family& f = fam(key_family(k));
    if (f.kind != Kind::Jet) return f.name;
    std::string tags;
    for (size_t c = 1; c < coords_.size(); ++c)
        for (int m = 0; m < key_index(k, static_cast<int>(c)); ++m) tags += coords_[c];
    int n = key_order(k);
    if (tags.empty()) {
        if (n == 0 && f.compact) return f.name;
        return f.name + "_" + std::to_string(n);
    }
    std::string s = f.name + "_" + tags;
    if (n > 0) s += "_" + std::to_string(n);
    return s;
}

namespace {

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

Key Ring::parse_key(const std::string& name) const {
    // longest family name that is a prefix and leaves a well-formed suffix
    int best = -1;
    Key best_key = 0;
    size_t best_len = 0;
    for (int id = 0; id < num_families(); ++id) {
        const Family& f = fams_[static_cast<size_t>(id)];
        if (name.compare(0, f.name.size(), f.name) != 0) continue;
        if (best >= 0 && f.name.size() <= best_len) continue;
        std::string r = name.substr(f.name.size());
        Key k = static_cast<Key>(id) << 56;
        bool ok = false;
        if (r.empty()) {
            ok = true;  // bare jet name is order 0
        } else if (f.kind == Kind::Jet && r[0] == '_') {
            std::string rest = r.substr(1);
            if (all_digits(rest)) {
                int n = std::stoi(rest);
                if (n <= 255) {
                    k += static_cast<Key>(n);
                    ok = true;
                }
            } else {
                size_t p = 0;
                bool any = false;
                ok = true;
                while (p < rest.size() && rest[p] != '_') {
                    size_t blen = 0;
                    int bc = -1;
                    for (size_t c = 1; c < coords_.size(); ++c) {
                        const auto& cn = coords_[c];
                        if (cn.size() > blen && rest.compare(p, cn.size(), cn) == 0) {
                            blen = cn.size();
                            bc = static_cast<int>(c);
                        }
                    }
                    if (bc < 0) {
                        ok = false;
                        break;
                    }
                    k += key_step(bc);
                    p += blen;
                    any = true;
                }
                if (ok && any && p < rest.size()) {
                    std::string ord = rest.substr(p + 1);
                    if (all_digits(ord) && std::stoi(ord) <= 255)
                        k += static_cast<Key>(std::stoi(ord));
                    else
                        ok = false;
                }
                ok = ok && any;
            }
        }
        if (ok) {
            best = id;
            best_key = k;
            best_len = f.name.size();
        }
    }
    if (best < 0) fail("MissingSymbol", "unknown variable '" + name + "'");
    return best_key;
}

DiffPoly Ring::var(int fam, int order, int exp) const {
    return DiffPoly::monomial(this, Monomial::single(key(fam, order), exp));
}

DiffPoly Ring::var(const std::string& name, int exp) const {
    return DiffPoly::monomial(this, Monomial::single(parse_key(name), exp));
}

// ---------------------------------------------------------------- DiffPoly

DiffPoly::DiffPoly(const Ring* r, const Scalar& c) : ring_(r) {
    if (!c.is_zero()) t_.emplace(Monomial(), c);
}

DiffPoly DiffPoly::monomial(const Ring* r, const Monomial& m, const Scalar& c) {
    DiffPoly p(r);
    if (!c.is_zero()) p.t_.emplace(m, c);
    return p;
}

const Ring* common_ring(const DiffPoly& a, const DiffPoly& b) {
    if (a.ring() && b.ring() && a.ring() != b.ring())
        fail("InvalidSpec", "mixing polynomials from different rings");
    return a.ring() ? a.ring() : b.ring();
}

bool DiffPoly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

Scalar DiffPoly::constant_term() const {
    auto it = t_.find(Monomial());
    return it == t_.end() ? Scalar(0) : it->second;
}

std::set<Key> DiffPoly::keys() const {
    std::set<Key> s;
    for (const auto& [m, c] : t_)
        for (const auto& x : m.f) s.insert(x.key);
    return s;
}

bool DiffPoly::contains(Key k) const {
    for (const auto& [m, c] : t_)
        if (m.exponent(k) != 0) return true;
    return false;
}

int DiffPoly::max_exp(Key k) const {
    int e = 0;
    for (const auto& [m, c] : t_) e = std::max(e, m.exponent(k));
    return e;
}

int DiffPoly::degree() const {
    int d = 0;
    for (const auto& [m, c] : t_) d = std::max(d, m.deg);
    return d;
}

DiffPoly DiffPoly::coeff(Key k, int e) const {
    DiffPoly r(ring_);
    for (const auto& [m, c] : t_)
        if (m.exponent(k) == e) r.add_term(m.without(k), c);
    return r;
}

std::map<int, DiffPoly> DiffPoly::by_power(Key k) const {
    std::map<int, DiffPoly> out;
    for (const auto& [m, c] : t_) {
        int e = m.exponent(k);
        auto it = out.try_emplace(e, DiffPoly(ring_)).first;
        it->second.add_term(m.without(k), c);
    }
    return out;
}

void DiffPoly::add_term(const Monomial& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = t_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

DiffPoly DiffPoly::operator-() const {
    DiffPoly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& o) {
    ring_ = common_ring(*this, o);
    for (const auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& o) {
    ring_ = common_ring(*this, o);
    for (const auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r(common_ring(a, b));
    for (const auto& [ma, ca] : a.t_)
        for (const auto& [mb, cb] : b.t_) r.add_term(ma.times(mb), ca * cb);
    return r;
}

DiffPoly& DiffPoly::operator*=(const DiffPoly& o) { return *this = *this * o; }

DiffPoly& DiffPoly::operator*=(const Scalar& s) {
    if (s.is_zero()) {
        t_.clear();
        return *this;
    }
    if (s.is_one()) return *this;
    for (auto& [m, c] : t_) c *= s;
    return *this;
}

DiffPoly DiffPoly::pow(int e) const {
    if (e < 0) {
        if (t_.size() != 1) fail("DomainError", "negative power of a non-monomial");
        const auto& [m, c] = *t_.begin();
        std::vector<Factor> fs = m.f;
        for (auto& x : fs) x.exp *= e;
        return monomial(ring_, Monomial(fs), c.pow(e));
    }
    DiffPoly r(ring_, Scalar(1)), b = *this;
    while (e > 0) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

std::string DiffPoly::str() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : t_) {
        std::string mono;
        for (const auto& x : m.f) {
            if (!mono.empty()) mono += "*";
            mono += ring_ ? ring_->key_name(x.key) : "?";
            if (x.exp != 1) mono += "^" + std::to_string(x.exp);
        }
        bool neg = c.is_rational() && sgn(c.a()) < 0;
        Scalar mag = neg ? -c : c;
        std::string term;
        if (mono.empty())
            term = mag.str();
        else if (mag.is_one())
            term = mono;
        else
            term = mag.str() + "*" + mono;
        if (first)
            s = (neg ? "-" : "") + term;
        else
            s += (neg ? " - " : " + ") + term;
        first = false;
    }
    return s;
}

// ------------------------------------------------------------------ parser

namespace {

struct PolyParser {
    const Ring& r;
    const std::string& t;
    size_t p = 0;

    void ws() {
        while (p < t.size() && std::isspace(static_cast<unsigned char>(t[p]))) ++p;
    }
    bool eat(char c) {
        ws();
        if (p < t.size() && t[p] == c) {
            ++p;
            return true;
        }
        return false;
    }
    [[noreturn]] void bad(const std::string& msg) {
        fail("ParseError", msg + " at offset " + std::to_string(p) + " in '" + t + "'");
    }
    DiffPoly expr() {
        DiffPoly s(&r);
        bool neg = eat('-');
        if (!neg) eat('+');
        s = term();
        if (neg) s = -s;
        for (;;) {
            if (eat('+'))
                s += term();
            else if (eat('-'))
                s -= term();
            else
                return s;
        }
    }
    DiffPoly term() {
        DiffPoly s = power();
        for (;;) {
            if (eat('*')) {
                s *= power();
            } else if (eat('/')) {
                DiffPoly d = power();
                if (!d.is_constant() || d.is_zero()) bad("division by a non-constant");
                s *= d.constant_term().inverse();
            } else {
                return s;
            }
        }
    }
    DiffPoly power() {
        DiffPoly b = atom();
        if (eat('^')) {
            bool neg = eat('-');
            ws();
            size_t q = p;
            while (q < t.size() && std::isdigit(static_cast<unsigned char>(t[q]))) ++q;
            if (q == p) bad("missing exponent");
            int e = std::stoi(t.substr(p, q - p));
            p = q;
            b = b.pow(neg ? -e : e);
        }
        return b;
    }
    DiffPoly atom() {
        ws();
        if (eat('(')) {
            DiffPoly s = expr();
            if (!eat(')')) bad("missing ')'");
            return s;
        }
        if (eat('-')) return -atom();
        if (p >= t.size()) bad("unexpected end");
        if (std::isdigit(static_cast<unsigned char>(t[p]))) {
            size_t q = p;
            while (q < t.size() && std::isdigit(static_cast<unsigned char>(t[q]))) ++q;
            Rational v(t.substr(p, q - p), 10);
            p = q;
            return DiffPoly(&r, Scalar(v));
        }
        if (std::isalpha(static_cast<unsigned char>(t[p])) || t[p] == '_') {
            size_t q = p;
            while (q < t.size() && (std::isalnum(static_cast<unsigned char>(t[q])) || t[q] == '_')) ++q;
            std::string id = t.substr(p, q - p);
            p = q;
            if (id == "I") return DiffPoly(&r, Scalar::i());
            if (id == "sqrt2") return DiffPoly(&r, Scalar::sqrt2());
            return DiffPoly::monomial(&r, Monomial::single(r.parse_key(id)));
        }
        bad("unexpected character");
    }
};

}  // namespace

DiffPoly Ring::parse(const std::string& text) const {
    PolyParser pp{*this, text};
    DiffPoly s = pp.expr();
    pp.ws();
    if (pp.p != text.size()) pp.bad("trailing input");
    s.set_ring(this);
    return s;
}

}  // namespace kdvw
