#include "kdvw/radical.hpp"

#include <cctype>
#include <cmath>

#include "kdvw/error.hpp"

namespace kdvw {

namespace {

bool is_prime_name(const std::string& b) { return !b.empty() && std::isdigit(static_cast<unsigned char>(b[0])); }

// floor of a rational
mpz_class floor_q(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f;
}

Rational mpz_pow(const mpz_class& b, const mpz_class& e) {
    // e may be negative; |e| is small in practice
    long n = e.get_si();
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(std::labs(n)));
    Rational q(r);
    if (n < 0) q = 1 / q;
    return q;
}

void factor_into(mpz_class n, const Rational& e, Surd::Power& p) {
    for (mpz_class d = 2; d * d <= n; ++d) {
        while (n % d == 0) {
            p[d.get_str()] += e;
            n /= d;
        }
    }
    if (n > 1) p[n.get_str()] += e;
}

}  // namespace

Surd::Surd(long n) {
    if (n != 0) t_[Power{}] = Rational(n);
}

Surd::Surd(const Rational& q) {
    if (sgn(q) != 0) t_[Power{}] = q;
}

void Surd::normalize(Rational& coeff, Power& p) {
    for (auto it = p.begin(); it != p.end();) {
        it->second.canonicalize();
        if (is_prime_name(it->first)) {
            mpz_class f = floor_q(it->second);
            if (f != 0) {
                coeff *= mpz_pow(mpz_class(it->first), f);
                it->second -= Rational(f);
            }
        }
        if (sgn(it->second) == 0)
            it = p.erase(it);
        else
            ++it;
    }
}

void Surd::add(const Power& p, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, ins] = t_.try_emplace(p, c);
    if (!ins) {
        it->second += c;
        if (sgn(it->second) == 0) t_.erase(it);
    }
}

Surd Surd::power(const Rational& base, const Rational& exp) {
    if (sgn(base) <= 0) fail("DomainError", "power base must be positive");
    Power p;
    Rational b = base;
    b.canonicalize();
    factor_into(b.get_num(), exp, p);
    factor_into(b.get_den(), -exp, p);
    Rational c(1);
    normalize(c, p);
    Surd s;
    s.add(p, c);
    return s;
}

Surd Surd::symbol(const std::string& name, const Rational& exp) {
    if (is_prime_name(name)) fail("InvalidSpec", "symbol names must not start with a digit");
    Surd s;
    Power p{{name, exp}};
    Rational c(1);
    normalize(c, p);
    s.add(p, c);
    return s;
}

bool Surd::is_rational() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }

Rational Surd::rational() const {
    if (!is_rational()) fail("RangeError", "value is not rational: " + str());
    return t_.empty() ? Rational(0) : t_.begin()->second;
}

Surd Surd::operator-() const {
    Surd r = *this;
    for (auto& [p, c] : r.t_) c = -c;
    return r;
}

Surd& Surd::operator+=(const Surd& o) {
    for (const auto& [p, c] : o.t_) add(p, c);
    return *this;
}

Surd& Surd::operator-=(const Surd& o) {
    for (const auto& [p, c] : o.t_) add(p, -c);
    return *this;
}

Surd operator*(const Surd& a, const Surd& b) {
    Surd r;
    for (const auto& [pa, ca] : a.t_)
        for (const auto& [pb, cb] : b.t_) {
            Surd::Power p = pa;
            for (const auto& [base, e] : pb) p[base] += e;
            Rational c = ca * cb;
            Surd::normalize(c, p);
            r.add(p, c);
        }
    return r;
}

Surd Surd::pow(long e) const {
    if (e < 0) return Surd(1) / pow(-e);
    Surd r(1);
    for (long i = 0; i < e; ++i) r = r * *this;
    return r;
}

Surd Surd::operator/(const Surd& d) const {
    if (d.t_.size() != 1) fail("DomainError", "division by a non-monomial surd");
    const auto& [p, c] = *d.t_.begin();
    Surd inv;
    Power q;
    for (const auto& [base, e] : p) q[base] = -e;
    Rational ci = 1 / c;
    normalize(ci, q);
    inv.add(q, ci);
    return *this * inv;
}

double Surd::value(const std::map<std::string, double>& symbols) const {
    double s = 0;
    for (const auto& [p, c] : t_) {
        double v = c.get_d();
        for (const auto& [base, e] : p) {
            double b;
            if (is_prime_name(base)) {
                b = std::stod(base);
            } else {
                auto it = symbols.find(base);
                if (it == symbols.end()) fail("MissingInput", "no value for " + base);
                b = it->second;
            }
            v *= std::pow(b, e.get_d());
        }
        s += v;
    }
    return s;
}

std::string Surd::str() const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [p, c] : t_) {
        std::string term = c.get_str();
        for (const auto& [base, e] : p) term += "*" + base + "^(" + e.get_str() + ")";
        if (!first) s += " + ";
        s += term;
        first = false;
    }
    return s;
}

}  // namespace kdvw
