#include "kdvw/scalar.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "kdvw/error.hpp"

namespace kdvw {

Scalar::Scalar(Rational a, Rational b, Rational c, Rational d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    a_.canonicalize();
    b_.canonicalize();
    c_.canonicalize();
    d_.canonicalize();
}

Scalar Scalar::frac(long p, long q) {
    if (q == 0) fail("DomainError", "zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return Scalar(r);
}

Scalar Scalar::sqrt2() { return Scalar(0, 1, 0, 0); }
Scalar Scalar::i() { return Scalar(0, 0, 1, 0); }

int Scalar::support() const {
    return (sgn(a_) != 0) + (sgn(b_) != 0) + (sgn(c_) != 0) + (sgn(d_) != 0);
}

Scalar Scalar::operator-() const {
    Scalar r;
    r.a_ = -a_;
    r.b_ = -b_;
    r.c_ = -c_;
    r.d_ = -d_;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    a_ += o.a_;
    b_ += o.b_;
    c_ += o.c_;
    d_ += o.d_;
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    c_ -= o.c_;
    d_ -= o.d_;
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
    // fast paths: most coefficients met in practice are rational or in Q(i)
    const bool r1 = sgn(b_) == 0 && sgn(d_) == 0;
    const bool r2 = sgn(o.b_) == 0 && sgn(o.d_) == 0;
    if (r1 && r2) {
        if (sgn(c_) == 0 && sgn(o.c_) == 0) {
            a_ *= o.a_;
            return *this;
        }
        Rational na = a_ * o.a_ - c_ * o.c_;
        Rational nc = a_ * o.c_ + c_ * o.a_;
        a_ = std::move(na);
        c_ = std::move(nc);
        return *this;
    }
    // x = a + b r, y = c + d r with r = sqrt2; value = x + i y
    Rational xa = a_ * o.a_ + 2 * b_ * o.b_;  // x1 x2 real part of Q(sqrt2) product
    Rational xb = a_ * o.b_ + b_ * o.a_;
    Rational ya = c_ * o.c_ + 2 * d_ * o.d_;
    Rational yb = c_ * o.d_ + d_ * o.c_;
    Rational za = a_ * o.c_ + 2 * b_ * o.d_;
    Rational zb = a_ * o.d_ + b_ * o.c_;
    Rational wa = c_ * o.a_ + 2 * d_ * o.b_;
    Rational wb = c_ * o.b_ + d_ * o.a_;
    a_ = xa - ya;
    b_ = xb - yb;
    c_ = za + wa;
    d_ = zb + wb;
    return *this;
}

Scalar Scalar::conj() const { return Scalar(a_, b_, -c_, -d_); }

Scalar Scalar::inverse() const {
    if (is_zero()) fail("DomainError", "division by zero scalar");
    // s * conj(s) = x^2 + y^2 lies in Q(sqrt2)
    Scalar n = *this * conj();
    // n = p + q sqrt2; 1/n = (p - q sqrt2)/(p^2 - 2 q^2)
    Rational den = n.a_ * n.a_ - 2 * n.b_ * n.b_;
    Scalar ninv(n.a_ / den, -n.b_ / den, 0, 0);
    return conj() * ninv;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.is_rational()) {
        if (sgn(o.a_) == 0) fail("DomainError", "division by zero scalar");
        a_ /= o.a_;
        b_ /= o.a_;
        c_ /= o.a_;
        d_ /= o.a_;
        return *this;
    }
    return *this *= o.inverse();
}

Scalar Scalar::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar r(1), b = *this;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

std::complex<double> Scalar::to_complex() const {
    const double s2 = std::sqrt(2.0);
    return {a_.get_d() + b_.get_d() * s2, c_.get_d() + d_.get_d() * s2};
}

namespace {

std::string rat_str(const Rational& q) { return q.get_str(10); }

// one component with its basis symbol; returns e.g. "-3/2*sqrt2"
std::string component(const Rational& q, const char* basis) {
    if (!*basis) return rat_str(q);
    Rational aq = abs(q);
    std::string s = sgn(q) < 0 ? "-" : "";
    if (aq != 1) s += rat_str(aq) + "*";
    return s + basis;
}

}  // namespace

std::string Scalar::str() const {
    std::vector<std::string> parts;
    if (sgn(a_) != 0) parts.push_back(component(a_, ""));
    if (sgn(b_) != 0) parts.push_back(component(b_, "sqrt2"));
    if (sgn(c_) != 0) parts.push_back(component(c_, "I"));
    if (sgn(d_) != 0) parts.push_back(component(d_, "I*sqrt2"));
    if (parts.empty()) return "0";
    if (parts.size() == 1) return parts[0];
    std::string s = "(" + parts[0];
    for (size_t k = 1; k < parts.size(); ++k) {
        if (parts[k][0] == '-')
            s += " - " + parts[k].substr(1);
        else
            s += " + " + parts[k];
    }
    return s + ")";
}

namespace {

struct ScalarParser {
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
    Scalar expr() {
        Scalar s;
        bool neg = false;
        ws();
        if (eat('-'))
            neg = true;
        else
            eat('+');
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
    Scalar term() {
        Scalar s = factor();
        for (;;) {
            if (eat('*'))
                s *= factor();
            else if (eat('/'))
                s /= factor();
            else
                return s;
        }
    }
    Scalar factor() {
        ws();
        if (eat('(')) {
            Scalar s = expr();
            if (!eat(')')) fail("ParseError", "missing ')' in scalar '" + t + "'");
            return s;
        }
        if (eat('-')) return -factor();
        if (t.compare(p, 5, "sqrt2") == 0) {
            p += 5;
            return Scalar::sqrt2();
        }
        if (p < t.size() && t[p] == 'I') {
            ++p;
            return Scalar::i();
        }
        size_t q = p;
        while (q < t.size() && std::isdigit(static_cast<unsigned char>(t[q]))) ++q;
        if (q == p) fail("ParseError", "bad scalar '" + t + "'");
        Rational r(t.substr(p, q - p), 10);
        p = q;
        return Scalar(r);
    }
};

}  // namespace

Scalar Scalar::parse(const std::string& text) {
    ScalarParser sp{text};
    Scalar s = sp.expr();
    sp.ws();
    if (sp.p != text.size()) fail("ParseError", "trailing input in scalar '" + text + "'");
    return s;
}

}  // namespace kdvw
