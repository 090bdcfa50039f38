#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace kdvw {

using Rational = mpq_class;

// Element a + b*sqrt2 + c*I + d*I*sqrt2 of Q(i, sqrt2).
class Scalar {
public:
    Scalar() = default;
    Scalar(long n) : a_(n) {}  // NOLINT(google-explicit-constructor)
    Scalar(const Rational& q) : a_(q) { a_.canonicalize(); }  // NOLINT
    Scalar(Rational a, Rational b, Rational c, Rational d);

    static Scalar frac(long p, long q);
    static Scalar sqrt2();
    static Scalar i();

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    const Rational& c() const { return c_; }
    const Rational& d() const { return d_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0 && sgn(c_) == 0 && sgn(d_) == 0; }
    bool is_one() const { return a_ == 1 && sgn(b_) == 0 && sgn(c_) == 0 && sgn(d_) == 0; }
    bool is_rational() const { return sgn(b_) == 0 && sgn(c_) == 0 && sgn(d_) == 0; }
    // number of nonzero components
    int support() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
    friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
    friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
    friend Scalar operator/(Scalar x, const Scalar& y) { return x /= y; }
    friend bool operator==(const Scalar& x, const Scalar& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_ && x.d_ == y.d_;
    }
    friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }

    Scalar inverse() const;
    Scalar conj() const;  // complex conjugation i -> -i
    Scalar pow(long e) const;

    std::complex<double> to_complex() const;

    // Canonical text: "3/4", "-sqrt2", "1/2*I", "(1 + 1/2*sqrt2 - I)".
    std::string str() const;
    static Scalar parse(const std::string& text);

private:
    Rational a_, b_, c_, d_;
};

}  // namespace kdvw
