#pragma once

#include <map>
#include <string>

#include "kdvw/scalar.hpp"

namespace kdvw {

// Finite Q-linear combination of power products prod b^e with rational
// exponents e in [0, 1). Bases are primes ("2", "7") or positive
// indeterminates ("tau7"); integer parts of prime exponents are folded into
// the coefficient. Distinct power products are linearly independent over Q,
// so zero testing is exact.
class Surd {
public:
    using Power = std::map<std::string, Rational>;  // base -> exponent

    Surd() = default;
    Surd(long n);  // NOLINT(google-explicit-constructor)
    Surd(const Rational& q);  // NOLINT(google-explicit-constructor)
    // c * base^exp, base a positive rational (factored) or an indeterminate name
    static Surd power(const Rational& base, const Rational& exp);
    static Surd symbol(const std::string& name, const Rational& exp = 1);

    bool is_zero() const { return t_.empty(); }
    bool is_rational() const;  // single term with empty power
    Rational rational() const;  // RangeError when not rational

    Surd operator-() const;
    Surd& operator+=(const Surd& o);
    Surd& operator-=(const Surd& o);
    friend Surd operator+(Surd a, const Surd& b) { return a += b; }
    friend Surd operator-(Surd a, const Surd& b) { return a -= b; }
    friend Surd operator*(const Surd& a, const Surd& b);
    friend bool operator==(const Surd& a, const Surd& b) { return a.t_ == b.t_; }
    friend bool operator!=(const Surd& a, const Surd& b) { return !(a == b); }
    Surd pow(long e) const;
    // exact quotient by a single-term value
    Surd operator/(const Surd& d) const;

    double value(const std::map<std::string, double>& symbols = {}) const;
    std::string str() const;

private:
    static void normalize(Rational& coeff, Power& p);
    void add(const Power& p, const Rational& c);
    std::map<Power, Rational> t_;
};

}  // namespace kdvw
