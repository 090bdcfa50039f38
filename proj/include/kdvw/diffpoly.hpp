#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kdvw/scalar.hpp"

namespace kdvw {

// A variable is a generator family plus a multi-index over the ring's
// coordinates. Packed as: family in bits 56..63, the non-spatial coordinates
// c = 1..6 in bits 56-8c .. 63-8c, spatial order in bits 0..7. Numeric order
// of keys is therefore (family, non-spatial index, spatial order).
using Key = std::uint64_t;

enum class Kind { Jet, Ordinary, Constant };

constexpr int kMaxCoords = 7;

inline int key_family(Key k) { return static_cast<int>(k >> 56); }
inline int key_index(Key k, int c) {
    return c == 0 ? static_cast<int>(k & 0xff) : static_cast<int>((k >> (56 - 8 * c)) & 0xff);
}
inline Key key_step(int c) { return c == 0 ? Key{1} : Key{1} << (56 - 8 * c); }
inline int key_order(Key k) { return key_index(k, 0); }
// generator part: family and non-spatial index with the spatial order cleared
inline Key key_generator(Key k) { return k & ~Key{0xff}; }

struct Factor {
    Key key;
    int exp;
    friend bool operator==(const Factor& a, const Factor& b) { return a.key == b.key && a.exp == b.exp; }
};

struct Monomial {
    std::vector<Factor> f;  // sorted by key, exponents nonzero
    int deg = 0;

    Monomial() = default;
    explicit Monomial(std::vector<Factor> fs);
    static Monomial single(Key k, int e = 1);
    bool empty() const { return f.empty(); }
    int exponent(Key k) const;
    Monomial times(const Monomial& o) const;
    Monomial without(Key k) const;
    Monomial with_exp(Key k, int e) const;  // set exponent of k (0 removes)
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.f == b.f; }
};

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

class DiffPoly;

struct Family {
    std::string name;
    Kind kind = Kind::Jet;
    bool laurent = false;
    bool compact = false;  // jets of order 0 print without suffix
    // ordinary generators: image under each coordinate derivation (absent = 0)
    std::map<int, std::shared_ptr<const DiffPoly>> images;
};

class Ring {
public:
    explicit Ring(std::vector<std::string> coords);

    int add_jet(const std::string& name, bool compact = false, bool laurent = false);
    int add_ordinary(const std::string& name, bool laurent = false);
    int add_constant(const std::string& name, bool laurent = false);
    void set_image(int fam, const std::string& coord, const DiffPoly& img);

    const std::vector<std::string>& coords() const { return coords_; }
    int coord(const std::string& name) const;  // -1 when undeclared
    const Family& fam(int id) const { return fams_.at(static_cast<size_t>(id)); }
    int num_families() const { return static_cast<int>(fams_.size()); }
    int family(const std::string& name) const;  // MissingSymbol when undeclared
    bool has_family(const std::string& name) const;

    Key key(int fam, int order = 0) const;
    Key key(int fam, const std::vector<int>& alpha) const;  // alpha[c] per coordinate
    std::string key_name(Key k) const;
    Key parse_key(const std::string& name) const;  // MissingSymbol on failure

    DiffPoly var(int fam, int order = 0, int exp = 1) const;
    DiffPoly var(const std::string& name, int exp = 1) const;
    DiffPoly parse(const std::string& text) const;

private:
    int add(const std::string& name, Kind kind, bool compact, bool laurent);
    std::vector<std::string> coords_;
    std::vector<Family> fams_;
    std::map<std::string, int> by_name_;
};

// Exact polynomial in the ring's variables with Q(i, sqrt2) coefficients.
class DiffPoly {
public:
    using Terms = std::map<Monomial, Scalar, MonoLess>;

    DiffPoly() = default;
    explicit DiffPoly(const Ring* r) : ring_(r) {}
    DiffPoly(const Ring* r, const Scalar& c);
    static DiffPoly monomial(const Ring* r, const Monomial& m, const Scalar& c = Scalar(1));

    const Ring* ring() const { return ring_; }
    const Terms& terms() const { return t_; }
    size_t size() const { return t_.size(); }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    Scalar constant_term() const;
    std::set<Key> keys() const;
    bool contains(Key k) const;
    int max_exp(Key k) const;
    int degree() const;
    // polynomial coefficient of k^e, viewing the other variables as coefficients
    DiffPoly coeff(Key k, int e) const;
    std::map<int, DiffPoly> by_power(Key k) const;

    void add_term(const Monomial& m, const Scalar& c);

    DiffPoly operator-() const;
    DiffPoly& operator+=(const DiffPoly& o);
    DiffPoly& operator-=(const DiffPoly& o);
    DiffPoly& operator*=(const DiffPoly& o);
    DiffPoly& operator*=(const Scalar& s);
    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
    friend DiffPoly operator*(DiffPoly a, const Scalar& s) { return a *= s; }
    friend DiffPoly operator*(const Scalar& s, DiffPoly a) { return a *= s; }
    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.t_ == b.t_; }
    friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }
    DiffPoly pow(int e) const;

    // re-home on a ring (used when folding a zero or constant into an expression)
    void set_ring(const Ring* r) { ring_ = r; }

    std::string str() const;

private:
    const Ring* ring_ = nullptr;
    Terms t_;
};

const Ring* common_ring(const DiffPoly& a, const DiffPoly& b);

}  // namespace kdvw
