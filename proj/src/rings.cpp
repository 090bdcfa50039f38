#include "kdvw/rings.hpp"

namespace kdvw {

namespace {

// Images point back into the ring, so rings are filled in place.
void build_tau(Ring& r) {
    r.add_jet("v");
    r.add_jet("u");
    r.add_jet("q");
    for (int j = 0; j <= 10; ++j) r.add_jet("b" + std::to_string(j), true);
    for (int j = 1; j <= kMaxXOrder; ++j) r.add_jet("X11_" + std::to_string(j), true);
    for (int j = 1; j <= kMaxXOrder; ++j) r.add_jet("X12_" + std::to_string(j), true);
    r.add_ordinary("zeta");
    int t5 = r.add_ordinary("tau5");
    int t7 = r.add_ordinary("tau7");
    r.add_constant("c");
    r.add_ordinary("w", true);  // zeta^(-1/2) in the X-series
    DiffPoly one(&r, Scalar(1));
    r.set_image(t5, "t5", one);
    r.set_image(t7, "t7", one);
}

void build_pi(Ring& r) {
    r.add_jet("y");
    r.add_jet("h");
    for (const char* f : {"q", "r", "v", "w"})
        for (int k = 1; k <= kMaxPhiOrder / 2; ++k) r.add_jet(f + std::to_string(k));
    int t0 = r.add_ordinary("t0");
    int t1 = r.add_ordinary("t1");
    r.add_ordinary("z");
    r.add_ordinary("g", true);
    r.add_ordinary("s1");
    r.add_ordinary("T1");
    r.add_ordinary("T3");
    for (const char* c : {"k0", "k1", "k3", "n0", "n1", "n3"}) r.add_constant(c);
    // series variables: s = z^(-1/2), w = |z|^(1/2) on the negative axis, E = exp(-2 theta)
    r.add_ordinary("s", true);
    r.add_ordinary("w", true);
    r.add_ordinary("E", true);
    DiffPoly one(&r, Scalar(1));
    r.set_image(t0, "t0", one);
    r.set_image(t1, "t1", one);
}

void build_mkdv(Ring& r) {
    r.add_jet("q");
    DiffPoly one(&r, Scalar(1));
    const char* names[] = {"x0", "x1", "x2"};
    for (const char* n : names) r.set_image(r.add_ordinary(n), n, one);
}

}  // namespace

const Ring& tau_ring() {
    static const Ring* r = [] {
        auto* p = new Ring({"t1", "t3", "t5", "t7"});
        build_tau(*p);
        return p;
    }();
    return *r;
}

const Ring& pi_ring() {
    static const Ring* r = [] {
        auto* p = new Ring({"t0", "t1"});
        build_pi(*p);
        return p;
    }();
    return *r;
}

const Ring& mkdv_ring() {
    static const Ring* r = [] {
        auto* p = new Ring({"x0", "x1", "x2"});
        build_mkdv(*p);
        return p;
    }();
    return *r;
}

DiffPoly tau(const std::string& text) { return tau_ring().parse(text); }
DiffPoly pi(const std::string& text) { return pi_ring().parse(text); }
DiffPoly mk(const std::string& text) { return mkdv_ring().parse(text); }

}  // namespace kdvw
