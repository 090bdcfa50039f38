#include "kdvw/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "kdvw/error.hpp"

namespace kdvw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_iota(double iota) {
    if (!(iota >= 0 && iota <= 1)) fail("InvalidSpec", "iota must lie in [0, 1]");
}

std::string fmt(double x) {
    std::ostringstream o;
    o.precision(6);
    o << x;
    return o.str();
}

// Least-squares slope of y against x.
double slope(const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(pts.size());
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double deviation(const SigmaFn& s, double z) {
    if (s.deviation) return std::abs(s.deviation(z));
    return std::abs(s(z) - (z > 0 ? s.iota : 0.0));
}

template <class F>
double gk(F f, double a, double b, double tol, double* err) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol, err);
}

}  // namespace

SigmaFn heaviside(double iota, double shift) {
    check_iota(iota);
    SigmaFn s;
    s.name = shift == 0 ? "heaviside" : "heaviside(" + fmt(shift) + ")";
    s.iota = iota;
    s.eval = [iota, shift](double r) { return r > shift ? iota : 0.0; };
    if (iota > 0) s.jumps = {shift};
    s.tail = TailConstants{std::max(1.0, iota), 1, 1, std::abs(shift) + 2};
    return s;
}

SigmaFn gumbel_cubic(double iota) {
    check_iota(iota);
    SigmaFn s;
    s.name = "gumbel_cubic";
    s.iota = iota;
    s.eval = [iota](double r) { return iota * std::exp(-std::exp(-r * r * r)); };
    s.deviation = [iota](double r) {
        const double e = std::exp(-r * r * r);
        return r > 0 ? iota * std::expm1(-e) : iota * std::exp(-e);
    };
    s.tail = TailConstants{1, 1, 3, 2};
    return s;
}

SigmaFn piecewise(std::vector<double> jumps, std::vector<double> values) {
    if (values.size() != jumps.size() + 1) fail("InvalidSpec", "piecewise needs one more value than jumps");
    if (!std::is_sorted(jumps.begin(), jumps.end()) ||
        std::adjacent_find(jumps.begin(), jumps.end()) != jumps.end())
        fail("InvalidSpec", "jump points must be strictly increasing");
    for (size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0 && values[i] <= 1)) fail("InvalidSpec", "values must lie in [0, 1]");
        if (i > 0 && values[i] < values[i - 1]) fail("InvalidSpec", "values must be non-decreasing");
    }
    SigmaFn s;
    s.name = "piecewise";
    s.iota = values.back();
    for (size_t i = 0; i < jumps.size(); ++i)
        if (values[i + 1] != values[i]) s.jumps.push_back(jumps[i]);
    s.eval = [jumps, values](double r) {
        const auto it = std::lower_bound(jumps.begin(), jumps.end(), r);
        return values[static_cast<size_t>(it - jumps.begin())];
    };
    const double far = jumps.empty() ? 0 : std::max(std::abs(jumps.front()), std::abs(jumps.back()));
    s.tail = TailConstants{1, 1, 1, far + 2};
    return s;
}

SigmaFn piecewise(std::vector<double> starts, std::vector<std::function<double(double)>> pieces, double iota,
                  std::string name) {
    if (pieces.empty() || starts.size() + 1 != pieces.size())
        fail("InvalidSpec", "piecewise needs one more piece than break points");
    if (!std::is_sorted(starts.begin(), starts.end())) fail("InvalidSpec", "break points must be sorted");
    check_iota(iota);
    SigmaFn s;
    s.name = std::move(name);
    s.iota = iota;
    s.jumps = starts;
    s.eval = [starts, pieces](double r) {
        const auto it = std::lower_bound(starts.begin(), starts.end(), r);
        return pieces[static_cast<size_t>(it - starts.begin())](r);
    };
    return s;
}

SigmaFn sigma_from_json(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("family")) fail("InvalidSpec", "sigma spec needs a family");
    const std::string fam = spec.at("family").get<std::string>();
    const nlohmann::json params = spec.value("params", nlohmann::json::object());
    const double iota = spec.value("iota", 1.0);
    try {
        if (fam == "heaviside") return heaviside(iota, params.value("shift", 0.0));
        if (fam == "gumbel_cubic") return gumbel_cubic(iota);
        if (fam == "piecewise") {
            auto jumps = params.at("jumps").get<std::vector<double>>();
            auto values = params.at("values").get<std::vector<double>>();
            SigmaFn s = piecewise(std::move(jumps), std::move(values));
            if (spec.contains("iota") && s.iota != iota) fail("InvalidSpec", "iota differs from the last value");
            return s;
        }
    } catch (const nlohmann::json::exception& e) {
        fail("InvalidSpec", e.what());
    }
    fail("InvalidSpec", "unknown sigma family " + fam);
}

nlohmann::json sigma_to_json(const SigmaFn& s) {
    nlohmann::json j{{"name", s.name}, {"iota", s.iota}, {"jumps", s.jumps}};
    if (s.tail) j["tail"] = {{"k1", s.tail->k1}, {"k2", s.tail->k2}, {"k3", s.tail->k3}, {"K", s.tail->K}};
    return j;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j{{"name", name},
                     {"assumption1", assumption1},
                     {"assumption2", assumption2},
                     {"violations", violations},
                     {"k1", k1},
                     {"k3", k3},
                     {"K", K},
                     {"l2_norm", l2_norm},
                     {"tail_points", tail_points}};
    j["k2"] = k2 ? nlohmann::json(*k2) : nlohmann::json(nullptr);
    return j;
}

ValidationReport validate(const SigmaFn& s, const ValidationConfig& cfg) {
    ValidationReport rep;
    rep.name = s.name;
    std::vector<std::string> a1, a2;

    // ---- Assumption 1: range, monotonicity, isolated jumps, one-sided limits
    const double h = (cfg.hi - cfg.lo) / (cfg.grid - 1);
    double prev = s(cfg.lo);
    bool range_ok = true, mono_ok = true;
    for (int i = 0; i < cfg.grid; ++i) {
        const double x = cfg.lo + h * i;
        const double v = s(x);
        if (!(v >= 0 && v <= 1)) range_ok = false;
        if (i > 0 && v < prev - cfg.monotone_slack) mono_ok = false;
        if (i > 0 && v - prev > 1e-3) {
            const double x0 = x - h;
            const bool declared = std::any_of(s.jumps.begin(), s.jumps.end(),
                                              [&](double r) { return r >= x0 && r <= x; });
            if (!declared) {
                // follow the steeper half; a genuine jump keeps its size
                double a = x0, b = x;
                for (int k = 0; k < 40; ++k) {
                    const double m = 0.5 * (a + b);
                    if (s(m) - s(a) >= s(b) - s(m)) b = m;
                    else a = m;
                }
                if (s(b) - s(a) > 0.5 * (v - prev)) a1.push_back("undeclared discontinuity near " + fmt(a));
            }
        }
        prev = v;
    }
    if (!range_ok) a1.push_back("values leave [0, 1]");
    if (!mono_ok) a1.push_back("not non-decreasing on the grid");
    for (const double r : s.jumps)
        for (const double side : {-1.0, 1.0}) {
            const double e1 = s(r + side * 1e-7), e2 = s(r + side * 1e-9);
            if (std::abs(e1 - e2) > 1e-5) a1.push_back("no one-sided limit at " + fmt(r));
        }
    if (std::abs(s(cfg.hi) - s.iota) > 1e-6) a1.push_back("limit at +inf differs from iota");

    // L^2(R^-, r^4 sigma): integral of r^8 sigma^2 over [-R, 0] must settle
    auto l2 = [&](double R) {
        double err = 0;
        double total = 0;
        std::vector<double> cuts{-R};
        for (const double r : s.jumps)
            if (r > -R && r < 0) cuts.push_back(r);
        cuts.push_back(0);
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            total += gk([&](double r) { const double v = r * r * r * r * s(r); return v * v; }, cuts[i], cuts[i + 1],
                        1e-12, &err);
        return total;
    };
    std::vector<double> probes;
    for (const double R : cfg.l2_radii) probes.push_back(l2(R));
    const double last = probes.back(), before = probes[probes.size() - 2];
    rep.l2_norm = std::sqrt(last);
    if (!std::isfinite(last) || last - before > cfg.l2_tail_ratio * std::max(1.0, last))
        a1.push_back("r^4 sigma not in L^2(R^-)");

    // ---- Assumption 2: cubic-exponential approach to iota chi, decaying derivative
    std::vector<std::pair<double, double>> all;
    double k2 = kInf;
    bool rate_ok = true;
    for (const double side : {-1.0, 1.0}) {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < cfg.tail_samples; ++i) {
            const double a = cfg.tail_lo + (cfg.tail_hi - cfg.tail_lo) * i / (cfg.tail_samples - 1);
            const double d = deviation(s, side * a);
            if (d > 1e-300 && std::isfinite(d)) pts.emplace_back(a * a * a, std::log(d));
        }
        rep.tail_points += static_cast<int>(pts.size());
        if (pts.size() < 8) continue;
        const double k = -slope(pts);
        k2 = std::min(k2, k);
        // the decay rate must not fade along the window
        const size_t w = pts.size() / 4;
        double lo = kInf, hi = -kInf;
        for (size_t c = 0; c < 4; ++c) {
            const std::vector<std::pair<double, double>> part(pts.begin() + static_cast<long>(c * w),
                                                                c == 3 ? pts.end() : pts.begin() + static_cast<long>((c + 1) * w));
            const double r = -slope(part);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        if (!(lo > 0) || lo < 0.5 * hi) rate_ok = false;
        all.insert(all.end(), pts.begin(), pts.end());
    }
    if (std::isfinite(k2)) {
        rep.k2 = k2;
        if (!(k2 > 0) || !rate_ok) a2.push_back("deviation from iota chi is not cubic-exponential");
    }
    // k1: smallest constant that covers the grid and the tail samples
    double logk1 = -kInf;
    const double kk = rep.k2 ? std::max(0.0, *rep.k2) : 0.0;
    for (int i = 0; i < cfg.grid; ++i) {
        const double z = cfg.lo + h * i;
        const double d = deviation(s, z);
        if (d > 0) logk1 = std::max(logk1, std::log(d) + kk * std::abs(z * z * z));
    }
    for (const auto& [x3, ld] : all) logk1 = std::max(logk1, ld + kk * x3);
    rep.k1 = std::isfinite(logk1) ? std::exp(logk1) : 0.0;
    if (!std::isfinite(rep.k1)) a2.push_back("k1 unbounded");

    // |sigma'(z)| z^2 on |z| > K by central differences
    double far = 0;
    for (const double r : s.jumps) far = std::max(far, std::abs(r));
    rep.K = std::max(cfg.tail_lo, s.jumps.empty() ? 0.0 : far + 1);
    double inner = 0, outer = 0;
    const int nd = 2000;
    for (int i = 0; i < nd; ++i) {
        const double a = rep.K + (cfg.deriv_hi - rep.K) * (i + 0.5) / nd;
        for (const double side : {-1.0, 1.0}) {
            const double z = side * a;
            const double d = std::abs(s(z + cfg.fd_step) - s(z - cfg.fd_step)) / (2 * cfg.fd_step) * a * a;
            double& slot = i < nd / 2 ? inner : outer;
            slot = std::max(slot, d);
        }
    }
    rep.k3 = std::max(inner, outer);
    if (!std::isfinite(rep.k3) || outer > 2 * inner + 1e-8) a2.push_back("sigma' does not decay like |z|^-2");

    rep.assumption1 = a1.empty();
    rep.assumption2 = a2.empty();
    for (auto& v : a1) rep.violations.push_back("assumption 1: " + v);
    for (auto& v : a2) rep.violations.push_back("assumption 2: " + v);
    return rep;
}

void require_valid(const SigmaFn& s, const ValidationConfig& cfg) {
    const ValidationReport r = validate(s, cfg);
    if (r.violations.empty()) return;
    std::string msg = s.name + ":";
    for (const auto& v : r.violations) msg += " " + v + ";";
    fail("ValidationFailure", msg);
}

M0Result m0_detail(const SigmaFn& s, double tol) {
    if (s.iota != 1) fail("NonConvergentQuadrature", "m0 diverges unless iota = 1");
    std::vector<double> cuts{0};
    cuts.insert(cuts.end(), s.jumps.begin(), s.jumps.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto f = [&](double x) { return s.deviation ? -s.deviation(x) : (x >= 0 ? 1.0 : 0.0) - s(x); };

    M0Result out;
    // primary: adaptive Gauss-Kronrod on each piece
    std::vector<std::pair<double, double>> pieces;
    pieces.emplace_back(-kInf, cuts.front());
    for (size_t i = 0; i + 1 < cuts.size(); ++i) pieces.emplace_back(cuts[i], cuts[i + 1]);
    pieces.emplace_back(cuts.back(), kInf);
    for (const auto& [a, b] : pieces) {
        double err = 0;
        out.value += gk(f, a, b, 1e-14, &err);
        out.error += err;
    }
    // alternate: double-exponential rules
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    for (const auto& [a, b] : pieces) {
        if (std::isinf(a)) out.alternate += es.integrate([&](double t) { return f(b - t); }, 0.0, kInf);
        else if (std::isinf(b)) out.alternate += es.integrate([&](double t) { return f(a + t); }, 0.0, kInf);
        else out.alternate += ts.integrate(f, a, b);
    }
    if (!(out.error <= tol)) fail("NonConvergentQuadrature", "error estimate " + fmt(out.error));
    if (!(std::abs(out.value - out.alternate) <= 10 * tol))
        fail("NonConvergentQuadrature", "schemes disagree: " + fmt(out.value) + " vs " + fmt(out.alternate));
    return out;
}

double m0(const SigmaFn& s) { return m0_detail(s).value; }

SmallEta small_eta_predict(double eta, double m0) {
    if (eta == 0) fail("ZeroEta", "eta must be nonzero");
    return {eta / 2 * m0 - 1 / (8 * eta), 3 * m0 / 16 + 9 / (128 * eta * eta),
            -9 * m0 / (128 * eta) + 39 / (512 * eta * eta * eta)};
}

}  // namespace kdvw
