#include "kdvw/kdvnum.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "kdvw/error.hpp"
#include "kdvw/hierarchy.hpp"
#include "kdvw/rings.hpp"

namespace kdvw {

namespace {

using cplx = std::complex<double>;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// One r2c/c2r pair with its own buffers; the FFTW planner is not thread-safe.
struct FftPlan {
    int n;
    double* r;
    fftw_complex* c;
    fftw_plan fwd, bwd;

    explicit FftPlan(int n_) : n(n_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        r = fftw_alloc_real(static_cast<size_t>(n));
        c = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
        fwd = fftw_plan_dft_r2c_1d(n, r, c, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, c, r, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(r);
        fftw_free(c);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

FftPlan& plan_for(int n) {
    thread_local std::map<int, std::unique_ptr<FftPlan>> plans;
    auto& p = plans[n];
    if (!p) p = std::make_unique<FftPlan>(n);
    return *p;
}

Spectrum forward(const std::vector<double>& v) {
    FftPlan& p = plan_for(static_cast<int>(v.size()));
    std::memcpy(p.r, v.data(), v.size() * sizeof(double));
    fftw_execute(p.fwd);
    Spectrum s(static_cast<size_t>(p.n / 2 + 1));
    for (size_t m = 0; m < s.size(); ++m) s[m] = cplx(p.c[m][0], p.c[m][1]);
    return s;
}

std::vector<double> inverse(const Spectrum& s, int n) {
    FftPlan& p = plan_for(n);
    for (size_t m = 0; m < s.size(); ++m) {
        p.c[m][0] = s[m].real();
        p.c[m][1] = s[m].imag();
    }
    fftw_execute(p.bwd);
    std::vector<double> v(p.r, p.r + n);
    for (double& x : v) x /= n;
    return v;
}

// (ik)^n
cplx ik_pow(double k, int n) {
    const double a = std::pow(k, n);
    switch (n % 4) {
        case 0: return {a, 0};
        case 1: return {0, a};
        case 2: return {-a, 0};
        default: return {0, -a};
    }
}

Spectrum differentiate(const Spectrum& s, int n, int N, double P) {
    Spectrum d(s.size());
    for (size_t m = 0; m < s.size(); ++m) {
        if (static_cast<int>(m) == N / 2 && n % 2 == 1) continue;
        d[m] = s[m] * ik_pow(wavenumber(static_cast<int>(m), P), n);
    }
    return d;
}

std::vector<double> dealiased_product(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = static_cast<int>(a.size());
    std::vector<double> p(a.size());
    for (size_t j = 0; j < a.size(); ++j) p[j] = a[j] * b[j];
    Spectrum s = forward(p);
    for (int m = dealias_cutoff(n) + 1; m < static_cast<int>(s.size()); ++m) s[static_cast<size_t>(m)] = 0;
    return inverse(s, n);
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> run_plan(const std::vector<PlanStep>& steps, const GridField& v) {
    const int N = v.N();
    if (steps.empty()) return std::vector<double>(static_cast<size_t>(N), 0.0);
    std::vector<std::vector<double>> reg;
    reg.reserve(steps.size());
    for (const PlanStep& s : steps) {
        switch (s.op) {
            case PlanStep::Op::Constant:
                reg.emplace_back(static_cast<size_t>(N), s.c);
                break;
            case PlanStep::Op::Derivative:
                reg.push_back(s.order == 0 ? v.samples() : inverse(differentiate(v.spectrum(), s.order, N, v.P()), N));
                break;
            case PlanStep::Op::Product:
                reg.push_back(dealiased_product(reg[static_cast<size_t>(s.a)], reg[static_cast<size_t>(s.b)]));
                break;
            case PlanStep::Op::Scale: {
                std::vector<double> r = reg[static_cast<size_t>(s.a)];
                for (double& x : r) x *= s.c;
                reg.push_back(std::move(r));
                break;
            }
            case PlanStep::Op::Sum: {
                std::vector<double> r = reg[static_cast<size_t>(s.a)];
                const std::vector<double>& o = reg[static_cast<size_t>(s.b)];
                for (size_t j = 0; j < r.size(); ++j) r[j] += o[j];
                reg.push_back(std::move(r));
                break;
            }
        }
    }
    return reg.back();
}

// Emit one plan for a list of monomials: shared derivative registers, pairwise
// products left to right, then scale and accumulate.
std::vector<PlanStep> build_plan(const std::vector<CompiledRHS::Monomial>& terms) {
    std::vector<PlanStep> steps;
    std::map<int, int> deriv;
    auto push = [&steps](PlanStep s) {
        steps.push_back(s);
        return static_cast<int>(steps.size()) - 1;
    };
    auto d = [&](int order) {
        auto it = deriv.find(order);
        if (it != deriv.end()) return it->second;
        PlanStep s{PlanStep::Op::Derivative};
        s.order = order;
        const int r = push(s);
        deriv[order] = r;
        return r;
    };
    int acc = -1;
    for (const CompiledRHS::Monomial& m : terms) {
        int r;
        if (m.factors.empty()) {
            PlanStep s{PlanStep::Op::Constant};
            s.c = m.coeff;
            r = push(s);
        } else {
            r = -1;
            for (const auto& [order, e] : m.factors)
                for (int i = 0; i < e; ++i) {
                    const int x = d(order);
                    if (r < 0) {
                        r = x;
                    } else {
                        PlanStep s{PlanStep::Op::Product};
                        s.a = r;
                        s.b = x;
                        r = push(s);
                    }
                }
            if (m.coeff != 1) {
                PlanStep s{PlanStep::Op::Scale};
                s.a = r;
                s.c = m.coeff;
                r = push(s);
            }
        }
        if (acc < 0) {
            acc = r;
        } else {
            PlanStep s{PlanStep::Op::Sum};
            s.a = acc;
            s.b = r;
            acc = push(s);
        }
    }
    // make sure the last register is the result
    if (acc >= 0 && acc != static_cast<int>(steps.size()) - 1) {
        PlanStep s{PlanStep::Op::Scale};
        s.a = acc;
        s.c = 1;
        push(s);
    }
    return steps;
}

double to_double(const Scalar& s) {
    if (sgn(s.c()) != 0 || sgn(s.d()) != 0) fail("UnsupportedTerm", "complex coefficient " + s.str());
    return s.a().get_d() + s.b().get_d() * std::sqrt(2.0);
}

}  // namespace

GridField::GridField(int N, double P) : n_(N), p_(P), v_(static_cast<size_t>(std::max(N, 0)), 0.0) {
    if (!power_of_two(N) || N < 32) fail("BadGrid", "N must be a power of two >= 32");
    if (!(P > 0) || !std::isfinite(P)) fail("BadGrid", "period must be positive");
}

GridField::GridField(int N, double P, std::vector<double> samples) : GridField(N, P) {
    if (samples.size() != static_cast<size_t>(N)) fail("BadGrid", "sample count differs from N");
    v_ = std::move(samples);
}

GridField GridField::sample(int N, double P, const std::function<double(double)>& f) {
    GridField g(N, P);
    for (int j = 0; j < N; ++j) g.v_[static_cast<size_t>(j)] = f(g.x(j));
    return g;
}

GridField GridField::from_spectrum(int N, double P, const Spectrum& s) {
    if (s.size() != static_cast<size_t>(N / 2 + 1)) fail("BadGrid", "spectrum size differs from N/2 + 1");
    return GridField(N, P, inverse(s, N));
}

void GridField::set(int j, double v) {
    v_.at(static_cast<size_t>(j)) = v;
    cache_.reset();
}

void GridField::assign(std::vector<double> v) {
    if (v.size() != static_cast<size_t>(n_)) fail("BadGrid", "sample count differs from N");
    v_ = std::move(v);
    cache_.reset();
}

const Spectrum& GridField::spectrum() const {
    if (!cache_) cache_ = forward(v_);
    return *cache_;
}

GridField GridField::derivative(int n) const {
    if (n < 0) fail("BadGrid", "negative derivative order");
    if (n == 0) return *this;
    return from_spectrum(n_, p_, differentiate(spectrum(), n, n_, p_));
}

double GridField::interpolate(double x, int n) const {
    const Spectrum& s = spectrum();
    const double t = x + 0.5 * p_;
    double sum = 0;
    for (int m = 0; m <= n_ / 2; ++m) {
        const double k = wavenumber(m, p_);
        const cplx term = s[static_cast<size_t>(m)] * ik_pow(k, n) * std::polar(1.0, k * t);
        sum += (m == 0 || m == n_ / 2 ? 1.0 : 2.0) * term.real();
    }
    return sum / n_;
}

double GridField::integral() const {
    double s = 0;
    for (double v : v_) s += v;
    return s * p_ / n_;
}

double GridField::l2() const {
    double s = 0;
    for (double v : v_) s += v * v;
    return std::sqrt(s * p_ / n_);
}

double GridField::max_abs() const {
    double m = 0;
    for (double v : v_) m = std::max(m, std::abs(v));
    return m;
}

double l2_distance(const GridField& a, const GridField& b) {
    if (a.N() != b.N() || a.P() != b.P()) fail("BadGrid", "fields live on different grids");
    double s = 0;
    for (int j = 0; j < a.N(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(s * a.P() / a.N());
}

GridField CompiledRHS::operator()(const GridField& v) const { return GridField(v.N(), v.P(), run_plan(steps, v)); }

GridField CompiledRHS::eval_nonlinear(const GridField& v) const {
    return GridField(v.N(), v.P(), run_plan(nonlinear, v));
}

std::complex<double> CompiledRHS::symbol(double k) const {
    cplx s = 0;
    for (const auto& [n, a] : linear) s += a * ik_pow(k, n);
    return s;
}

std::string CompiledRHS::str() const {
    std::ostringstream o;
    o << source << '\n';
    for (size_t i = 0; i < steps.size(); ++i) {
        const PlanStep& s = steps[i];
        o << 'r' << i << " = ";
        switch (s.op) {
            case PlanStep::Op::Constant: o << s.c; break;
            case PlanStep::Op::Derivative: o << "D^" << s.order << " v"; break;
            case PlanStep::Op::Product: o << 'r' << s.a << " * r" << s.b << " (dealiased)"; break;
            case PlanStep::Op::Scale: o << s.c << " * r" << s.a; break;
            case PlanStep::Op::Sum: o << 'r' << s.a << " + r" << s.b; break;
        }
        o << '\n';
    }
    return o.str();
}

CompiledRHS compile(const DiffPoly& p, int family, const std::map<std::string, double>& bind) {
    CompiledRHS out;
    out.source = p.str();
    const Ring* ring = p.ring();
    if (!p.is_zero() && !ring) fail("UnsupportedTerm", "polynomial without a ring");
    if (ring && ring->fam(family).kind != Kind::Jet) fail("UnsupportedTerm", "target family is not a jet family");
    std::vector<CompiledRHS::Monomial> all, nonlin;
    for (const auto& [mono, coeff] : p.terms()) {
        CompiledRHS::Monomial m{to_double(coeff), {}};
        int deg = 0;
        for (const Factor& f : mono.f) {
            const int fam = key_family(f.key);
            const Family& F = ring->fam(fam);
            if (fam == family) {
                for (int c = 1; c < kMaxCoords; ++c)
                    if (key_index(f.key, c) != 0)
                        fail("UnsupportedTerm", "non-spatial derivative " + ring->key_name(f.key));
                if (f.exp < 0) fail("UnsupportedTerm", "negative power of " + ring->key_name(f.key));
                m.factors.emplace_back(key_order(f.key), f.exp);
                deg += f.exp;
                out.top_order = std::max(out.top_order, key_order(f.key));
            } else if (F.kind == Kind::Constant) {
                auto it = bind.find(F.name);
                if (it == bind.end()) fail("UnsupportedTerm", "unbound constant " + F.name);
                m.coeff *= std::pow(it->second, f.exp);
            } else {
                fail("UnsupportedTerm", "foreign symbol " + ring->key_name(f.key));
            }
        }
        all.push_back(m);
        if (deg == 1) out.linear[m.factors[0].first] += m.coeff;
        else nonlin.push_back(m);
    }
    out.steps = build_plan(all);
    out.nonlinear = build_plan(nonlin);
    out.nonlinear_terms = nonlin;
    return out;
}

CompiledRHS compile(const DiffPoly& p, const std::string& family, const std::map<std::string, double>& bind) {
    if (!p.ring()) return compile(p, 0, bind);
    return compile(p, p.ring()->family(family), bind);
}

double stable_dt(const CompiledRHS& f, const GridField& v) {
    const double kc = wavenumber(dealias_cutoff(v.N()), v.P());
    std::map<int, double> sup;
    auto norm = [&](int n) {
        auto it = sup.find(n);
        if (it != sup.end()) return it->second;
        return sup[n] = v.derivative(n).max_abs();
    };
    double rho = 0;
    for (const CompiledRHS::Monomial& m : f.nonlinear_terms) {
        // d/dv of prod (D^n v)^e along e^{ikx}: sum_i e_i (ik)^{n_i} (D^{n_i} v)^{e_i - 1} prod_{j != i}
        for (size_t i = 0; i < m.factors.size(); ++i) {
            double b = std::abs(m.coeff) * m.factors[i].second * std::pow(kc, m.factors[i].first) *
                       std::pow(norm(m.factors[i].first), m.factors[i].second - 1);
            for (size_t j = 0; j < m.factors.size(); ++j)
                if (j != i) b *= std::pow(norm(m.factors[j].first), m.factors[j].second);
            rho += b;
        }
    }
    return rho == 0 ? std::numeric_limits<double>::infinity() : 2.8 / rho;
}

double default_dt(int top_order) {
    if (top_order <= 3) return 1e-3;
    if (top_order <= 5) return 1e-4;
    return 1e-5;
}

Trajectory trajectory(const CompiledRHS& f, const GridField& ic, double T, double dt, const EvolveOptions& o) {
    if (!(T >= 0) || !(dt > 0)) fail("InvalidSpec", "need T >= 0 and dt > 0");
    const int N = ic.N();
    const double P = ic.P();
    Trajectory tr;
    const long steps = T == 0 ? 0 : std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
    const double h = steps ? T / static_cast<double>(steps) : 0;
    const double limit = stable_dt(f, ic);
    if (steps && h > limit) {
        std::ostringstream m;
        m << "dt = " << h << " exceeds the nonlinear stability bound " << limit;
        fail("Unstable", m.str());
    }
    // the Nyquist bin has no real derivative; drop it so the state stays real
    Spectrum V = ic.spectrum();
    V[static_cast<size_t>(N / 2)] = 0;
    const size_t nb = V.size();
    Spectrum E(nb), E2(nb);
    for (size_t m = 0; m < nb; ++m) {
        const cplx L = static_cast<int>(m) == N / 2 ? cplx(0) : f.symbol(wavenumber(static_cast<int>(m), P));
        E[m] = std::exp(L * h);
        E2[m] = std::exp(L * (h / 2));
    }
    auto NL = [&](const Spectrum& s) {
        Spectrum r = forward(run_plan(f.nonlinear, GridField::from_spectrum(N, P, s)));
        r[static_cast<size_t>(N / 2)] = 0;
        for (cplx& z : r) z *= h;
        return r;
    };
    tr.t.push_back(0);
    tr.frames.push_back(GridField::from_spectrum(N, P, V));
    Spectrum tmp(nb);
    for (long n = 1; n <= steps; ++n) {
        const Spectrum a = NL(V);
        for (size_t m = 0; m < nb; ++m) tmp[m] = E2[m] * (V[m] + 0.5 * a[m]);
        const Spectrum b = NL(tmp);
        for (size_t m = 0; m < nb; ++m) tmp[m] = E2[m] * V[m] + 0.5 * b[m];
        const Spectrum c = NL(tmp);
        for (size_t m = 0; m < nb; ++m) tmp[m] = E[m] * V[m] + E2[m] * c[m];
        const Spectrum d = NL(tmp);
        for (size_t m = 0; m < nb; ++m)
            V[m] = E[m] * V[m] + (E[m] * a[m] + 2.0 * E2[m] * (b[m] + c[m]) + d[m]) / 6.0;
        GridField g = GridField::from_spectrum(N, P, V);
        for (double x : g.samples())
            if (!std::isfinite(x)) fail("Unstable", "non-finite value at step " + std::to_string(n));
        if (g.max_abs() > o.blowup) fail("BlowupDetected", "field norm above threshold at step " + std::to_string(n));
        if (n == steps || (o.snapshot_every > 0 && n % o.snapshot_every == 0)) {
            tr.t.push_back(h * static_cast<double>(n));
            tr.frames.push_back(std::move(g));
        }
    }
    return tr;
}

GridField evolve(const CompiledRHS& f, const GridField& ic, double T, double dt, const EvolveOptions& o) {
    return trajectory(f, ic, T, dt, o).last();
}

namespace {
CompiledRHS compile_flow(const NamedEquation& flow, const EvolveOptions& o) {
    if (flow.flow == 0) fail("InvalidSpec", flow.name + " is not an evolution equation");
    return compile(flow.rhs(), key_family(flow.flow), o.bind);
}
}  // namespace

GridField evolve(const NamedEquation& flow, const GridField& ic, double T, double dt, const EvolveOptions& o) {
    return evolve(compile_flow(flow, o), ic, T, dt, o);
}

Trajectory trajectory(const NamedEquation& flow, const GridField& ic, double T, double dt, const EvolveOptions& o) {
    return trajectory(compile_flow(flow, o), ic, T, dt, o);
}

double Soliton::exact(double x, double t) const {
    if (c == 0) return 0;
    const double P = ic.P();
    double xi = x - x0 + 0.25 * c * t;
    xi -= P * std::floor((xi + 0.5 * P) / P);
    const double s = 1 / std::cosh(0.5 * std::sqrt(c) * xi);
    return 0.25 * c * s * s;
}

GridField Soliton::at(double t) const {
    return GridField::sample(ic.N(), ic.P(), [this, t](double x) { return exact(x, t); });
}

double Soliton::peak(double t) const {
    const double P = ic.P();
    double p = x0 - 0.25 * c * t;
    p -= P * std::floor((p + 0.5 * P) / P);
    return p;
}

Soliton soliton_ic(double c, double x0, int N, double P) {
    if (!(c >= 0)) fail("InvalidSpec", "soliton speed must be non-negative");
    GridField zero(N, P);
    if (c > 0) {
        const double s = 1 / std::cosh(0.25 * std::sqrt(c) * P);
        if (s * s > 1e-8) fail("PeriodTooSmall", "sech^2 tail at the boundary exceeds 1e-8 of the peak");
    }
    Soliton sol{c, x0, zero};
    sol.ic = sol.at(0);
    return sol;
}

std::vector<int> conserved_lenard_indices() { return {0, 1, 2}; }

std::vector<ConservedRow> conserved_report(const Trajectory& tr) {
    std::vector<std::pair<std::string, CompiledRHS>> dens;
    dens.emplace_back("mass", compile(tau("v"), "v"));
    dens.emplace_back("momentum", compile(tau("v^2"), "v"));
    for (int k = 0; k <= 2; ++k) dens.emplace_back("lenard(" + std::to_string(k) + ")", compile(lenard(k), "v"));
    std::vector<ConservedRow> rows;
    for (const auto& [name, f] : dens) {
        ConservedRow r{name, {}, 0};
        for (const GridField& g : tr.frames) r.values.push_back(f(g).integral());
        const double h0 = r.values.empty() ? 0 : r.values.front();
        for (double h : r.values) r.drift = std::max(r.drift, std::abs(h - h0));
        if (h0 != 0) r.drift /= std::abs(h0);
        rows.push_back(std::move(r));
    }
    return rows;
}

GridField miura_map(const GridField& q, double c) {
    return compile(tau("1/2*c*q_1 - 1/2*c^2*q_0^2"), "q", {{"c", c}})(q);
}

MiuraReport miura_numeric(const GridField& q0, double c, double T, double dt, const Registry& reg) {
    const MiuraCoefficient mc = miura_coefficient(reg);
    const DiffPoly qflow = Scalar(mc.ratio) * tau("c^2*q_0^2*q_1") + Scalar(mc.third) * tau("q_3");
    const CompiledRHS fq = compile(qflow, "q", {{"c", c}});
    const CompiledRHS fv = compile(reg.at("kdv1").rhs(), "v");
    MiuraReport r{mc.ratio.get_d(), mc.third.get_d(), q0, q0, 0, 0};
    r.from_q = miura_map(evolve(fq, q0, T, dt), c);
    r.direct = evolve(fv, miura_map(q0, c), T, dt);
    r.discrepancy = l2_distance(r.from_q, r.direct);
    const double n = r.direct.l2();
    r.relative = n > 0 ? r.discrepancy / n : r.discrepancy;
    return r;
}

}  // namespace kdvw
