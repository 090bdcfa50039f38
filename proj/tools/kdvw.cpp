// kdvw: command-line front end. Every invocation is first turned into a job
// spec {command, params, format, output}; --config runs a stored spec and
// --print-spec prints the canonical spec instead of running it.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "kdvw/certify.hpp"
#include "kdvw/coords.hpp"
#include "kdvw/error.hpp"
#include "kdvw/fredholm.hpp"
#include "kdvw/hierarchy.hpp"
#include "kdvw/kdvnum.hpp"
#include "kdvw/rings.hpp"
#include "kdvw/sigma.hpp"
#include "kdvw/specfun.hpp"

using nlohmann::json;
using namespace kdvw;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCertification = 3;

struct Invalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// i: integer, d: real, s: string, l: list of reals, w: list of words
struct Param {
    std::string name;
    char type;
    json def;
    std::vector<std::string> choices;
    std::string help;
};

struct Result {
    std::string text;
    int code = 0;
};

struct Command {
    std::string name;  // "fredholm det"
    std::string help;
    std::vector<Param> params;
    std::vector<std::string> formats;  // first is the default
    std::function<Result(const json&, const std::string&)> run;
};

std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

json parse_value(const Param& p, const std::string& s) {
    try {
        size_t used = 0;
        switch (p.type) {
            case 'i': {
                const long v = std::stol(s, &used);
                if (used != s.size()) throw Invalid("");
                return v;
            }
            case 'd': {
                const double v = std::stod(s, &used);
                if (used != s.size()) throw Invalid("");
                return v;
            }
            case 'l': {
                json a = json::array();
                std::stringstream in(s);
                std::string item;
                while (std::getline(in, item, ','))
                    if (!item.empty()) {
                        const double v = std::stod(item, &used);
                        if (used != item.size()) throw Invalid("");
                        a.push_back(v);
                    }
                return a;
            }
            case 'w': {
                json a = json::array();
                std::stringstream in(s);
                std::string item;
                while (std::getline(in, item, ','))
                    if (!item.empty()) a.push_back(item);
                return a;
            }
            default:
                return s;
        }
    } catch (const std::logic_error&) {
        throw Invalid("--" + p.name + ": cannot read '" + s + "'");
    } catch (const Invalid&) {
        throw Invalid("--" + p.name + ": cannot read '" + s + "'");
    }
}

bool type_ok(const Param& p, const json& v) {
    switch (p.type) {
        case 'i': return v.is_number_integer();
        case 'd': return v.is_number();
        case 'l':
            if (!v.is_array()) return false;
            for (const json& x : v)
                if (!x.is_number()) return false;
            return true;
        case 'w':
            if (!v.is_array()) return false;
            for (const json& x : v)
                if (!x.is_string()) return false;
            return true;
        default: return v.is_string();
    }
}

// Fill defaults, reject unknown names, wrong types and values outside the choices.
json canonical_params(const Command& c, const json& given) {
    if (!given.is_object()) throw Invalid("params must be an object");
    json out = json::object();
    for (auto it = given.begin(); it != given.end(); ++it) {
        bool known = false;
        for (const Param& p : c.params) known = known || p.name == it.key();
        if (!known) throw Invalid(c.name + ": unknown parameter '" + it.key() + "'");
    }
    for (const Param& p : c.params) {
        json v = given.contains(p.name) ? given.at(p.name) : p.def;
        if (v.is_null()) throw Invalid(c.name + ": --" + p.name + " is required");
        if (!type_ok(p, v)) throw Invalid(c.name + ": --" + p.name + " has the wrong type");
        if (p.type == 'd') v = v.get<double>();
        if (!p.choices.empty()) {
            bool ok = false;
            for (const std::string& ch : p.choices) ok = ok || v.get<std::string>() == ch;
            if (!ok) throw Invalid(c.name + ": --" + p.name + " must be one of its listed values");
        }
        out[p.name] = v;
    }
    return out;
}

// ---- polynomial JSON ------------------------------------------------------------

json rational_json(const Rational& q) { return q.get_str(); }

json poly_json(const DiffPoly& p) {
    json mons = json::array();
    for (const auto& [m, c] : p.terms()) {
        json fs = json::array();
        for (const Factor& f : m.f) {
            const Family& F = p.ring()->fam(key_family(f.key));
            json e{{"gen", F.name}, {"order", key_order(f.key)}, {"exp", f.exp}};
            std::vector<int> alpha;
            bool mixed = false;
            for (int i = 1; i < static_cast<int>(p.ring()->coords().size()); ++i) {
                alpha.push_back(key_index(f.key, i));
                mixed = mixed || alpha.back() != 0;
            }
            if (mixed) e["alpha"] = alpha;
            fs.push_back(e);
        }
        mons.push_back({{"factors", fs},
                        {"coeff", {{"a", rational_json(c.a())}, {"b", rational_json(c.b())},
                                   {"c", rational_json(c.c())}, {"d", rational_json(c.d())}}}});
    }
    return {{"monomials", mons}};
}

// ---- shared builders ----------------------------------------------------------------

const std::vector<Param> sigma_params{
    {"sigma", 's', "heaviside", {"heaviside", "gumbel_cubic", "piecewise"}, "thinning family"},
    {"iota", 'd', 1.0, {}, "limit of sigma at +infinity"},
    {"shift", 'd', 0.0, {}, "heaviside jump location"},
    {"jumps", 'l', json::array(), {}, "piecewise jump locations"},
    {"values", 'l', json::array(), {}, "piecewise values, one more than jumps"},
};

SigmaFn sigma_of(const json& p) {
    json spec{{"family", p.at("sigma")}, {"iota", p.at("iota")}, {"params", json::object()}};
    if (p.at("sigma") == "heaviside") spec["params"]["shift"] = p.at("shift");
    if (p.at("sigma") == "piecewise") {
        spec["params"]["jumps"] = p.at("jumps");
        spec["params"]["values"] = p.at("values");
    }
    return sigma_from_json(spec);
}

std::vector<Param> with_sigma(std::vector<Param> ps) {
    ps.insert(ps.end(), sigma_params.begin(), sigma_params.end());
    return ps;
}

std::string certificates_text(const std::vector<CertifiedCheck>& checks) {
    std::ostringstream o;
    for (const CertifiedCheck& c : checks) {
        o << (c.cert.pass ? "PASS " : "FAIL ") << c.group << ": " << c.cert.claim;
        if (c.cert.multiplier) o << " [multiplier " << *c.cert.multiplier << "]";
        o << '\n';
        if (!c.cert.pass) {
            o << "  residual: " << c.cert.residual << '\n';
            if (!c.cert.detail.empty()) o << "  detail: " << c.cert.detail << '\n';
        }
    }
    return o.str();
}

json certificate_record(const CertifiedCheck& c) {
    json j{{"group", c.group}, {"claim", c.cert.claim}, {"residual", c.cert.residual},
           {"status", c.cert.pass ? "PASS" : "FAIL"}, {"deps", c.cert.deps}};
    if (c.cert.multiplier) j["multiplier"] = *c.cert.multiplier;
    if (!c.cert.location.empty()) j["location"] = c.cert.location;
    if (!c.cert.detail.empty()) j["detail"] = c.cert.detail;
    return j;
}

std::vector<SweepRow> sweep_parallel(const SigmaFn& sg, const std::vector<double>& grid, double L, int m,
                                     double scale) {
    unsigned threads = 1;
    if (const char* e = std::getenv("KDVW_THREADS")) threads = static_cast<unsigned>(std::max(1, std::atoi(e)));
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<size_t>(grid.size(), 1)));
    const Kernel k = airy_kernel();
    std::vector<std::vector<SweepRow>> parts(threads);
    std::vector<std::thread> pool;
    const size_t chunk = (grid.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            const size_t lo = std::min(grid.size(), t * chunk), hi = std::min(grid.size(), lo + chunk);
            parts[t] = q_sweep(k, sg, std::vector<double>(grid.begin() + static_cast<long>(lo), grid.begin() + static_cast<long>(hi)), L, m, scale);
        });
    for (std::thread& th : pool) th.join();
    std::vector<SweepRow> rows;
    for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
    return rows;
}

Result rows_out(const std::vector<SweepRow>& rows, const std::string& fmt) {
    if (fmt == "csv") return {sweep_csv(rows)};
    json a = json::array();
    for (const SweepRow& r : rows) {
        json e{{"s", r.s}, {"m", r.m}, {"L", r.L}, {"iota", r.iota}, {"converged", r.converged}};
        e["Q"] = std::isfinite(r.Q) ? json(r.Q) : json(nullptr);
        if (!r.note.empty()) e["note"] = r.note;
        a.push_back(e);
    }
    return {a.dump(2) + "\n"};
}

GridField random_band_limited(int N, double P, int modes, double amp, unsigned seed) {
    std::mt19937 g(seed);
    std::normal_distribution<double> nd;
    std::vector<double> a(static_cast<size_t>(modes + 1)), b(a.size());
    for (int m = 1; m <= modes; ++m) {
        a[static_cast<size_t>(m)] = nd(g) * amp / m;
        b[static_cast<size_t>(m)] = nd(g) * amp / m;
    }
    const double k = 2 * std::numbers::pi / P;
    return GridField::sample(N, P, [&](double x) {
        double v = 0;
        for (int m = 1; m <= modes; ++m)
            v += a[static_cast<size_t>(m)] * std::cos(m * k * x) + b[static_cast<size_t>(m)] * std::sin(m * k * x);
        return v;
    });
}

double crest(const GridField& g) {
    int j = 0;
    for (int i = 0; i < g.N(); ++i)
        if (g[i] > g[j]) j = i;
    double x = g.x(j);
    for (int i = 0; i < 30; ++i) x -= g.interpolate(x, 1) / g.interpolate(x, 2);
    return x;
}

std::string kv_text(const json& j) {
    std::ostringstream o;
    for (auto it = j.begin(); it != j.end(); ++it) o << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
    return o.str();
}

// ---- commands ------------------------------------------------------------------------

Result run_derive(const json& p, const std::string& fmt) {
    const std::string h = p.at("hierarchy");
    const int k = p.at("k");
    const int lo = h == "lenard" ? 0 : 1;
    if (k < lo || k > kLenardDepth) throw Invalid("--k out of range");
    std::string name, lhs;
    DiffPoly rhs;
    const std::string t = "t" + std::to_string(2 * k + 1);
    if (h == "kdv") {
        name = "kdv" + std::to_string(k);
        lhs = "v_" + t;
        rhs = kdv_rhs(k);
    } else if (h == "pkdv") {
        name = "pkdv" + std::to_string(k);
        lhs = "u_" + t;
        rhs = pkdv_rhs(k);
    } else {
        name = "R" + std::to_string(2 * k + 1);
        lhs = "R_" + std::to_string(2 * k + 1);
        rhs = lenard(k);
    }
    const std::string text = lhs + " = " + rhs.str();
    if (fmt == "text") return {text + "\n"};
    json j{{"name", name}, {"lhs", lhs}, {"text", text}, {"rhs", poly_json(rhs)}};
    const Registry& reg = Registry::paper();
    j["citation"] = reg.has(name) ? reg.at(name).citation : "";
    j["matches_registry"] = reg.has(name) ? json(reg.at(name).rhs() == rhs) : json(nullptr);
    return {j.dump(2) + "\n"};
}

std::string section_group(const std::string& s) {
    if (s == "3") return "zero-curvature";
    if (s == "appendix-a") return "x-series";
    if (s == "appendix-b") return "pi-lax";
    return s;
}

Result certify_out(const CertifySummary& s, const std::string& fmt) {
    Result r;
    r.code = s.ok() ? 0 : kExitCertification;
    if (fmt == "json") {
        json j{{"passed", s.passed}, {"failed", s.failed}, {"culprits", s.culprits}, {"notes", s.notes}};
        json a = json::array();
        for (const CertifiedCheck& c : s.checks) a.push_back(certificate_record(c));
        j["certificates"] = a;
        r.text = j.dump(2) + "\n";
    } else {
        std::ostringstream o;
        o << certificates_text(s.checks);
        for (const std::string& n : s.notes) o << "note: " << n << '\n';
        o << "passed " << s.passed << " failed " << s.failed << '\n';
        if (!s.culprits.empty()) {
            o << "culprits:";
            for (const std::string& c : s.culprits) o << ' ' << c;
            o << '\n';
        }
        r.text = o.str();
    }
    return r;
}

Result run_lax(const json& p, const std::string& fmt) {
    return certify_out(certify_all(Registry::paper(), {section_group(p.at("section"))}), fmt);
}

Result run_certify(const json& p, const std::string& fmt) {
    std::set<std::string> groups;
    for (const json& g : p.at("groups")) {
        const std::string name = g;
        const auto& all = certify_groups();
        if (name == "all") groups.insert(all.begin(), all.end());
        else if (std::find(all.begin(), all.end(), name) != all.end()) groups.insert(name);
        else throw Invalid("certify all: unknown group '" + name + "'");
    }
    const std::string corrupt = p.at("corrupt");
    if (corrupt.empty()) return certify_out(certify_all(Registry::paper(), groups), fmt);
    // entry:part:term
    std::stringstream in(corrupt);
    std::string entry, part, term;
    std::getline(in, entry, ':');
    std::getline(in, part, ':');
    std::getline(in, term, ':');
    CoefficientSite site;
    try {
        site = {entry, std::stoul(part), std::stoul(term)};
    } catch (const std::logic_error&) {
        throw Invalid("--corrupt expects entry:part:term");
    }
    bool found = false;
    for (const CoefficientSite& s : Registry::paper().sites())
        found = found || (s.entry == site.entry && s.part == site.part && s.term == site.term);
    if (!found) throw Invalid("--corrupt names no coefficient of the registry");
    const Registry bad = Registry::paper().corrupted(site);
    return certify_out(certify_all(bad, groups), fmt);
}

Result run_coords(const json& p, const std::string& fmt) {
    const std::vector<double> v = p.at("values");
    if (v.size() != 4) throw Invalid("--values needs four numbers");
    json in, out;
    TauVars t;
    if (p.at("from") == "pi") {
        const PIVars a{v[0], v[1], v[2], v[3]};
        t = to_tau(a);
        in = {{"t0", a.t0}, {"t1", a.t1}, {"s0", a.s0}, {"s1", a.s1}};
        out = {{"tau1", t.tau1}, {"tau3", t.tau3}, {"tau5", t.tau5}, {"tau7", t.tau7}};
    } else {
        t = {v[0], v[1], v[2], v[3]};
        const PIVars a = from_tau(t);
        in = {{"tau1", t.tau1}, {"tau3", t.tau3}, {"tau5", t.tau5}, {"tau7", t.tau7}};
        out = {{"t0", a.t0}, {"t1", a.t1}, {"s0", a.s0}, {"s1", a.s1}};
    }
    const json j{{"input", in}, {"output", out}, {"regime", regime_name(regime_classify(t))}};
    if (fmt == "text") return {kv_text(j)};
    return {j.dump(2) + "\n"};
}

Result run_sigma(const json& p, const std::string& fmt) {
    const SigmaFn s = sigma_of(p);
    const ValidationReport r = validate(s);
    json j = r.to_json();
    if (s.iota == 1 && r.assumption1 && r.assumption2) j["m0"] = m0(s);
    Result out{fmt == "json" ? j.dump(2) + "\n" : kv_text(j)};
    out.code = r.assumption1 && r.assumption2 ? 0 : kExitInvalid;
    return out;
}

Result run_fredholm_det(const json& p, const std::string& fmt) {
    const int m = p.at("m");
    return rows_out(sweep_parallel(sigma_of(p), {p.at("s").get<double>()}, p.at("L"), m, p.at("scale")), fmt);
}

Result run_fredholm_sweep(const json& p, const std::string& fmt) {
    std::vector<double> grid = p.at("grid");
    if (grid.empty()) {
        const double a = p.at("from"), b = p.at("to"), h = p.at("step");
        if (!(h > 0) || b < a) throw Invalid("sweep needs from <= to and step > 0");
        const long n = static_cast<long>(std::floor((b - a) / h + 1e-9));
        for (long i = 0; i <= n; ++i) grid.push_back(a + h * static_cast<double>(i));
    }
    return rows_out(sweep_parallel(sigma_of(p), grid, p.at("L"), p.at("m"), p.at("scale")), fmt);
}

Result run_kdv_evolve(const json& p, const std::string& fmt) {
    const std::string eq = p.at("equation");
    const Registry& reg = Registry::paper();
    if (!reg.has(eq) || reg.at(eq).flow == 0) throw Invalid("--equation must name an evolution entry");
    const NamedEquation& flow = reg.at(eq);
    const int N = p.at("N");
    const double P = p.at("P");
    const std::string ic = p.at("ic");
    GridField g(N, P);
    if (ic == "soliton") g = soliton_ic(p.at("c"), p.at("x0"), N, P).ic;
    else if (ic == "cosine") g = GridField::sample(N, P, [&](double x) { return p.at("amplitude").get<double>() * std::cos(2 * std::numbers::pi * x / P); });
    const CompiledRHS f = compile(flow.rhs(), key_family(flow.flow));
    double dt = p.at("dt");
    if (dt == 0) dt = default_dt(f.top_order);
    EvolveOptions o;
    o.snapshot_every = p.at("report-every");
    const Trajectory tr = trajectory(f, g, p.at("T"), dt, o);
    const std::string cons = p.at("conservation");
    std::vector<ConservedRow> rows;
    const bool kdv_family = flow.rhs().ring() == &tau_ring() && key_family(flow.flow) == tau_ring().family("v");
    if (kdv_family) rows = conserved_report(tr);
    if (!cons.empty()) {
        if (!kdv_family) throw Invalid("--conservation needs a flow of v");
        std::ofstream c(cons);
        c << "t";
        for (const ConservedRow& r : rows) c << ',' << r.density;
        c << '\n';
        for (size_t i = 0; i < tr.t.size(); ++i) {
            c << num(tr.t[i]);
            for (const ConservedRow& r : rows) c << ',' << num(r.values[i]);
            c << '\n';
        }
        if (!c) throw Invalid("cannot write " + cons);
    }
    if (fmt == "csv") {
        std::ostringstream o2;
        o2 << "x,v\n";
        const GridField& last = tr.last();
        for (int j = 0; j < N; ++j) o2 << num(last.x(j)) << ',' << num(last[j]) << '\n';
        return {o2.str()};
    }
    json j{{"equation", eq}, {"N", N}, {"P", P}, {"dt", dt}, {"T", p.at("T")}, {"t", tr.t}};
    json d = json::object();
    for (const ConservedRow& r : rows) d[r.density] = r.drift;
    j["drift"] = d;
    j["max_abs"] = tr.last().max_abs();
    return {j.dump(2) + "\n"};
}

Result run_kdv_soliton(const json& p, const std::string& fmt) {
    const Soliton s = soliton_ic(p.at("c"), p.at("x0"), p.at("N"), p.at("P"));
    const double T = p.at("T");
    const Trajectory tr = trajectory(Registry::paper().at("kdv1"), s.ic, T, p.at("dt"));
    const GridField ex = s.at(T);
    const auto rows = conserved_report(tr);
    json j{{"c", s.c}, {"x0", s.x0}, {"T", T}};
    j["relative_l2"] = ex.l2() > 0 ? l2_distance(tr.last(), ex) / ex.l2() : l2_distance(tr.last(), ex);
    j["peak_expected"] = s.peak(T);
    if (s.c > 0) j["peak_observed"] = crest(tr.last());
    j["mass_drift"] = rows[0].drift;
    j["momentum_drift"] = rows[1].drift;
    if (fmt == "text") return {kv_text(j)};
    return {j.dump(2) + "\n"};
}

Result run_kdv_miura(const json& p, const std::string& fmt) {
    const GridField q = random_band_limited(p.at("N"), p.at("P"), p.at("modes"), p.at("amplitude"),
                                            static_cast<unsigned>(p.at("seed").get<long>()));
    const MiuraReport r = miura_numeric(q, p.at("c"), p.at("T"), p.at("dt"));
    const json j{{"ratio", r.ratio}, {"third", r.third}, {"discrepancy", r.discrepancy}, {"relative", r.relative}};
    if (fmt == "text") return {kv_text(j)};
    return {j.dump(2) + "\n"};
}

Result run_specfun(const json&, const std::string& fmt) {
    const auto rows = specfun_check();
    Result r;
    for (const IdentityCheck& c : rows)
        if (!c.pass) r.code = kExitCertification;
    std::ostringstream o;
    if (fmt == "json") {
        json a = json::array();
        for (const IdentityCheck& c : rows)
            a.push_back({{"name", c.name}, {"at", c.at}, {"residual", c.residual}, {"tol", c.tol}, {"pass", c.pass}});
        o << a.dump(2) << '\n';
    } else if (fmt == "csv") {
        o << "name,at,residual,tol,pass\n";
        for (const IdentityCheck& c : rows)
            o << c.name << ',' << num(c.at) << ',' << num(c.residual) << ',' << num(c.tol) << ','
              << (c.pass ? "true" : "false") << '\n';
    } else {
        for (const IdentityCheck& c : rows)
            o << (c.pass ? "PASS " : "FAIL ") << c.name << " at " << num(c.at) << ": " << num(c.residual) << " (tol "
              << num(c.tol) << ")\n";
    }
    r.text = o.str();
    return r;
}

const std::vector<Command>& commands() {
    static const std::vector<Command> cs{
        {"derive",
         "derive a hierarchy member",
         {{"hierarchy", 's', "kdv", {"kdv", "pkdv", "lenard"}, "kdv, pkdv or lenard"},
          {"k", 'i', 1, {}, "member index"}},
         {"text", "json"},
         run_derive},
        {"lax verify",
         "zero-curvature and Lax-pair certificates",
         {{"section",
           's',
           "zero-curvature",
           {"zero-curvature", "x-series", "pi-lax", "density", "3", "appendix-a", "appendix-b"},
           "zero-curvature, x-series, pi-lax or density"}},
         {"text", "json"},
         run_lax},
        {"coords map",
         "map (t0, t1, s0, s1) and (tau1, tau3, tau5, tau7)",
         {{"from", 's', "pi", {"pi", "tau"}, "input chart"}, {"values", 'l', nullptr, {}, "four comma-separated values"}},
         {"json", "text"},
         run_coords},
        {"sigma validate", "check a thinning function", sigma_params, {"json", "text"}, run_sigma},
        {"fredholm det",
         "one Fredholm determinant",
         with_sigma({{"kernel", 's', "airy", {"airy"}, "kernel"},
                     {"s", 'd', 0.0, {}, "left end of the window"},
                     {"m", 'i', 40, {}, "nodes per panel"},
                     {"L", 'd', 12.0, {}, "window length"},
                     {"scale", 'd', 1.0, {}, "thinning scale"}}),
         {"csv", "json"},
         run_fredholm_det},
        {"fredholm sweep",
         "Fredholm determinants over a grid of s",
         with_sigma({{"kernel", 's', "airy", {"airy"}, "kernel"},
                     {"grid", 'l', json::array(), {}, "explicit s values"},
                     {"from", 'd', -3.0, {}, "first s"},
                     {"to", 'd', 3.0, {}, "last s"},
                     {"step", 'd', 0.5, {}, "grid spacing"},
                     {"m", 'i', 40, {}, "nodes per panel"},
                     {"L", 'd', 12.0, {}, "window length"},
                     {"scale", 'd', 1.0, {}, "thinning scale"}}),
         {"csv", "json"},
         run_fredholm_sweep},
        {"kdv evolve",
         "evolve a registered flow on a periodic grid",
         {{"equation", 's', "kdv1", {}, "registry entry"},
          {"N", 'i', 512, {}, "grid size"},
          {"P", 'd', 40.0, {}, "period"},
          {"dt", 'd', 0.0, {}, "time step (0: default for the order)"},
          {"T", 'd', 1.0, {}, "final time"},
          {"ic", 's', "soliton", {"soliton", "zero", "cosine"}, "initial field"},
          {"c", 'd', 1.0, {}, "soliton speed parameter"},
          {"x0", 'd', 0.0, {}, "soliton centre"},
          {"amplitude", 'd', 0.1, {}, "cosine amplitude"},
          {"report-every", 'i', 0, {}, "steps between stored frames"},
          {"conservation", 's', "", {}, "conservation CSV path"}},
         {"csv", "json"},
         run_kdv_evolve},
        {"kdv soliton",
         "kdv1 soliton against the travelling wave",
         {{"c", 'd', 1.0, {}, "speed parameter"},
          {"x0", 'd', 0.0, {}, "centre"},
          {"N", 'i', 512, {}, "grid size"},
          {"P", 'd', 40.0, {}, "period"},
          {"T", 'd', 1.0, {}, "final time"},
          {"dt", 'd', 1e-3, {}, "time step"}},
         {"json", "text"},
         run_kdv_soliton},
        {"kdv miura",
         "q flow mapped to kdv1 against kdv1 directly",
         {{"seed", 'i', 7, {}, "random seed"},
          {"modes", 'i', 5, {}, "Fourier modes in q"},
          {"amplitude", 'd', 0.3, {}, "mode amplitude scale"},
          {"c", 'd', 1.0, {}, "Miura constant"},
          {"N", 'i', 512, {}, "grid size"},
          {"P", 'd', 2 * std::numbers::pi, {}, "period"},
          {"T", 'd', 0.5, {}, "final time"},
          {"dt", 'd', 0.0025, {}, "time step"}},
         {"json", "text"},
         run_kdv_miura},
        {"specfun check", "special-function identity table", {}, {"text", "json", "csv"}, run_specfun},
        {"certify all",
         "every exact certificate",
         {{"groups", 'w', json::array({"all"}), {}, "comma-separated groups (empty: none)"},
          {"corrupt", 's', "", {}, "entry:part:term coefficient to corrupt first"}},
         {"text", "json"},
         run_certify},
    };
    return cs;
}

const Command& command(const std::string& name) {
    for (const Command& c : commands())
        if (c.name == name) return c;
    throw Invalid("unknown command '" + name + "'");
}

json canonical_spec(const json& spec) {
    if (!spec.is_object() || !spec.contains("command")) throw Invalid("job spec needs a command");
    const Command& c = command(spec.at("command"));
    json out{{"command", c.name}};
    out["params"] = canonical_params(c, spec.value("params", json::object()));
    const std::string fmt = spec.contains("format") && !spec.at("format").is_null() ? spec.at("format").get<std::string>()
                                                                                      : c.formats.front();
    if (std::find(c.formats.begin(), c.formats.end(), fmt) == c.formats.end())
        throw Invalid(c.name + " does not write " + fmt);
    out["format"] = fmt;
    out["output"] = spec.value("output", "");
    return out;
}

int execute(const json& spec) {
    const Command& c = command(spec.at("command"));
    const Result r = c.run(spec.at("params"), spec.at("format"));
    const std::string path = spec.at("output");
    if (path.empty()) {
        std::cout << r.text << std::flush;
    } else {
        std::ofstream f(path);
        f << r.text;
        if (!f) throw Invalid("cannot write " + path);
    }
    return r.code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kdvw: KdV hierarchy, Lax certificates, Fredholm determinants and spectral flows"};
    app.require_subcommand(0, 1);
    std::string format, output, config;
    bool print_spec = false;
    app.add_option("--format", format, "json, csv or text (per command)");
    app.add_option("--out", output, "write the result to a file");
    app.add_option("--config", config, "run a stored job spec (JSON)");
    app.add_flag("--print-spec", print_spec, "print the canonical job spec and exit");

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, CLI::App*> leaves;
    std::map<std::string, CLI::App*> groups;
    for (const Command& c : commands()) {
        const auto space = c.name.find(' ');
        CLI::App* parent = &app;
        std::string leaf = c.name;
        if (space != std::string::npos) {
            const std::string g = c.name.substr(0, space);
            leaf = c.name.substr(space + 1);
            if (!groups.count(g)) {
                groups[g] = app.add_subcommand(g, g + " commands");
                groups[g]->require_subcommand(1);
                groups[g]->fallthrough();
            }
            parent = groups[g];
        }
        CLI::App* sub = parent->add_subcommand(leaf, c.help);
        sub->fallthrough();
        for (const Param& p : c.params) sub->add_option("--" + p.name, raw[c.name][p.name], p.help);
        leaves[c.name] = sub;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        json spec;
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw Invalid("cannot read " + config);
            try {
                spec = json::parse(in);
            } catch (const json::exception& e) {
                throw Invalid(std::string("config: ") + e.what());
            }
        } else {
            std::string chosen;
            for (const auto& [name, sub] : leaves)
                if (sub->parsed()) chosen = name;
            if (chosen.empty()) {
                std::cerr << app.help();
                return kExitUsage;
            }
            const Command& c = command(chosen);
            json params = json::object();
            for (const Param& p : c.params)
                if (leaves[chosen]->count("--" + p.name)) params[p.name] = parse_value(p, raw[chosen][p.name]);
            spec = {{"command", chosen}, {"params", params}};
        }
        if (!format.empty()) spec["format"] = format;
        if (!output.empty()) spec["output"] = output;
        spec = canonical_spec(spec);
        if (print_spec) {
            std::cout << spec.dump(2) << '\n';
            return 0;
        }
        return execute(spec);
    } catch (const Invalid& e) {
        std::cerr << "kdvw: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const Error& e) {
        std::cerr << "kdvw: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const json::exception& e) {
        std::cerr << "kdvw: " << e.what() << '\n';
        return kExitInvalid;
    }
}
