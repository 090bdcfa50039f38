#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvw/diffpoly.hpp"
#include "kdvw/registry.hpp"

namespace kdvw {

using Spectrum = std::vector<std::complex<double>>;

// Real samples at x_j = -P/2 + j P/N, N a power of two >= 32.
class GridField {
public:
    GridField(int N, double P);  // zero field; BadGrid on invalid N or P
    GridField(int N, double P, std::vector<double> samples);
    static GridField sample(int N, double P, const std::function<double(double)>& f);
    static GridField from_spectrum(int N, double P, const Spectrum& s);

    int N() const { return n_; }
    double P() const { return p_; }
    double x(int j) const { return -0.5 * p_ + p_ * j / n_; }
    const std::vector<double>& samples() const { return v_; }
    double operator[](int j) const { return v_[static_cast<size_t>(j)]; }
    void set(int j, double v);
    void assign(std::vector<double> v);

    // r2c coefficients (N/2 + 1 bins), computed on first use
    const Spectrum& spectrum() const;
    // n-th spectral derivative
    GridField derivative(int n) const;
    // trigonometric interpolant (or its n-th derivative) at any x
    double interpolate(double x, int n = 0) const;

    double integral() const;  // P/N sum v
    double l2() const;        // sqrt(P/N sum v^2)
    double max_abs() const;

private:
    int n_;
    double p_;
    std::vector<double> v_;
    mutable std::optional<Spectrum> cache_;
};

double l2_distance(const GridField& a, const GridField& b);

// wavenumber of r2c bin m
inline double wavenumber(int m, double P) { return 2 * 3.14159265358979323846 * m / P; }
// bins kept by the 2/3 rule: m < N/3
inline int dealias_cutoff(int N) { return (N - 1) / 3; }

struct PlanStep {
    enum class Op { Constant, Derivative, Product, Scale, Sum };
    Op op;
    int a = 0, b = 0;  // input registers (Derivative reads the field itself)
    int order = 0;     // Derivative
    double c = 0;      // Constant, Scale
};

// Pointwise evaluation plan for a differential polynomial in one jet family.
// Registers are appended one per step; the last one is the result (an empty
// plan is the zero field).
struct CompiledRHS {
    std::string source;
    std::vector<PlanStep> steps;
    std::map<int, double> linear;     // degree-one part: coefficient of D^n v
    std::vector<PlanStep> nonlinear;  // everything else, same register convention
    struct Monomial {
        double coeff;
        std::vector<std::pair<int, int>> factors;  // (derivative order, exponent)
    };
    std::vector<Monomial> nonlinear_terms;
    int top_order = 0;

    GridField operator()(const GridField& v) const;
    GridField eval_nonlinear(const GridField& v) const;
    std::complex<double> symbol(double k) const;  // sum_n a_n (ik)^n
    std::string str() const;
};

// UnsupportedTerm for mixed families, non-spatial derivatives, complex or
// irrational-imaginary coefficients, and constants missing from bind.
CompiledRHS compile(const DiffPoly& p, int family, const std::map<std::string, double>& bind = {});
CompiledRHS compile(const DiffPoly& p, const std::string& family, const std::map<std::string, double>& bind = {});

struct EvolveOptions {
    std::map<std::string, double> bind;
    double blowup = 1e8;     // BlowupDetected once max |v| exceeds this
    int snapshot_every = 0;  // steps between stored frames (0: first and last only)
};

struct Trajectory {
    std::vector<double> t;
    std::vector<GridField> frames;
    const GridField& last() const { return frames.back(); }
};

// RK4 stability bound for the nonlinear stage at this field (dt must stay below it).
double stable_dt(const CompiledRHS& f, const GridField& v);
// conservative defaults by top derivative order (3, 5, 7)
double default_dt(int top_order);

Trajectory trajectory(const CompiledRHS& f, const GridField& ic, double T, double dt, const EvolveOptions& o = {});
GridField evolve(const CompiledRHS& f, const GridField& ic, double T, double dt, const EvolveOptions& o = {});
// flow must be an evolution entry whose rhs lives in the flow's own jet family
GridField evolve(const NamedEquation& flow, const GridField& ic, double T, double dt, const EvolveOptions& o = {});
Trajectory trajectory(const NamedEquation& flow, const GridField& ic, double T, double dt,
                      const EvolveOptions& o = {});

// v(x, t) = (c/4) sech^2((sqrt c / 2)(x - x0 + (c/4) t)) for v_t = (1/4)v''' + 3vv'
struct Soliton {
    double c, x0;
    GridField ic;
    double exact(double x, double t) const;  // nearest periodic image
    GridField at(double t) const;
    double peak(double t) const;  // x0 - c t / 4, wrapped into the period
};
// PeriodTooSmall when the boundary tail exceeds 1e-8 of the peak.
Soliton soliton_ic(double c, double x0, int N = 512, double P = 40);

// Densities whose integral is conserved along kdv1 (checked by a drift oracle).
std::vector<int> conserved_lenard_indices();
struct ConservedRow {
    std::string density;
    std::vector<double> values;  // per frame
    double drift;                // max |H(t) - H(0)| / max(|H(0)|, tiny)
};
// mass, momentum (v^2) and the Lenard densities lenard(k), k = 0..2
std::vector<ConservedRow> conserved_report(const Trajectory& tr);

struct MiuraReport {
    double ratio, third;  // q flow coefficients used
    GridField from_q;     // (c/2)q' - (c^2/2)q^2 at T
    GridField direct;     // kdv1 evolution of the same map at 0
    double discrepancy;   // L2
    double relative;
};
// q_t3 = ratio c^2 q^2 q' + third q''' with ratio, third taken from the registry
MiuraReport miura_numeric(const GridField& q0, double c, double T, double dt, const Registry& reg = Registry::paper());
GridField miura_map(const GridField& q, double c);

}  // namespace kdvw
