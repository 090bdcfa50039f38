#include "kdvw/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "kdvw/error.hpp"
#include "kdvw/specfun.hpp"

namespace kdvw {

Kernel integrable_kernel(std::string name, std::function<double(double)> phi1, std::function<double(double)> phi2,
                         std::function<double(double)> dphi1, std::function<double(double)> dphi2) {
    Kernel k;
    k.name = std::move(name);
    k.off = [phi1, phi2](double l, double m) { return (phi1(l) * phi2(m) - phi2(l) * phi1(m)) / (l - m); };
    k.diag = [phi1, phi2, dphi1, dphi2](double l) { return dphi1(l) * phi2(l) - dphi2(l) * phi1(l); };
    return k;
}

Kernel airy_kernel() {
    Kernel k;
    k.name = "airy";
    k.off = [](double l, double m) {
        const Airy a = airy(l), b = airy(m);
        return (a.ai * b.aip - a.aip * b.ai) / (l - m);
    };
    k.diag = [](double l) {
        const Airy a = airy(l);
        return a.aip * a.aip - l * a.ai * a.ai;
    };
    return k;
}

Quadrature gauss_legendre(int m, double a, double b) {
    if (m < 1) fail("BadWindow", "need at least one node");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1);
        J(k, k - 1) = J(k - 1, k) = beta;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Quadrature q;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        const double v = es.eigenvectors()(0, i);
        q.x.push_back(c + h * es.eigenvalues()(i));
        q.w.push_back(2 * v * v * h);
    }
    return q;
}

ThinningMap thinning_from_tau(const TauVars& t) {
    const PIVars p = from_tau(t);
    return {std::pow(p.s0, 2.0 / 7), p.s1 * std::pow(p.s0, -5.0 / 7)};
}

namespace {

Quadrature panels(const SigmaFn& sigma, const Window& w, const ThinningMap& t) {
    if (w.m < 4) fail("BadWindow", "m must be at least 4");
    if (!(w.L > 0)) fail("BadWindow", "L must be positive");
    if (!(t.scale > 0)) fail("BadWindow", "thinning scale must be positive");
    std::vector<double> cuts{w.s};
    for (const double r : sigma.jumps) {
        const double x = t.shift + t.scale * r;
        if (x > w.s && x < w.s + w.L) cuts.push_back(x);
    }
    cuts.push_back(w.s + w.L);
    std::sort(cuts.begin(), cuts.end());
    Quadrature all;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-14) continue;
        const Quadrature p = gauss_legendre(w.m, cuts[i], cuts[i + 1]);
        all.x.insert(all.x.end(), p.x.begin(), p.x.end());
        all.w.insert(all.w.end(), p.w.begin(), p.w.end());
    }
    return all;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

QuadOperator build_operator(const Kernel& k, const SigmaFn& sigma, const Window& w, const ThinningMap& t) {
    QuadOperator op;
    op.q = panels(sigma, w, t);
    const size_t n = op.q.x.size();
    std::vector<double> root(n);
    for (size_t i = 0; i < n; ++i) {
        op.sigma.push_back(sigma((op.q.x[i] - t.shift) / t.scale));
        root[i] = std::sqrt(op.q.w[i] * op.sigma[i]);
    }
    op.A = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
    for (size_t i = 0; i < n; ++i) {
        if (root[i] == 0) continue;
        for (size_t j = i; j < n; ++j) {
            if (root[j] == 0) continue;
            const double v = root[i] * k(op.q.x[i], op.q.x[j]) * root[j];
            op.A(static_cast<long>(i), static_cast<long>(j)) = v;
            op.A(static_cast<long>(j), static_cast<long>(i)) = v;
        }
    }
    return op;
}

QuadOperator build_operator(const Kernel& k, const SigmaFn& sigma, const Window& w) {
    return build_operator(k, sigma, w, ThinningMap{1, w.s});
}

std::pair<double, double> spectrum_range(const QuadOperator& op) {
    if (op.A.size() == 0) return {0, 0};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.A, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double det(const QuadOperator& op) {
    const long n = op.A.rows();
    if (n == 0) return 1;
    const auto [lo, hi] = spectrum_range(op);
    if (!(hi < 1) || lo < -1e-10)
        fail("SpectrumViolation", "operator eigenvalues in [" + num(lo) + ", " + num(hi) + "]");
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - op.A;
    const double d = Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
    if (!(d > 0) || d > 1 + 1e-12) fail("SpectrumViolation", "determinant " + num(d) + " outside (0, 1]");
    return d;
}

double det_series_oracle(const Kernel& k, const SigmaFn& sigma, const Window& w, const ThinningMap& t, int order) {
    if (order < 0 || order > 3) fail("BadWindow", "series order must be 0..3");
    const Quadrature q = panels(sigma, w, t);
    const size_t n = q.x.size();
    std::vector<double> om(n);
    for (size_t i = 0; i < n; ++i) om[i] = q.w[i] * sigma((q.x[i] - t.shift) / t.scale);
    std::vector<std::vector<double>> K(n, std::vector<double>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) K[i][j] = k(q.x[i], q.x[j]);
    double e1 = 0, e2 = 0, e3 = 0;
    for (size_t i = 0; i < n; ++i) e1 += om[i] * K[i][i];
    if (order >= 2)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) e2 += om[i] * om[j] * (K[i][i] * K[j][j] - K[i][j] * K[j][i]);
    if (order >= 3)
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                for (size_t l = 0; l < n; ++l) {
                    const double d3 = K[i][i] * (K[j][j] * K[l][l] - K[j][l] * K[l][j]) -
                                      K[i][j] * (K[j][i] * K[l][l] - K[j][l] * K[l][i]) +
                                      K[i][l] * (K[j][i] * K[l][j] - K[j][j] * K[l][i]);
                    e3 += om[i] * om[j] * om[l] * d3;
                }
    double out = 1;
    if (order >= 1) out -= e1;
    if (order >= 2) out += e2 / 2;
    if (order >= 3) out -= e3 / 6;
    return out;
}

double resolvent_trace(const Eigen::MatrixXd& A, const Eigen::MatrixXd& dA) {
    const long n = A.rows();
    const Eigen::MatrixXd X = Eigen::PartialPivLU<Eigen::MatrixXd>(Eigen::MatrixXd::Identity(n, n) - A).solve(dA);
    return X.trace();
}

Eigen::MatrixXd airy_shift_derivative(const QuadOperator& op) {
    const long n = static_cast<long>(op.q.x.size());
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i) {
        if (op.sigma[static_cast<size_t>(i)] != 1) fail("BadWindow", "shift derivative needs indicator thinning");
        v(i) = std::sqrt(op.q.w[static_cast<size_t>(i)]) * airy(op.q.x[static_cast<size_t>(i)]).ai;
    }
    return -v * v.transpose();
}

double sigma_floor(const SigmaFn& s) {
    const double step = 0.01;
    double floor = -20;
    for (double r = -20; r <= 20; r += step) {
        if (s(r) > 1e-18) break;
        floor = r;
    }
    for (const double j : s.jumps)
        if (j >= floor && j <= floor + step) return j;
    return floor;
}

std::vector<SweepRow> q_sweep(const Kernel& k, const SigmaFn& sigma, const std::vector<double>& s_grid, double L,
                              int m, double scale, double tol) {
    std::vector<SweepRow> rows;
    const double lo = sigma_floor(sigma);
    for (const double s : s_grid) {
        SweepRow r{s, m, L, sigma.iota, std::numeric_limits<double>::quiet_NaN(), false, ""};
        try {
            const ThinningMap t{scale, s};
            const Window w{s + scale * lo, L, m};
            const double a = det(build_operator(k, sigma, w, t));
            const double b = det(build_operator(k, sigma, Window{w.s, L, 2 * m}, t));
            r.Q = a;
            r.converged = std::abs(a - b) <= tol;
            if (!r.converged) r.note = "m vs 2m differ by " + num(std::abs(a - b));
        } catch (const Error& e) {
            r.note = e.kind();
        }
        rows.push_back(r);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "s,m,L,iota,Q,converged\n";
    for (const SweepRow& r : rows)
        o << num(r.s) << ',' << r.m << ',' << num(r.L) << ',' << num(r.iota) << ',' << num(r.Q) << ','
          << (r.converged ? "true" : "false") << '\n';
    return o.str();
}

}  // namespace kdvw
