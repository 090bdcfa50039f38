#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kdvw/coords.hpp"
#include "kdvw/sigma.hpp"

namespace kdvw {

struct Kernel {
    std::string name;
    std::function<double(double, double)> off;  // lambda != mu
    std::function<double(double)> diag;
    double default_length = 12;  // window length beyond s for the declared decay

    double operator()(double l, double m) const { return l == m ? diag(l) : off(l, m); }
};

// (Ai(l) Ai'(m) - Ai'(l) Ai(m)) / (l - m), diagonal Ai'(l)^2 - l Ai(l)^2.
Kernel airy_kernel();
// (phi1(l) phi2(m) - phi2(l) phi1(m)) / (l - m) with the diagonal
// phi1'(l) phi2(l) - phi2'(l) phi1(l). Kernels printed with 1/(-2 pi i (l - m)) and
// complex phi have to be brought to this real form by the caller.
Kernel integrable_kernel(std::string name, std::function<double(double)> phi1, std::function<double(double)> phi2,
                         std::function<double(double)> dphi1, std::function<double(double)> dphi2);

// Gauss-Legendre nodes and weights on [a, b] (Golub-Welsch).
struct Quadrature {
    std::vector<double> x, w;
};
Quadrature gauss_legendre(int m, double a, double b);

// Thinning weight sigma((lambda - shift) / scale).
struct ThinningMap {
    double scale = 1, shift = 0;
};
// scale s0^(2/7), shift s1 s0^(-5/7): sigma(lambda / s0^(2/7) - s1 / s0).
ThinningMap thinning_from_tau(const TauVars& t);

struct Window {
    double s = 0;
    double L = 12;
    int m = 40;
};

struct QuadOperator {
    Quadrature q;               // all panels
    std::vector<double> sigma;  // thinning weight at the nodes
    Eigen::MatrixXd A;          // sqrt(w_i sigma_i) K(x_i, x_j) sqrt(sigma_j w_j)
};
// Domain [s, s + L] split at the images of the jumps of sigma, m nodes per panel.
// BadWindow for m < 4 or L <= 0.
QuadOperator build_operator(const Kernel& k, const SigmaFn& sigma, const Window& w, const ThinningMap& t);
// thinning shift defaults to the window start
QuadOperator build_operator(const Kernel& k, const SigmaFn& sigma, const Window& w);

// det(I - A) by partial-pivot LU. SpectrumViolation when an eigenvalue of A leaves
// [-1e-10, 1) or the determinant leaves (0, 1].
double det(const QuadOperator& op);
// Largest and smallest eigenvalue of A.
std::pair<double, double> spectrum_range(const QuadOperator& op);

// 1 - E1 + E2 - E3 with E_n = (1/n!) sum over node tuples of w sigma det[K(x_a, x_b)],
// on its own plain Gauss-Legendre grid of m nodes per panel (order <= 3).
double det_series_oracle(const Kernel& k, const SigmaFn& sigma, const Window& w, const ThinningMap& t, int order);

// tr((I - A)^-1 dA); the log-derivative of det(I - A) is minus this.
double resolvent_trace(const Eigen::MatrixXd& A, const Eigen::MatrixXd& dA);
// d/ds of the Airy matrix with plain indicator thinning on [s, s + L]: the window
// moves with s, so dA = -sqrt(w) Ai Ai^T sqrt(w).
Eigen::MatrixXd airy_shift_derivative(const QuadOperator& op);

struct SweepRow {
    double s;
    int m;
    double L;
    double iota;
    double Q;  // NaN when the point failed
    bool converged;
    std::string note;
};
// Q(s) = det(I - K sigma((. - s)/scale)) per grid point; converged when m and 2m agree
// to tol. Failures are flagged per row.
std::vector<SweepRow> q_sweep(const Kernel& k, const SigmaFn& sigma, const std::vector<double>& s_grid, double L,
                              int m, double scale = 1, double tol = 1e-10);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Lower end of the thinning support: below it sigma stays under 1e-18.
double sigma_floor(const SigmaFn& s);

}  // namespace kdvw
