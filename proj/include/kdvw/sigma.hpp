#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kdvw {

struct TailConstants {
    double k1 = 1, k2 = 1, k3 = 1, K = 2;
};

// A thinning function r -> [0, 1] with limit iota at +infinity and finitely
// many declared jump points (sorted).
struct SigmaFn {
    std::string name;
    std::function<double(double)> eval;
    double iota = 1;
    std::vector<double> jumps;
    std::optional<TailConstants> tail;
    // sigma(r) - iota chi_(0,inf)(r) without cancellation, when the family provides it
    std::function<double(double)> deviation;

    double operator()(double r) const { return eval(r); }
};

// chi_(shift, inf) scaled by iota.
SigmaFn heaviside(double iota = 1, double shift = 0);
// iota * exp(-e^(-r^3)).
SigmaFn gumbel_cubic(double iota = 1);
// Step function: values[0] below jumps[0], values[j] on (jumps[j-1], jumps[j]], ...
SigmaFn piecewise(std::vector<double> jumps, std::vector<double> values);
// Smooth pieces: piece j lives on (starts[j], starts[j+1]], the first one extends to -inf.
SigmaFn piecewise(std::vector<double> starts, std::vector<std::function<double(double)>> pieces, double iota,
                  std::string name = "piecewise");

// {family: heaviside | gumbel_cubic | piecewise, params: {...}, iota}. InvalidSpec on bad input.
SigmaFn sigma_from_json(const nlohmann::json& spec);
nlohmann::json sigma_to_json(const SigmaFn& s);

struct ValidationConfig {
    double lo = -20, hi = 20;
    int grid = 10000;
    double tail_lo = 2, tail_hi = 10;
    int tail_samples = 400;
    double deriv_hi = 20;
    double fd_step = 1e-5;
    double monotone_slack = 1e-14;
    // L^2(R^-, r^4 sigma) probe radii
    std::vector<double> l2_radii{10, 20, 40};
    double l2_tail_ratio = 1e-6;
};

struct ValidationReport {
    std::string name;
    bool assumption1 = false;
    bool assumption2 = false;
    std::vector<std::string> violations;
    // Fitted tail constants; k2 is absent when the deviation vanishes on the tail windows.
    double k1 = 0;
    std::optional<double> k2;
    double k3 = 0, K = 0;
    double l2_norm = 0;
    int tail_points = 0;

    nlohmann::json to_json() const;
};

ValidationReport validate(const SigmaFn& s, const ValidationConfig& cfg = {});
// Throws ValidationFailure listing the violated clauses.
void require_valid(const SigmaFn& s, const ValidationConfig& cfg = {});

struct M0Result {
    double value = 0;
    double error = 0;       // reported by the primary scheme
    double alternate = 0;   // second scheme
};
// m0 = integral of chi_[0,inf) - sigma. Requires iota = 1 (the integral diverges otherwise).
// NonConvergentQuadrature when the error estimate exceeds tol or the two schemes disagree.
M0Result m0_detail(const SigmaFn& s, double tol = 1e-10);
double m0(const SigmaFn& s);

struct SmallEta {
    double p, q, r;
};
// Leading small-eta terms of p_sigma, q_sigma, r_sigma. ZeroEta for eta = 0.
SmallEta small_eta_predict(double eta, double m0);

}  // namespace kdvw
