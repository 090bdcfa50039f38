#pragma once

#include "kdvw/diffpoly.hpp"

namespace kdvw {

// Deepest X^(j) carried by the tau ring.
constexpr int kMaxXOrder = 12;
// Deepest Phi^(j) carried by the PI ring (q_k, r_k for odd j, v_k, w_k for even j).
constexpr int kMaxPhiOrder = 11;

// Process-wide rings; built once, never mutated afterwards.
//
// tau:  coordinates t1 (spatial), t3, t5, t7. Jets v, u, q, b0..b10,
//       X11_1.., X12_1.. (compact). Ordinary zeta, tau5, tau7 (unit images
//       along t5, t7). Constant c. Laurent w.
// pi:   coordinates t0 (spatial), t1. Jets y, h, q1.., r1.., v1.., w1...
//       Ordinary t0, t1 (unit images), z, g (Laurent proxy for s0^(1/7)), s1,
//       T1, T3. Constants k0 k1 k3 n0 n1 n3. Laurent s, w, E.
// mkdv: coordinates x0 (spatial), x1, x2. Jet q. Ordinary x0, x1, x2.
const Ring& tau_ring();
const Ring& pi_ring();
const Ring& mkdv_ring();

// Parse in one of the rings above.
DiffPoly tau(const std::string& text);
DiffPoly pi(const std::string& text);
DiffPoly mk(const std::string& text);

}  // namespace kdvw
