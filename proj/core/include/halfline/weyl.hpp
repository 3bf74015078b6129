#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "halfline/potential.hpp"
#include "halfline/propagate.hpp"
#include "halfline/types.hpp"

namespace halfline {

// Image in the theta-plane of the constraint Re(y1 conj(y2))|_b <= 0 for
// Y = U + theta V with U(anchor) = (0,1), V(anchor) = (1,0).
struct WeylDisk {
    double b = 0.0;
    Complex center;
    double radius = 0.0;
};

struct WeylResult {
    Complex lambda;
    double anchor = 0.0;
    Complex theta;  // center of the final disk
    Complex mu;     // theta / p(anchor)
    std::vector<WeylDisk> disks;
    bool converged = false;
    double final_radius = 0.0;  // enclosure of theta, up to integration error
};

// Single disk from the canonical pair advanced jointly over [anchor, b].
// Requires Re p >= |p'/p|/2 on the span (probed on a coarse grid) and a
// positive denominator 2 Re(v1 conj(v2)); both failures raise
// PreconditionError.
WeylDisk disk_at(const Potential& pot, Complex lambda, double anchor, double b,
                 double tol = 1e-10);

// Walks b along the schedule until the disk radius reaches radius_tol or the
// schedule is exhausted (converged = false in that case). An empty schedule
// means the geometric default b_k = anchor + 2^k, clamped to b_max and the
// potential's evaluable range, with the clamp value itself as the final
// endpoint so the full span is always tried. Along the trace the disks must nest:
// |c2 - c1| <= R1 - R2 + 10 tol, else ConvergenceError. theta is the final
// center, mu = theta / p(anchor).
WeylResult weyl_theta(const Potential& pot, Complex lambda, double anchor,
                      double radius_tol = 1e-8, double b_max = 64.0,
                      std::vector<double> b_schedule = {}, double tol = 1e-10);

struct WeylSample {
    double x = 0.0;
    Complex eta;
    Complex deta;
};

// The square-integrable solution, normalized by its anchor data
// eta(anchor) = mu, eta'(anchor) = 1. Forward of the anchor it is carried in
// system variables (y1, y2) = (eta, eta'/p); backward to 0 in scalar
// variables, so no square root is taken below the anchor.
struct WeylSolution {
    Complex lambda;
    double anchor = 0.0;
    double x_max = 0.0;
    WeylResult weyl;  // disk trace behind the normalization
    Potential pot;

    Complex eta(double x) const;
    Complex eta_prime(double x) const;
    // (x, eta, eta') at the integration nodes, ascending over [0, x_max].
    std::vector<WeylSample> samples() const;

    // L2 quantities over the tail [anchor, x_max].
    double tail_norm = 0.0;            // ||eta||
    double tail_norm_rho = 0.0;        // ||eta||_rho
    double tail_deriv_weighted = 0.0;  // sqrt(int |eta'|^2 / |q - lambda|)
    // Budget int rho (|y1|^2 + |y2|^2) <= -Re theta for Y = U + theta V; the
    // stored trajectory is Y / p(anchor), hence the |p(anchor)|^2 factor in
    // the lhs.
    double energy_budget_lhs = 0.0;
    double energy_budget_rhs = 0.0;

    const Trajectory& forward() const { return forward_; }
    const std::optional<Trajectory>& backward() const { return backward_; }

    Trajectory forward_;                   // system variables on [anchor, x_max]
    std::optional<Trajectory> backward_;   // scalar variables, anchor down to 0
};

// Throws ConvergenceError if the disks do not converge, and PreconditionError
// when int_anchor^x_max Re p is large enough that the decaying solution would
// be swamped by the growing one at the integration tolerance. Abscissae in
// forced_nodes become exact integration nodes (no dense-output interpolation
// there); points outside [0, x_max] are ignored.
WeylSolution weyl_solution(const Potential& pot, Complex lambda, double anchor,
                           double x_max, double tol = 1e-10,
                           std::vector<double> forced_nodes = {});

// h(x) = Re(conj(eta) eta' / p) at the forward integration nodes over
// [anchor, x_max]; h must decay to 0 for the square-integrable solution.
std::vector<std::pair<double, double>> boundary_limit_trace(const WeylSolution& sol,
                                                            const Potential& pot,
                                                            Complex lambda);

}  // namespace halfline
