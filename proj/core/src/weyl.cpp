#include "halfline/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace halfline {

namespace {

// Coarse per-span probe: the disk geometry needs Re p >= |p'/p|/2, i.e. a
// nonnegative decay weight, between the anchor and the current endpoint.
void probe_condition(const Potential& pot, Complex lambda, double lo, double hi) {
    const ConditionReport rep = check_condition_A(pot, lambda, lo, hi, 0.0, 257);
    if (!rep.holds) {
        const double bad = rep.first_violation.value_or(lo);
        throw PreconditionError("decay condition fails on [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] near x = " + std::to_string(bad) +
                                " at lambda = " + std::to_string(lambda.real()) +
                                (lambda.imag() < 0 ? " - " : " + ") +
                                std::to_string(std::abs(lambda.imag())) + "i");
    }
}

struct DiskGeometry {
    Complex center;
    double radius;
};

DiskGeometry disk_from_states(const State2& u, const State2& v) {
    const double denom = 2.0 * (v[0] * std::conj(v[1])).real();
    if (!(denom > 0.0))
        throw PreconditionError(
            "Weyl disk denominator 2 Re(v1 conj(v2)) is not positive; the decay "
            "condition fails or the integration broke down");
    const Complex num = u[0] * std::conj(v[1]) + std::conj(v[0]) * u[1];
    return {-num / denom, 1.0 / denom};
}

std::vector<double> default_schedule(double anchor, double cap) {
    std::vector<double> b;
    for (double step = 1.0; anchor + step <= cap * (1.0 + 1e-12); step *= 2.0)
        b.push_back(anchor + step);
    // Doubling from the anchor can stop a factor of two short of the cap;
    // finish with the cap so slowly shrinking disks get the whole window.
    if (b.empty() || b.back() < cap * (1.0 - 1e-12)) b.push_back(cap);
    return b;
}

}  // namespace

WeylDisk disk_at(const Potential& pot, Complex lambda, double anchor, double b,
                 double tol) {
    if (!(b > anchor)) throw PreconditionError("disk endpoint must exceed the anchor");
    if (!(anchor >= 0.0)) throw PreconditionError("anchor must be nonnegative");
    probe_condition(pot, lambda, anchor, b);
    IntegrateOptions opt;
    opt.tol = tol;
    const PairTrajectory uv =
        integrate_pair(pot, lambda, anchor, b, SystemState{anchor, Complex(0.0), Complex(1.0)},
                       SystemState{anchor, Complex(1.0), Complex(0.0)}, opt);
    const DiskGeometry g = disk_from_states(uv.u.back().y, uv.v.back().y);
    return {b, g.center, g.radius};
}

WeylResult weyl_theta(const Potential& pot, Complex lambda, double anchor,
                      double radius_tol, double b_max, std::vector<double> b_schedule,
                      double tol) {
    if (!(anchor >= 0.0)) throw PreconditionError("anchor must be nonnegative");
    if (!(radius_tol > 0.0)) throw PreconditionError("radius tolerance must be > 0");
    const double cap = std::min(b_max, pot.x_upper());
    if (!(cap > anchor)) throw PreconditionError("b_max must exceed the anchor");

    std::vector<double> schedule;
    if (b_schedule.empty()) {
        schedule = default_schedule(anchor, cap);
    } else {
        std::sort(b_schedule.begin(), b_schedule.end());
        for (double b : b_schedule)
            if (b > anchor && b <= cap * (1.0 + 1e-12)) schedule.push_back(b);
        if (schedule.empty())
            throw PreconditionError("no schedule endpoint lies in (anchor, b_max]");
    }

    WeylResult res;
    res.lambda = lambda;
    res.anchor = anchor;

    IntegrateOptions opt;
    opt.tol = tol;
    SystemState u_cur{anchor, Complex(0.0), Complex(1.0)};
    SystemState v_cur{anchor, Complex(1.0), Complex(0.0)};
    double x_cur = anchor;

    for (double b : schedule) {
        probe_condition(pot, lambda, x_cur, b);
        const PairTrajectory uv = integrate_pair(pot, lambda, x_cur, b, u_cur, v_cur, opt);
        u_cur = {b, uv.u.back().y[0], uv.u.back().y[1]};
        v_cur = {b, uv.v.back().y[0], uv.v.back().y[1]};
        x_cur = b;
        const DiskGeometry g = disk_from_states(uv.u.back().y, uv.v.back().y);
        if (!res.disks.empty()) {
            const WeylDisk& prev = res.disks.back();
            if (g.radius > prev.radius * (1.0 + 1e-6))
                throw ConvergenceError("Weyl disk radius grew along the schedule at b = " +
                                       std::to_string(b));
            if (std::abs(g.center - prev.center) > prev.radius - g.radius + 10.0 * tol)
                throw ConvergenceError("Weyl disks failed to nest at b = " +
                                       std::to_string(b));
        }
        res.disks.push_back({b, g.center, g.radius});
        if (g.radius <= radius_tol) {
            res.converged = true;
            break;
        }
    }

    const WeylDisk& last = res.disks.back();
    res.theta = last.center;
    res.final_radius = last.radius;
    res.mu = res.theta / eval_p(pot, lambda, anchor);
    if (res.converged && !(res.theta.real() < 0.0))
        throw ConvergenceError("converged limit point has nonnegative real part");
    return res;
}

namespace {

// Composite Simpson of Re p over [lo, hi]; measures how much one-sided
// exponential growth the forward leg has to fight through.
double growth_exponent(const Potential& pot, Complex lambda, double lo, double hi) {
    constexpr int kIntervals = 4096;
    const double h = (hi - lo) / kIntervals;
    double sum = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
        const double x = lo + i * h;
        const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * eval_p(pot, lambda, x).real();
    }
    return sum * h / 3.0;
}

}  // namespace

WeylSolution weyl_solution(const Potential& pot, Complex lambda, double anchor,
                           double x_max, double tol, std::vector<double> forced_nodes) {
    if (!(x_max > anchor)) throw PreconditionError("x_max must exceed the anchor");
    probe_condition(pot, lambda, anchor, x_max);

    // The decaying solution is recovered to a relative accuracy of roughly
    // tol * exp(2 S) at the far end, S = int Re p; keep tol * exp(2 S) below
    // 1e-6 * exp(S) or refuse the span.
    const double tol_eff = std::min(tol, 1e-11);
    const double s = growth_exponent(pot, lambda, anchor, x_max);
    const double s_budget = std::log(1e-6 / tol_eff);
    if (s > s_budget)
        throw PreconditionError(
            "forward span too long for the decaying solution: int Re p = " +
            std::to_string(s) + " exceeds the budget " + std::to_string(s_budget) +
            "; reduce x_max");

    WeylResult wr = weyl_theta(pot, lambda, anchor, tol_eff, std::max(64.0, x_max), {},
                               tol_eff);
    if (!wr.converged)
        throw ConvergenceError("Weyl disks did not reach radius " +
                               std::to_string(tol_eff) + " before the schedule cap");

    IntegrateOptions opt;
    opt.tol = tol_eff;
    opt.forced = std::move(forced_nodes);  // each leg keeps its own span's points
    const Complex p_anchor = eval_p(pot, lambda, anchor);

    WeylSolution sol;
    sol.lambda = lambda;
    sol.anchor = anchor;
    sol.x_max = x_max;
    sol.weyl = wr;
    sol.pot = pot;
    sol.forward_ = integrate_system(pot, lambda, anchor, x_max,
                                    SystemState{anchor, wr.mu, 1.0 / p_anchor}, opt);
    if (anchor > 0.0)
        sol.backward_ = integrate_scalar(pot, lambda, anchor, 0.0,
                                         ScalarState{anchor, wr.mu, Complex(1.0)}, opt);

    const auto rho_at = [&](double x) { return rho(pot, lambda, x); };
    sol.tail_norm = std::sqrt(trajectory_integral(
        sol.forward_, [](double, const State2& s) { return std::norm(s[0]); }));
    sol.tail_norm_rho = std::sqrt(trajectory_integral(
        sol.forward_,
        [&](double x, const State2& s) { return rho_at(x) * std::norm(s[0]); }));
    // |eta'|^2 / |q - lambda| = |y2|^2 exactly, so no division appears.
    sol.tail_deriv_weighted = std::sqrt(trajectory_integral(
        sol.forward_, [](double, const State2& s) { return std::norm(s[1]); }));
    sol.energy_budget_lhs =
        std::norm(p_anchor) *
        trajectory_integral(sol.forward_, [&](double x, const State2& s) {
            return rho_at(x) * (std::norm(s[0]) + std::norm(s[1]));
        });
    sol.energy_budget_rhs = -wr.theta.real();
    return sol;
}

Complex WeylSolution::eta(double x) const {
    if (backward_ && x < anchor - 1e-12 * (anchor + 1.0)) return backward_->eval(x)[0];
    return forward_.eval(x)[0];
}

Complex WeylSolution::eta_prime(double x) const {
    if (backward_ && x < anchor - 1e-12 * (anchor + 1.0)) return backward_->eval(x)[1];
    return eval_p(pot, lambda, x) * forward_.eval(x)[1];
}

std::vector<WeylSample> WeylSolution::samples() const {
    std::vector<WeylSample> out;
    if (backward_) {
        const auto& nodes = backward_->nodes();
        for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
            if (std::abs(it->x - anchor) <= 1e-12 * (anchor + 1.0)) continue;
            out.push_back({it->x, it->y[0], it->y[1]});
        }
    }
    for (const auto& n : forward_.nodes()) {
        const Complex p = eval_p(pot, lambda, n.x);
        out.push_back({n.x, n.y[0], p * n.y[1]});
    }
    return out;
}

std::vector<std::pair<double, double>> boundary_limit_trace(const WeylSolution& sol,
                                                            const Potential& pot,
                                                            Complex lambda) {
    if (std::abs(lambda - sol.lambda) > 1e-12 * (1.0 + std::abs(lambda)))
        throw PreconditionError("lambda differs from the solution's spectral parameter");
    std::vector<std::pair<double, double>> trace;
    trace.reserve(sol.forward_.nodes().size());
    for (const auto& n : sol.forward_.nodes()) {
        const Complex p = eval_p(pot, lambda, n.x);
        const Complex deta = p * n.y[1];
        trace.emplace_back(n.x, (std::conj(n.y[0]) * deta / p).real());
    }
    return trace;
}

}  // namespace halfline
