#include "halfline/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace halfline {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// b - bhat, for the embedded 4th-order error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <int N>
using StateN = std::array<Complex, N>;

template <int N>
struct RawNode {
    double x;
    StateN<N> y, f;
};

template <int N>
struct RawRun {
    std::vector<RawNode<N>> nodes;
    long accepted = 0;
    long rejected = 0;
    double err_accum = 0.0;
};

template <int N>
double max_abs(const StateN<N>& y) {
    double m = 0.0;
    for (int i = 0; i < N; ++i) m = std::max(m, std::abs(y[i]));
    return m;
}

template <int N, class RHS>
double initial_step_core(RHS&& rhs, double x, const StateN<N>& y, const StateN<N>& f,
                         double dir, double span, double tol) {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double sk = tol + tol * std::abs(y[i]);
        d0 += std::pow(std::abs(y[i]) / sk, 2);
        d1 += std::pow(std::abs(f[i]) / sk, 2);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * (d0 / d1);
    h0 = std::min(h0, span);
    StateN<N> y1, f1;
    for (int i = 0; i < N; ++i) y1[i] = y[i] + dir * h0 * f[i];
    rhs(x + dir * h0, y1, f1);
    double d2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double sk = tol + tol * std::abs(y[i]);
        d2 += std::pow(std::abs(f1[i] - f[i]) / sk, 2);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1, d2);
    const double h1 =
        dm <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
}

template <int N, class RHS>
RawRun<N> run_core(RHS&& rhs, double x_from, double x_to, StateN<N> y0,
                   const IntegrateOptions& opt) {
    RawRun<N> tr;
    const double span = std::abs(x_to - x_from);
    if (!(opt.tol > 0.0)) throw PreconditionError("integration tolerance must be > 0");
    StateN<N> f0;
    rhs(x_from, y0, f0);
    tr.nodes.push_back({x_from, y0, f0});
    if (span == 0.0) return tr;

    const double dir = x_to > x_from ? 1.0 : -1.0;
    const double h_floor = 1e-13 * span;
    const double h_cap = opt.max_step > 0.0 ? opt.max_step : span;

    // Landing targets: interior forced points in travel order, then x_to.
    std::vector<double> targets;
    for (double t : opt.forced)
        if ((t - x_from) * dir > 1e-14 * span && (x_to - t) * dir > 1e-14 * span)
            targets.push_back(t);
    std::sort(targets.begin(), targets.end());
    if (dir < 0) std::reverse(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end(),
                              [&](double a, double b) {
                                  return std::abs(a - b) <= 1e-14 * span;
                              }),
                  targets.end());
    targets.push_back(x_to);

    double x = x_from;
    StateN<N> y = y0, k1 = f0;
    double h = initial_step_core<N>(rhs, x, y, k1, dir, span, opt.tol);
    h = std::min(h, h_cap);
    double facold = 1e-4;
    constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
    constexpr double facl = 0.2, facr = 10.0;
    bool rejected_last = false;

    for (double target : targets) {
        while ((target - x) * dir > 0.0) {
            if (tr.nodes.size() > 2'000'000)
                throw ConvergenceError("integration produced too many steps");
            double h_here = std::min({h, h_cap, std::abs(target - x)});
            const bool lands = h_here >= std::abs(target - x) * (1.0 - 1e-14);
            if (!lands && h_here < h_floor)
                throw StiffnessError("step size underflow at x = " + std::to_string(x));
            const double hs = dir * h_here;

            StateN<N> k2, k3, k4, k5, k6, k7, yt, ynew;
            auto stage = [&](StateN<N>& k, double frac, const StateN<N>& yarg) {
                rhs(x + frac * hs, yarg, k);
            };
            for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a21 * k1[i]);
            stage(k2, c2, yt);
            for (int i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
            stage(k3, c3, yt);
            for (int i = 0; i < N; ++i)
                yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            stage(k4, c4, yt);
            for (int i = 0; i < N; ++i)
                yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            stage(k5, c5, yt);
            for (int i = 0; i < N; ++i)
                yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                     a64 * k4[i] + a65 * k5[i]);
            stage(k6, 1.0, yt);
            for (int i = 0; i < N; ++i)
                ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                       b5 * k5[i] + b6 * k6[i]);
            const double xnew = lands ? target : x + hs;
            rhs(xnew, ynew, k7);

            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                const Complex ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                         e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sk =
                    opt.tol + opt.tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double r = std::abs(ei) / sk;
                err += r * r;
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                facold = std::max(err, 1e-4);
                x = xnew;
                y = ynew;
                k1 = k7;
                if (max_abs<N>(y) > opt.magnitude_cap)
                    throw BlowupError("state magnitude exceeded cap at x = " +
                                      std::to_string(x));
                tr.nodes.push_back({x, y, k1});
                ++tr.accepted;
                tr.err_accum += err;
                double fac11 = std::pow(err, expo1);
                double fac = fac11 / std::pow(facold, beta);
                fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
                double hnew = h_here / fac;
                if (rejected_last) hnew = std::min(hnew, h_here);
                rejected_last = false;
                h = hnew;
            } else {
                ++tr.rejected;
                rejected_last = true;
                const double fac11 = std::pow(err, expo1);
                h = h_here / std::min(1.0 / facl, fac11 / safe);
            }
        }
        x = target;  // exact landing
    }
    return tr;
}

}  // namespace

class Stepper {
  public:
    template <class RHS>
    static Trajectory run(RHS&& rhs, double x_from, double x_to, State2 y0,
                          const IntegrateOptions& opt) {
        RawRun<2> raw = run_core<2>(rhs, x_from, x_to, y0, opt);
        Trajectory tr;
        tr.nodes_.reserve(raw.nodes.size());
        for (const auto& n : raw.nodes) tr.nodes_.push_back({n.x, n.y, n.f});
        tr.accepted_ = raw.accepted;
        tr.rejected_ = raw.rejected;
        tr.err_accum_ = raw.err_accum;
        return tr;
    }

    template <class RHS>
    static PairTrajectory run_pair(RHS&& rhs, double x_from, double x_to, State2 u0,
                                   State2 v0, const IntegrateOptions& opt) {
        RawRun<4> raw =
            run_core<4>(rhs, x_from, x_to, StateN<4>{u0[0], u0[1], v0[0], v0[1]}, opt);
        PairTrajectory pair;
        pair.u.nodes_.reserve(raw.nodes.size());
        pair.v.nodes_.reserve(raw.nodes.size());
        for (const auto& n : raw.nodes) {
            pair.u.nodes_.push_back(
                {n.x, State2{n.y[0], n.y[1]}, State2{n.f[0], n.f[1]}});
            pair.v.nodes_.push_back(
                {n.x, State2{n.y[2], n.y[3]}, State2{n.f[2], n.f[3]}});
        }
        pair.u.accepted_ = pair.v.accepted_ = raw.accepted;
        pair.u.rejected_ = pair.v.rejected_ = raw.rejected;
        pair.u.err_accum_ = pair.v.err_accum_ = raw.err_accum;
        return pair;
    }
};

std::size_t Trajectory::locate(double x) const {
    if (nodes_.size() < 2) throw PreconditionError("dense output needs >= 2 nodes");
    const bool fwd = nodes_.back().x >= nodes_.front().x;
    const double lo = fwd ? nodes_.front().x : nodes_.back().x;
    const double hi = fwd ? nodes_.back().x : nodes_.front().x;
    const double slack = 1e-9 * (hi - lo) + 1e-300;
    if (x < lo - slack || x > hi + slack)
        throw PreconditionError("dense evaluation outside the trajectory span");
    auto cmp = [&](const TrajectoryNode& n, double v) { return fwd ? n.x < v : n.x > v; };
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x, cmp);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i > 0) --i;
    if (i + 1 >= nodes_.size()) i = nodes_.size() - 2;
    return i;
}

State2 Trajectory::eval(double x) const {
    const std::size_t i = locate(x);
    const auto& n0 = nodes_[i];
    const auto& n1 = nodes_[i + 1];
    const double h = n1.x - n0.x;
    double t = (x - n0.x) / h;
    t = std::clamp(t, 0.0, 1.0);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    State2 out;
    for (int k = 0; k < 2; ++k)
        out[k] = h00 * n0.y[k] + h10 * h * n0.f[k] + h01 * n1.y[k] + h11 * h * n1.f[k];
    return out;
}

State2 Trajectory::eval_derivative(double x) const {
    const std::size_t i = locate(x);
    const auto& n0 = nodes_[i];
    const auto& n1 = nodes_[i + 1];
    const double h = n1.x - n0.x;
    double t = (x - n0.x) / h;
    t = std::clamp(t, 0.0, 1.0);
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
    State2 out;
    for (int k = 0; k < 2; ++k)
        out[k] = g00 * n0.y[k] + g10 * n0.f[k] + g01 * n1.y[k] + g11 * n1.f[k];
    return out;
}

namespace {

std::vector<double> merged_forced(const Potential& pot, double x_from, double x_to,
                                  const IntegrateOptions& opt) {
    std::vector<double> forced = opt.forced;
    const double lo = std::min(x_from, x_to), hi = std::max(x_from, x_to);
    for (double k : pot.knots())
        if (k > lo && k < hi) forced.push_back(k);
    return forced;
}

void check_span(const Potential& pot, double x_from, double x_to) {
    const double lo = std::min(x_from, x_to), hi = std::max(x_from, x_to);
    if (lo < -1e-12) throw PreconditionError("integration span must stay in x >= 0");
    if (hi > pot.x_upper() * (1.0 + 1e-12))
        throw PreconditionError("integration span exceeds the tabulated range");
}

}  // namespace

Trajectory integrate_scalar(const Potential& pot, Complex lambda, double x_from,
                            double x_to, Complex y, Complex dy, IntegrateOptions opt) {
    check_span(pot, x_from, x_to);
    opt.forced = merged_forced(pot, x_from, x_to, opt);
    auto rhs = [&pot, lambda](double x, const State2& s, State2& f) {
        f[0] = s[1];
        f[1] = (pot.q(x) - lambda) * s[0];
    };
    return Stepper::run(rhs, x_from, x_to, State2{y, dy}, opt);
}

Trajectory integrate_scalar(const Potential& pot, Complex lambda, double x_from,
                            double x_to, const ScalarState& init, IntegrateOptions opt) {
    if (std::abs(init.x - x_from) > 1e-12 * (std::abs(x_from) + 1.0))
        throw PreconditionError("initial state abscissa differs from x_from");
    return integrate_scalar(pot, lambda, x_from, x_to, init.y, init.dy, std::move(opt));
}

Trajectory integrate_system(const Potential& pot, Complex lambda, double x_from,
                            double x_to, Complex y1, Complex y2, IntegrateOptions opt) {
    check_span(pot, x_from, x_to);
    opt.forced = merged_forced(pot, x_from, x_to, opt);
    auto rhs = [&pot, lambda](double x, const State2& s, State2& f) {
        const Complex radicand = pot.q(x) - lambda;
        const Complex p = std::sqrt(radicand);
        if (!(p.real() > 0.0))
            throw BranchCutError("q(x) - lambda on the closed negative real axis at x = " +
                                 std::to_string(x));
        const Complex log_deriv = pot.dq(x) / (2.0 * radicand);  // p'/p
        f[0] = p * s[1];
        f[1] = p * s[0] - log_deriv * s[1];
    };
    return Stepper::run(rhs, x_from, x_to, State2{y1, y2}, opt);
}

Trajectory integrate_system(const Potential& pot, Complex lambda, double x_from,
                            double x_to, const SystemState& init, IntegrateOptions opt) {
    if (std::abs(init.x - x_from) > 1e-12 * (std::abs(x_from) + 1.0))
        throw PreconditionError("initial state abscissa differs from x_from");
    return integrate_system(pot, lambda, x_from, x_to, init.y1, init.y2, std::move(opt));
}

PairTrajectory integrate_pair(const Potential& pot, Complex lambda, double x_from,
                              double x_to, const SystemState& u0, const SystemState& v0,
                              IntegrateOptions opt) {
    check_span(pot, x_from, x_to);
    const double slack = 1e-12 * (std::abs(x_from) + 1.0);
    if (std::abs(u0.x - x_from) > slack || std::abs(v0.x - x_from) > slack)
        throw PreconditionError("initial state abscissa differs from x_from");
    opt.forced = merged_forced(pot, x_from, x_to, opt);
    auto rhs = [&pot, lambda](double x, const StateN<4>& s, StateN<4>& f) {
        const Complex radicand = pot.q(x) - lambda;
        const Complex p = std::sqrt(radicand);
        if (!(p.real() > 0.0))
            throw BranchCutError("q(x) - lambda on the closed negative real axis at x = " +
                                 std::to_string(x));
        const Complex log_deriv = pot.dq(x) / (2.0 * radicand);  // p'/p
        f[0] = p * s[1];
        f[1] = p * s[0] - log_deriv * s[1];
        f[2] = p * s[3];
        f[3] = p * s[2] - log_deriv * s[3];
    };
    return Stepper::run_pair(rhs, x_from, x_to, State2{u0.y1, u0.y2},
                             State2{v0.y1, v0.y2}, opt);
}

namespace {

template <class T, class F>
T simpson_along(const Trajectory& tr, F&& fn) {
    T total{};
    const auto& nodes = tr.nodes();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double x0 = nodes[i].x, x1 = nodes[i + 1].x;
        const double h = x1 - x0;
        if (h == 0.0) continue;
        const T f0 = fn(x0, nodes[i].y);
        const T f4 = fn(x1, nodes[i + 1].y);
        const T f1 = fn(x0 + 0.25 * h, tr.eval(x0 + 0.25 * h));
        const T f2 = fn(x0 + 0.50 * h, tr.eval(x0 + 0.50 * h));
        const T f3 = fn(x0 + 0.75 * h, tr.eval(x0 + 0.75 * h));
        total += (h / 12.0) * (f0 + 4.0 * f1 + 2.0 * f2 + 4.0 * f3 + f4);
    }
    return total;
}

}  // namespace

double trajectory_integral(const Trajectory& tr,
                           const std::function<double(double, const State2&)>& fn) {
    return simpson_along<double>(tr, fn);
}

Complex trajectory_integral_c(const Trajectory& tr,
                              const std::function<Complex(double, const State2&)>& fn) {
    return simpson_along<Complex>(tr, fn);
}

std::pair<Complex, Complex> system_to_scalar(const Potential& pot, Complex lambda,
                                             double x, const State2& s) {
    const Complex p = eval_p(pot, lambda, x);
    return {s[0], p * s[1]};
}

namespace {

void check_same_span(const Trajectory& tr, double a, double b, const char* what) {
    const double slack = 1e-9 * (std::abs(b - a) + 1.0);
    if (std::abs(tr.x_front() - a) > slack || std::abs(tr.x_back() - b) > slack)
        throw PreconditionError(std::string(what) + " requires a trajectory over the given span");
}

}  // namespace

double wronskian_drift(const Trajectory& u, const Trajectory& v, const Potential& pot,
                       Complex lambda, double anchor, double b) {
    check_same_span(u, anchor, b, "wronskian_drift");
    check_same_span(v, anchor, b, "wronskian_drift");
    const State2& ua = u.front().y;
    const State2& va = v.front().y;
    const State2& ub = u.back().y;
    const State2& vb = v.back().y;
    const Complex det_a = ua[0] * va[1] - va[0] * ua[1];
    const Complex det_b = ub[0] * vb[1] - vb[0] * ub[1];
    const Complex expected = det_a * eval_p(pot, lambda, anchor) / eval_p(pot, lambda, b);
    return std::abs(det_b - expected) / std::abs(expected);
}

double wronskian_drift(const Potential& pot, Complex lambda, double anchor, double b,
                       double tol) {
    IntegrateOptions opt;
    opt.tol = tol;
    const PairTrajectory uv =
        integrate_pair(pot, lambda, anchor, b, SystemState{anchor, Complex(0, 0), Complex(1, 0)},
                       SystemState{anchor, Complex(1, 0), Complex(0, 0)}, opt);
    return wronskian_drift(uv.u, uv.v, pot, lambda, anchor, b);
}

double energy_identity_residual(const Trajectory& tr, const Potential& pot,
                                Complex lambda, double anchor, double b) {
    check_same_span(tr, anchor, b, "energy_identity_residual");
    const State2& ya = tr.front().y;
    const State2& yb = tr.back().y;
    const double lhs = (yb[0] * std::conj(yb[1])).real() - (ya[0] * std::conj(ya[1])).real();
    const double rhs = trajectory_integral(tr, [&](double x, const State2& s) {
        const Complex radicand = pot.q(x) - lambda;
        const Complex p = std::sqrt(radicand);
        const Complex log_deriv = pot.dq(x) / (2.0 * radicand);
        const double norms = std::norm(s[0]) + std::norm(s[1]);
        return p.real() * norms - (log_deriv * s[1] * std::conj(s[0])).real();
    });
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace halfline
