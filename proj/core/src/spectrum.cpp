#include "halfline/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "halfline/parallel.hpp"

namespace halfline {

double ComplexRect::diameter() const { return std::hypot(width(), height()); }

bool ComplexRect::contains(Complex z, double pad) const {
    return z.real() >= re_lo - pad && z.real() <= re_hi + pad &&
           z.imag() >= im_lo - pad && z.imag() <= im_hi + pad;
}

Contour Contour::circle(Complex center, double radius, int n_samples) {
    if (!(radius > 0.0)) throw PreconditionError("contour radius must be positive");
    Contour c;
    c.is_circle_ = true;
    c.center_ = center;
    c.radius_ = radius;
    c.n_samples_ = std::max(n_samples, 8);
    return c;
}

Contour Contour::rectangle(const ComplexRect& rect, int n_samples) {
    if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
        throw PreconditionError("contour rectangle needs positive width and height");
    Contour c;
    c.is_circle_ = false;
    c.rect_ = rect;
    c.n_samples_ = std::max(n_samples, 8);
    return c;
}

Complex Contour::point(double t) const {
    t -= std::floor(t);
    if (is_circle_) {
        const double a = 2.0 * std::numbers::pi * t;
        return center_ + radius_ * Complex(std::cos(a), std::sin(a));
    }
    const double w = rect_.width();
    const double h = rect_.height();
    double s = t * 2.0 * (w + h);
    if (s < w) return {rect_.re_lo + s, rect_.im_lo};
    s -= w;
    if (s < h) return {rect_.re_hi, rect_.im_lo + s};
    s -= h;
    if (s < w) return {rect_.re_hi - s, rect_.im_hi};
    s -= w;
    return {rect_.re_lo, rect_.im_hi - s};
}

namespace {

constexpr double kPi = std::numbers::pi;

struct BoundaryData {
    Complex eta0;
    Complex deta0;
};

// (eta(0), eta'(0)) under the normalization eta(anchor) = mu,
// eta'(anchor) = 1: disk limit at the anchor, then a scalar carry down to 0
// so no square root of q - lambda is taken below the anchor.
BoundaryData boundary_data(const Potential& pot, Complex lambda, double anchor,
                           double tol) {
    const double tol_eff = std::min(tol, 1e-11);
    const WeylResult wr = weyl_theta(pot, lambda, anchor, tol_eff,
                                     std::max(64.0, anchor + 32.0), {}, tol_eff);
    if (!wr.converged)
        throw ConvergenceError("Weyl disks did not converge while evaluating the "
                               "characteristic function");
    if (anchor <= 0.0) return {wr.mu, Complex(1.0)};
    IntegrateOptions opt;
    opt.tol = tol_eff;
    const Trajectory back = integrate_scalar(pot, lambda, anchor, 0.0,
                                             ScalarState{anchor, wr.mu, Complex(1.0)}, opt);
    return {back.back().y[0], back.back().y[1]};
}

double scaled_residual(const CharValue& cv) {
    return std::abs(cv.w) / std::max(cv.scale, 1e-300);
}

// Memoized characteristic-function evaluations shared across the contours of
// one search. Values do not depend on evaluation order, so concurrent fills
// stay deterministic.
class WEvaluator {
  public:
    WEvaluator(const Potential& pot, const BoundaryForm& bc, double anchor, double tol)
        : pot_(pot), bc_(bc), anchor_(anchor), tol_(tol) {}

    CharValue eval(Complex lambda) {
        const std::pair<double, double> key{lambda.real(), lambda.imag()};
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        const CharValue value = char_function_with_scale(pot_, bc_, lambda, anchor_, tol_);
        std::lock_guard<std::mutex> lock(mu_);
        return memo_.emplace(key, value).first->second;
    }

  private:
    const Potential& pot_;
    const BoundaryForm& bc_;
    double anchor_;
    double tol_;
    std::mutex mu_;
    std::map<std::pair<double, double>, CharValue> memo_;
};

struct PhasePoint {
    double t;
    Complex w;
};

// Argument-principle winding by phase unwrapping: bisect every parameter gap
// whose principal phase jump reaches pi/2, then sum the jumps.
int winding_core(WEvaluator& ev, const Contour& contour, double tol) {
    const double guard = std::max(1e3 * tol, 1e-7);
    auto checked_eval = [&](double t) {
        const CharValue cv = ev.eval(contour.point(t));
        if (scaled_residual(cv) < guard)
            throw NearZeroOnContour(
                "characteristic function within the near-zero guard on the contour");
        return PhasePoint{t, cv.w};
    };

    const int n0 = std::max(contour.n_samples(), 16);
    std::vector<PhasePoint> pts(static_cast<std::size_t>(n0) + 1);
    parallel_for(static_cast<std::size_t>(n0), [&](std::size_t i) {
        pts[i] = checked_eval(static_cast<double>(i) / n0);
    });
    pts.back() = {1.0, pts.front().w};

    long evals = n0;
    for (int round = 0; round < 40; ++round) {
        std::vector<std::size_t> splits;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (std::abs(std::arg(pts[i + 1].w / pts[i].w)) >= kPi / 2.0 &&
                pts[i + 1].t - pts[i].t > 1.0 / (1 << 26))
                splits.push_back(i);
        }
        if (splits.empty()) break;
        evals += static_cast<long>(splits.size());
        if (evals > 20000)
            throw ConvergenceError("contour refinement exceeded the sample budget");
        std::vector<PhasePoint> mids(splits.size());
        parallel_for(splits.size(), [&](std::size_t k) {
            mids[k] = checked_eval(0.5 * (pts[splits[k]].t + pts[splits[k] + 1].t));
        });
        std::vector<PhasePoint> next;
        next.reserve(pts.size() + mids.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            next.push_back(pts[i]);
            if (k < splits.size() && splits[k] == i) next.push_back(mids[k++]);
        }
        next.push_back(pts.back());
        pts.swap(next);
    }

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double jump = std::arg(pts[i + 1].w / pts[i].w);
        if (std::abs(jump) >= kPi / 2.0)
            throw ConvergenceError("phase jumps did not settle under refinement");
        total += jump;
    }
    const double w = total / (2.0 * kPi);
    const long iw = std::lround(w);
    if (std::abs(w - iw) > 0.25)
        throw ConvergenceError("winding sum is not close to an integer");
    return static_cast<int>(iw);
}

struct Cell {
    ComplexRect r;
    int depth = 0;
    int winding = 0;
};

// Distance from z to the complement of the rectangle (0 when z is outside).
double interior_distance(const ComplexRect& r, Complex z) {
    const double dre = std::min(z.real() - r.re_lo, r.re_hi - z.real());
    const double dim = std::min(z.imag() - r.im_lo, r.im_hi - z.imag());
    return std::max(std::min(dre, dim), 0.0);
}

// Newton polish inside a winding-1 cell. Returns the refined eigenvalue, or
// nullopt when the iteration stalls or walks out of the cell (the caller
// subdivides instead). All probe points stay inside `region`: the anchor (and
// with it the condition-A guarantee behind every evaluation of the
// characteristic function) is only vouched for there.
std::optional<Eigenvalue> newton_refine(WEvaluator& ev, const Cell& cell,
                                        const ComplexRect& region, double tol) {
    const double diam = cell.r.diameter();
    const double h = 1e-5 * diam;
    Complex lam = cell.r.center();
    double last_step = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
        const CharValue c0 = ev.eval(lam);
        const double resid = scaled_residual(c0);
        if (resid <= tol) {
            // The winding-1 certificate covers this cell only. A zero that the
            // iteration reached outside of it belongs to a sibling; accepting
            // it here would double-count that zero and orphan this cell's own.
            if (!cell.r.contains(lam, 0.0)) return std::nullopt;
            double r_iso = std::max(1e-6 * std::max(1.0, std::abs(lam)), 10.0 * last_step);
            const double r_cap = std::min(0.25 * diam, interior_distance(region, lam));
            if (!(r_cap > 0.0)) return std::nullopt;  // converged onto the edge
            for (int attempt = 0; attempt < 4; ++attempt) {
                const double r_use = std::min(r_iso, r_cap);
                try {
                    const int wi = winding_core(ev, Contour::circle(lam, r_use, 32), tol);
                    if (wi < 1) return std::nullopt;
                    return Eigenvalue{lam, wi, resid, r_use, true};
                } catch (const NearZeroOnContour&) {
                    r_iso *= 8.0;
                }
            }
            throw ConvergenceError("failed to isolate a refined zero");
        }
        if (interior_distance(region, lam + h) <= 0.0 ||
            interior_distance(region, lam - h) <= 0.0)
            return std::nullopt;  // derivative stencil would poke outside
        const CharValue cp = ev.eval(lam + h);
        const CharValue cm = ev.eval(lam - h);
        const Complex deriv = (cp.w - cm.w) / (2.0 * h);
        if (!(std::abs(deriv) > 0.0)) return std::nullopt;
        Complex step = -c0.w / deriv;
        const double cap = 0.5 * diam;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        lam += step;
        last_step = std::abs(step);
        if (!cell.r.contains(lam, 0.35 * diam)) return std::nullopt;
        if (!region.contains(lam, 0.0)) return std::nullopt;
    }
    return std::nullopt;
}

// Cuts the cell across its longer side, retrying shifted fractions until both
// children wind cleanly and account for the parent count (a zero on or near
// the cut breaks either condition).
void split_cell(WEvaluator& ev, const Cell& cell, double tol, std::deque<Cell>& queue) {
    static constexpr double kFractions[] = {0.5, 0.45, 0.55, 0.4, 0.6};
    const bool cut_re = cell.r.width() >= cell.r.height();
    for (double f : kFractions) {
        ComplexRect a = cell.r;
        ComplexRect b = cell.r;
        if (cut_re) {
            const double cut = cell.r.re_lo + f * cell.r.width();
            a.re_hi = cut;
            b.re_lo = cut;
        } else {
            const double cut = cell.r.im_lo + f * cell.r.height();
            a.im_hi = cut;
            b.im_lo = cut;
        }
        try {
            const int wa = winding_core(ev, Contour::rectangle(a, 64), tol);
            const int wb = winding_core(ev, Contour::rectangle(b, 64), tol);
            if (wa + wb != cell.winding) continue;
            queue.push_back({a, cell.depth + 1, wa});
            queue.push_back({b, cell.depth + 1, wb});
            return;
        } catch (const NearZeroOnContour&) {
        } catch (const ConvergenceError&) {
        }
    }
    throw ConvergenceError("no zero-free cut found while subdividing");
}

}  // namespace

CharValue char_function_with_scale(const Potential& pot, const BoundaryForm& bc,
                                   Complex lambda, double anchor, double tol) {
    if (std::abs(bc.alpha0) + std::abs(bc.alpha1) <= 0.0)
        throw PreconditionError("boundary form is identically zero");
    const BoundaryData bd = boundary_data(pot, lambda, anchor, tol);
    CharValue cv;
    cv.w = bc.alpha0 * bd.eta0 + bc.alpha1 * bd.deta0;
    cv.scale = std::max(std::abs(bd.eta0), std::abs(bd.deta0));
    return cv;
}

Complex char_function(const Potential& pot, const BoundaryForm& bc, Complex lambda,
                      double anchor, double tol) {
    return char_function_with_scale(pot, bc, lambda, anchor, tol).w;
}

int winding_number(const Potential& pot, const BoundaryForm& bc, const Contour& contour,
                   double anchor, double tol) {
    WEvaluator ev(pot, bc, anchor, tol);
    return winding_core(ev, contour, tol);
}

double choose_region_anchor(const Potential& pot, const ComplexRect& region) {
    if (!(region.width() > 0.0) || !(region.height() > 0.0))
        throw PreconditionError("region needs positive width and height");
    double corner_mag = 0.0;
    for (double re : {region.re_lo, region.re_hi})
        for (double im : {region.im_lo, region.im_hi})
            corner_mag = std::max(corner_mag, std::abs(Complex(re, im)));
    const double x_cap = std::min(std::max(24.0, 2.0 * corner_mag), pot.x_upper());

    std::vector<Complex> samples;
    constexpr int kSide = 9;
    for (int i = 0; i < kSide; ++i)
        for (int j = 0; j < kSide; ++j)
            samples.emplace_back(region.re_lo + region.width() * i / (kSide - 1),
                                 region.im_lo + region.height() * j / (kSide - 1));
    // Branch cuts live where q - lambda is real, so probe the real-lambda
    // midline explicitly whenever the region straddles it.
    if (region.im_lo < 0.0 && region.im_hi > 0.0)
        for (int i = 0; i < kSide; ++i)
            samples.emplace_back(region.re_lo + region.width() * i / (kSide - 1), 0.0);

    std::vector<double> onsets(samples.size(), -1.0);
    parallel_for(samples.size(), [&](std::size_t i) {
        const auto a = find_anchor(pot, samples[i], 0.0, x_cap, 2049);
        if (a) onsets[i] = *a;
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (onsets[i] < 0.0)
            throw PreconditionError("a sampled lambda in the region has no valid anchor "
                                    "within the search window");
        worst = std::max(worst, onsets[i]);
    }
    return worst + std::max(1.0, 0.05 * worst);
}

std::vector<Eigenvalue> find_eigenvalues(const Potential& pot, const BoundaryForm& bc,
                                         const ComplexRect& region, double tol,
                                         int max_subdivision) {
    if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
    if (max_subdivision < 0) throw PreconditionError("subdivision cap must be >= 0");
    const double anchor = choose_region_anchor(pot, region);
    WEvaluator ev(pot, bc, anchor, tol);

    const int w_total = winding_core(ev, Contour::rectangle(region, 128), tol);
    std::vector<Eigenvalue> found;
    if (w_total == 0) return found;

    std::deque<Cell> queue;
    queue.push_back({region, 0, w_total});
    while (!queue.empty()) {
        const Cell cell = queue.front();
        queue.pop_front();
        if (cell.winding == 0) continue;
        const double diam = cell.r.diameter();
        if (cell.winding == 1) {
            if (auto eig = newton_refine(ev, cell, region, tol)) {
                found.push_back(*eig);
                continue;
            }
        }
        if (diam < 100.0 * tol) {
            const Complex lc = cell.r.center();
            found.push_back({lc, cell.winding, scaled_residual(ev.eval(lc)), diam / 2.0,
                             true});
            continue;
        }
        if (cell.depth >= max_subdivision) {
            const Complex lc = cell.r.center();
            found.push_back({lc, cell.winding, scaled_residual(ev.eval(lc)), diam / 2.0,
                             false});
            continue;
        }
        split_cell(ev, cell, tol, queue);
    }

    std::sort(found.begin(), found.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    std::vector<Eigenvalue> merged;
    for (const Eigenvalue& e : found) {
        if (!merged.empty() && std::abs(e.lambda - merged.back().lambda) <=
                                   1e-7 * std::max(1.0, std::abs(e.lambda))) {
            merged.back().multiplicity += e.multiplicity;
            merged.back().residual = std::max(merged.back().residual, e.residual);
            merged.back().enclosure_radius =
                std::max(merged.back().enclosure_radius, e.enclosure_radius);
            merged.back().refined = merged.back().refined && e.refined;
            continue;
        }
        merged.push_back(e);
    }
    int mult_sum = 0;
    for (const Eigenvalue& e : merged) mult_sum += e.multiplicity;
    if (mult_sum != w_total)
        throw ConvergenceError("refined multiplicities disagree with the region winding");
    return merged;
}

namespace {

// Shared resolvent grid: 2^14 intervals keeps the composite-Simpson and
// five-point-stencil errors a couple of orders under the 1e-6 targets.
constexpr int kResolventIntervals = 16384;

double sanitized(const std::function<double()>& f) {
    try {
        const double v = f();
        return std::isfinite(v) ? v : 0.0;
    } catch (const BranchCutError&) {
        return 0.0;
    }
}

// Composite Simpson over an odd count of uniform nodes.
double simpson_nodes(const std::vector<double>& vals, double h) {
    double sum = vals.front() + vals.back();
    for (std::size_t j = 1; j + 1 < vals.size(); ++j) sum += (j % 2 == 1 ? 4.0 : 2.0) * vals[j];
    return sum * h / 3.0;
}

}  // namespace

ResolventOutput apply_resolvent(const Potential& pot, const BoundaryForm& bc,
                                Complex lambda, const std::function<Complex(double)>& f,
                                double x_max, double anchor, double tol) {
    if (std::abs(bc.alpha0) + std::abs(bc.alpha1) <= 0.0)
        throw PreconditionError("boundary form is identically zero");
    if (!(x_max > 0.0) || !(anchor >= 0.0) || !(anchor < x_max))
        throw PreconditionError("need 0 <= anchor < x_max");
    if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");

    const int n = kResolventIntervals;
    const double h = x_max / n;
    std::vector<double> xs(n + 1);
    for (int j = 0; j <= n; ++j) xs[j] = (j == n) ? x_max : j * h;

    // Grid nodes and Simpson midpoints become exact integration nodes, so the
    // sampled values carry no dense-output interpolation error (the second
    // differences in the residual check would otherwise be dominated by it).
    std::vector<double> forced;
    forced.reserve(2 * static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        forced.push_back(xs[j]);
        if (j < n) forced.push_back(xs[j] + h / 2.0);
    }

    const WeylSolution sol = weyl_solution(pot, lambda, anchor, x_max, tol, forced);
    const Complex eta0 = sol.eta(0.0);
    const Complex deta0 = sol.eta_prime(0.0);
    const Complex w = bc.alpha0 * eta0 + bc.alpha1 * deta0;
    const double scale0 = std::max(std::abs(eta0), std::abs(deta0));
    if (std::abs(w) <= std::max(100.0 * tol, 1e-8) * scale0)
        throw PreconditionError("lambda is inside the near-eigenvalue guard");

    // chi = alpha0 phi - alpha1 psi: chi(0) = -alpha1, chi'(0) = alpha0.
    IntegrateOptions opt;
    opt.tol = std::min(tol, 1e-11);
    opt.forced = forced;
    const Trajectory chi =
        integrate_scalar(pot, lambda, 0.0, x_max, -bc.alpha1, bc.alpha0, opt);

    std::vector<Complex> eta_n(n + 1), deta_n(n + 1), chi_n(n + 1), dchi_n(n + 1),
        f_n(n + 1);
    std::vector<Complex> cf_mid(n), ef_mid(n);  // (chi f, eta f) at midpoints
    parallel_for(static_cast<std::size_t>(n) + 1, [&](std::size_t j) {
        const double x = xs[j];
        eta_n[j] = sol.eta(x);
        deta_n[j] = sol.eta_prime(x);
        const State2 c = chi.eval(x);
        chi_n[j] = c[0];
        dchi_n[j] = c[1];
        f_n[j] = f(x);
        if (j < static_cast<std::size_t>(n)) {
            const double m = x + h / 2.0;
            const Complex fm = f(m);
            cf_mid[j] = chi.eval(m)[0] * fm;
            ef_mid[j] = sol.eta(m) * fm;
        }
    });

    // Per-interval Simpson cumulatives: prefix sums of chi f, suffix sums of
    // eta f. The tail factor multiplies chi (which grows like e^{+S}), so it
    // must carry rounding relative to its own tiny magnitude, not to the full
    // integral; a suffix accumulation gives exactly that.
    std::vector<Complex> cum_cf(n + 1), tail_ef(n + 1);
    cum_cf[0] = 0.0;
    for (int j = 0; j < n; ++j)
        cum_cf[j + 1] =
            cum_cf[j] + (h / 6.0) * (chi_n[j] * f_n[j] + 4.0 * cf_mid[j] +
                                     chi_n[j + 1] * f_n[j + 1]);
    tail_ef[n] = 0.0;
    for (int j = n - 1; j >= 0; --j)
        tail_ef[j] =
            tail_ef[j + 1] + (h / 6.0) * (eta_n[j] * f_n[j] + 4.0 * ef_mid[j] +
                                          eta_n[j + 1] * f_n[j + 1]);

    ResolventOutput out;
    out.lambda = lambda;
    out.anchor = anchor;
    out.x_max = x_max;
    out.wronskian = w;
    out.wronskian_scale = scale0;
    out.x = xs;
    out.y.resize(n + 1);
    out.dy.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        out.y[j] = (eta_n[j] * cum_cf[j] + chi_n[j] * tail_ef[j]) / w;
        out.dy[j] = (deta_n[j] * cum_cf[j] + dchi_n[j] * tail_ef[j]) / w;
    }

    std::vector<double> g1(n + 1), g2(n + 1), g3(n + 1), g4(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double x = xs[j];
        g1[j] = std::norm(out.y[j]);
        g2[j] = sanitized([&] { return rho(pot, lambda, x) * std::norm(out.y[j]); });
        g3[j] = sanitized([&] {
            return rho(pot, lambda, x) * std::norm(out.dy[j]) / std::abs(pot.q(x) - lambda);
        });
        g4[j] = sanitized([&] { return std::norm(f_n[j]) / std::abs(pot.q(x) - lambda); });
    }
    out.norm_y = std::sqrt(std::max(simpson_nodes(g1, h), 0.0));
    out.norm_y_rho = std::sqrt(std::max(simpson_nodes(g2, h), 0.0));
    out.norm_y2_rho = std::sqrt(std::max(simpson_nodes(g3, h), 0.0));
    out.norm_f_weighted = std::sqrt(std::max(simpson_nodes(g4, h), 0.0));

    double f_inf = 0.0;
    for (int j = 0; j <= n; ++j) f_inf = std::max(f_inf, std::abs(f_n[j]));
    double worst = 0.0;
    for (int j = 2; j + 2 <= n; ++j) {
        const Complex second = (-out.y[j + 2] + 16.0 * out.y[j + 1] - 30.0 * out.y[j] +
                                16.0 * out.y[j - 1] - out.y[j - 2]) /
                               (12.0 * h * h);
        worst = std::max(worst, std::abs(-second + (pot.q(xs[j]) - lambda) * out.y[j] -
                                         f_n[j]));
    }
    out.ode_residual = worst / (1.0 + f_inf);
    out.boundary_residual = std::abs(bc.alpha0 * out.y[0] + bc.alpha1 * out.dy[0]);

    // Dropped tail of int eta f, bounded by the endpoint product over the
    // measured decay rates. Note its effect on y grows with chi toward x_max.
    const double f_end = std::abs(f_n[n]);
    double tail = 0.0;
    if (f_end > 0.0) {
        double rate = eval_p(pot, lambda, x_max).real();
        const double f_in = std::abs(f(0.9 * x_max));
        if (f_in > 1e-300 && f_end > 1e-300 && f_in > f_end)
            rate += std::log(f_in / f_end) / (0.1 * x_max);
        tail = std::abs(eta_n[n]) * f_end / std::max(rate, 1e-3);
    }
    out.tail_estimate = tail;
    if (tail > tol)
        throw PreconditionError("tail-truncation estimate beyond x_max exceeds the "
                                "tolerance; enlarge x_max");
    return out;
}

WeightedBoundReport weighted_bound_report(const Potential& pot, const BoundaryForm& bc,
                                          const std::function<Complex(double)>& f,
                                          double x_max, double tol) {
    const bool dirichlet_like = std::abs(bc.alpha1) == 0.0;
    const bool neumann_like = std::abs(bc.alpha0) == 0.0;
    if (!dirichlet_like && !neumann_like)
        throw PreconditionError("weighted bounds are verified for Dirichlet or Neumann "
                                "forms only");

    const ConditionReport rep = check_condition_A(pot, Complex(0.0), 0.0, x_max, 0.0, 2049);
    if (!rep.holds || !rep.margin || !(*rep.margin > 0.0))
        throw PreconditionError("the decay condition does not hold from x = 0");

    WeightedBoundReport report;
    report.c = *rep.margin;
    report.resolvent = apply_resolvent(pot, bc, Complex(0.0), f, x_max, 0.0, tol);
    report.norm_y = report.resolvent.norm_y;
    report.norm_y_rho = report.resolvent.norm_y_rho;
    report.norm_y2_rho = report.resolvent.norm_y2_rho;
    report.norm_f_weighted = report.resolvent.norm_f_weighted;

    const auto ratio = [](double lhs, double rhs) {
        if (rhs > 0.0) return lhs / rhs;
        return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    };
    const double g = report.norm_f_weighted;
    report.slack_y = ratio(report.c * report.norm_y, g);
    report.slack_pair = ratio(report.norm_y_rho * report.norm_y_rho +
                                  report.norm_y2_rho * report.norm_y2_rho,
                              g * report.norm_y);
    report.slack_y1_rho = ratio(std::sqrt(report.c) * report.norm_y_rho, g);
    report.slack_y2_rho = ratio(std::sqrt(report.c) * report.norm_y2_rho, g);
    const double cap = 1.0 + 100.0 * tol;
    report.holds = report.slack_y <= cap && report.slack_pair <= cap &&
                   report.slack_y1_rho <= cap && report.slack_y2_rho <= cap;
    return report;
}

}  // namespace halfline
