#include "halfline/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "halfline/parallel.hpp"

namespace halfline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fritsch-Carlson shape-preserving slopes for one real component.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), d(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        d[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // One-sided endpoint slopes, clamped so the end cubic stays shape-safe.
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d0 == 0.0 || (s > 0) != (d0 > 0)) return 0.0;
        if ((d0 > 0) != (d1 > 0) && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return s;
    };
    m[0] = endpoint(h[0], h[1], d[0], d[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return m;
}

}  // namespace

Potential Potential::constant(Complex c) {
    Potential p;
    p.family_ = Family::Constant;
    p.c0_ = c;
    p.x_upper_ = kInf;
    return p;
}

Potential Potential::monomial(double exponent, double phase) {
    if (!(exponent > 0.0)) throw PreconditionError("monomial potential needs exponent > 0");
    Potential p;
    p.family_ = Family::Monomial;
    p.exponent_ = exponent;
    p.phase_factor_ = std::polar(1.0, phase);
    p.x_upper_ = kInf;
    return p;
}

Potential Potential::airy() {
    Potential p;
    p.family_ = Family::Airy;
    p.x_upper_ = kInf;
    return p;
}

Potential Potential::polynomial(std::vector<Complex> coeffs) {
    if (coeffs.empty()) throw PreconditionError("polynomial potential needs coefficients");
    Potential p;
    p.family_ = Family::Polynomial;
    p.coeffs_ = std::move(coeffs);
    p.x_upper_ = kInf;
    return p;
}

Potential Potential::tabulated(std::vector<double> x, std::vector<Complex> q) {
    if (x.size() < 4 || x.size() != q.size())
        throw PreconditionError("tabulated potential needs >= 4 matching samples");
    if (x.front() != 0.0) throw PreconditionError("tabulated potential must start at x = 0");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1]))
            throw PreconditionError("tabulated abscissae must strictly increase");
    Potential p;
    p.family_ = Family::Tabulated;
    p.xs_ = std::move(x);
    p.qs_ = std::move(q);
    p.x_upper_ = p.xs_.back();
    p.knots_ = p.xs_;

    std::vector<double> re(p.qs_.size()), im(p.qs_.size());
    for (std::size_t i = 0; i < p.qs_.size(); ++i) {
        re[i] = p.qs_[i].real();
        im[i] = p.qs_[i].imag();
    }
    const auto mre = pchip_slopes(p.xs_, re);
    const auto mim = pchip_slopes(p.xs_, im);
    p.slopes_.resize(p.qs_.size());
    for (std::size_t i = 0; i < p.qs_.size(); ++i) p.slopes_[i] = Complex(mre[i], mim[i]);
    return p;
}

Complex Potential::q(double x) const {
    switch (family_) {
        case Family::Constant:
            return c0_;
        case Family::Monomial:
            return std::pow(x, exponent_) * phase_factor_;
        case Family::Airy:
            return Complex(0.0, x);
        case Family::Polynomial: {
            Complex acc = coeffs_.back();
            for (std::size_t i = coeffs_.size() - 1; i-- > 0;) acc = acc * x + coeffs_[i];
            return acc;
        }
        case Family::Tabulated: {
            if (x < xs_.front() - 1e-12 || x > xs_.back() + 1e-12)
                throw PreconditionError("tabulated potential evaluated outside its samples");
            x = std::clamp(x, xs_.front(), xs_.back());
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            std::size_t i = std::min<std::size_t>(
                xs_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                    0, (it - xs_.begin()) - 1)));
            const double h = xs_[i + 1] - xs_[i];
            const double t = (x - xs_[i]) / h;
            const double t2 = t * t, t3 = t2 * t;
            const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
            const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
            return h00 * qs_[i] + h10 * h * slopes_[i] + h01 * qs_[i + 1] +
                   h11 * h * slopes_[i + 1];
        }
    }
    return {};
}

Complex Potential::dq(double x) const {
    switch (family_) {
        case Family::Constant:
            return Complex(0.0, 0.0);
        case Family::Monomial:
            return exponent_ * std::pow(x, exponent_ - 1.0) * phase_factor_;
        case Family::Airy:
            return Complex(0.0, 1.0);
        case Family::Polynomial: {
            if (coeffs_.size() == 1) return Complex(0.0, 0.0);
            Complex acc = double(coeffs_.size() - 1) * coeffs_.back();
            for (std::size_t k = coeffs_.size() - 2; k >= 1; --k) acc = acc * x + double(k) * coeffs_[k];
            return acc;
        }
        case Family::Tabulated: {
            if (x < xs_.front() - 1e-12 || x > xs_.back() + 1e-12)
                throw PreconditionError("tabulated potential evaluated outside its samples");
            x = std::clamp(x, xs_.front(), xs_.back());
            auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
            std::size_t i = std::min<std::size_t>(
                xs_.size() - 2, static_cast<std::size_t>(std::max<std::ptrdiff_t>(
                                    0, (it - xs_.begin()) - 1)));
            const double h = xs_[i + 1] - xs_[i];
            const double t = (x - xs_[i]) / h;
            const double t2 = t * t;
            const double g00 = (6 * t2 - 6 * t) / h, g10 = 3 * t2 - 4 * t + 1;
            const double g01 = (-6 * t2 + 6 * t) / h, g11 = 3 * t2 - 2 * t;
            return g00 * qs_[i] + g10 * slopes_[i] + g01 * qs_[i + 1] + g11 * slopes_[i + 1];
        }
    }
    return {};
}

std::string Potential::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Constant:
            os << "constant(" << c0_.real() << (c0_.imag() < 0 ? "" : "+") << c0_.imag() << "i)";
            break;
        case Family::Monomial:
            os << "x^" << exponent_ << " * exp(i*arg), arg factor (" << phase_factor_.real()
               << "," << phase_factor_.imag() << ")";
            break;
        case Family::Airy:
            os << "i*x";
            break;
        case Family::Polynomial:
            os << "polynomial(degree " << coeffs_.size() - 1 << ")";
            break;
        case Family::Tabulated:
            os << "tabulated(" << xs_.size() << " samples on [0," << xs_.back() << "])";
            break;
    }
    return os.str();
}

Complex eval_p(const Potential& pot, Complex lambda, double x) {
    const Complex radicand = pot.q(x) - lambda;
    const Complex p = std::sqrt(radicand);
    // Principal branch: Re p >= 0 always, with equality exactly on the cut.
    if (!(p.real() > 0.0))
        throw BranchCutError("q(x) - lambda on the closed negative real axis at x = " +
                             std::to_string(x));
    return p;
}

double rho(const Potential& pot, Complex lambda, double x) {
    const Complex p = eval_p(pot, lambda, x);
    const Complex radicand = pot.q(x) - lambda;
    return p.real() - 0.25 * std::abs(pot.dq(x) / radicand);
}

namespace {

// Shared grid sweep. lhs_minus_rhs must return the signed margin at a point
// or throw BranchCutError; non-finite margins count as violations.
template <class F>
ConditionReport sweep(double x_lo, double x_hi, int n_grid, double c, F&& margin_at) {
    if (!(x_hi > x_lo) || n_grid < 2)
        throw PreconditionError("condition check needs x_hi > x_lo and n_grid >= 2");
    ConditionReport rep;
    rep.c = c;
    rep.x_lo = x_lo;
    rep.x_hi = x_hi;
    rep.n_grid = n_grid;
    rep.holds = true;
    const double dx = (x_hi - x_lo) / (n_grid - 1);
    for (int i = 0; i < n_grid; ++i) {
        const double x = (i == n_grid - 1) ? x_hi : x_lo + i * dx;
        double m;
        bool valid = true;
        try {
            m = margin_at(x);
            if (!std::isfinite(m)) valid = false;
        } catch (const BranchCutError&) {
            valid = false;
        }
        if (!valid) {
            rep.holds = false;
            if (!rep.first_violation) rep.first_violation = x;
            continue;
        }
        if (!rep.margin || m < *rep.margin) rep.margin = m;
        if (m < 0.0) {
            rep.holds = false;
            if (!rep.first_violation) rep.first_violation = x;
        }
    }
    return rep;
}

}  // namespace

ConditionReport check_condition_A(const Potential& pot, Complex lambda, double x_lo,
                                  double x_hi, double c, int n_grid) {
    return sweep(x_lo, x_hi, n_grid, c, [&](double x) { return rho(pot, lambda, x) - c; });
}

ConditionReport check_condition_B(const Potential& pot, Complex lambda, double x_lo,
                                  double x_hi, double c, double eps, int n_grid) {
    if (!(eps > 0.0)) throw PreconditionError("condition B needs eps > 0");
    return sweep(x_lo, x_hi, n_grid, c, [&](double x) {
        const Complex p = eval_p(pot, lambda, x);
        const double half_log_deriv = 0.5 * std::abs(pot.dq(x) / (pot.q(x) - lambda));
        return p.real() - (0.5 + eps) * half_log_deriv - c;
    });
}

ConditionReport check_theorem3(const Potential& pot, double kappa, double delta,
                               double x_lo, double x_hi, int n_grid) {
    if (!(kappa > 0.0 && kappa < M_PI))
        throw PreconditionError("theorem-3 check needs kappa in (0, pi)");
    if (!(delta > 0.0 && delta < 1.0))
        throw PreconditionError("theorem-3 check needs delta in (0, 1)");
    const double bound =
        4.0 * delta * std::pow(std::tan(kappa), 1.5) * std::sin(0.5 * kappa);
    return sweep(x_lo, x_hi, n_grid, bound, [&](double x) {
        const Complex qv = pot.q(x);
        if (qv == Complex(0.0, 0.0) || std::abs(std::arg(qv)) > M_PI - kappa)
            throw BranchCutError("q outside the sector");
        const double ratio = std::abs(pot.dq(x)) / std::pow(std::abs(qv), 1.5);
        return bound - ratio;
    });
}

std::optional<double> find_anchor(const Potential& pot, Complex lambda, double c,
                                  double x_max, int n_grid) {
    if (!(x_max > 0.0) || n_grid < 2)
        throw PreconditionError("find_anchor needs x_max > 0 and n_grid >= 2");
    const double dx = x_max / (n_grid - 1);
    // Suffix scan: the anchor is the first grid point from which every later
    // grid point satisfies rho >= c.
    int first_good = -1;
    for (int i = n_grid - 1; i >= 0; --i) {
        const double x = (i == n_grid - 1) ? x_max : i * dx;
        bool ok = false;
        try {
            const double m = rho(pot, lambda, x) - c;
            ok = std::isfinite(m) && m >= 0.0;
        } catch (const BranchCutError&) {
            ok = false;
        }
        if (!ok) break;
        first_good = i;
    }
    if (first_good < 0) return std::nullopt;
    return first_good == n_grid - 1 ? x_max : first_good * dx;
}

RegionMap sample_N_region(const Potential& pot, double re_lo, double re_hi, int nx,
                          double im_lo, double im_hi, int ny, double c, double x_max,
                          int n_grid) {
    if (nx < 1 || ny < 1) throw PreconditionError("region sampling needs nx, ny >= 1");
    RegionMap map;
    map.re_lo = re_lo;
    map.re_hi = re_hi;
    map.im_lo = im_lo;
    map.im_hi = im_hi;
    map.nx = nx;
    map.ny = ny;
    map.samples.resize(static_cast<std::size_t>(nx) * ny);
    const double dre = nx > 1 ? (re_hi - re_lo) / (nx - 1) : 0.0;
    const double dim = ny > 1 ? (im_hi - im_lo) / (ny - 1) : 0.0;
    parallel_for(map.samples.size(), [&](std::size_t k) {
        const int iy = static_cast<int>(k) / nx;
        const int ix = static_cast<int>(k) % nx;
        RegionSample s;
        s.lambda = Complex(re_lo + ix * dre, im_lo + iy * dim);
        const auto anchor = find_anchor(pot, s.lambda, c, x_max, n_grid);
        if (anchor) {
            s.member = true;
            s.anchor = *anchor;
            const auto rep = check_condition_A(pot, s.lambda, *anchor, x_max, c, n_grid);
            s.margin = rep.margin.value_or(0.0);
        }
        map.samples[k] = s;
    });
    for (const auto& s : map.samples) map.member_count += s.member ? 1 : 0;
    return map;
}

std::vector<double> rho_window_minima(const Potential& pot, Complex lambda, double x0,
                                      int n_windows, int samples_per_window) {
    if (!(x0 > 0.0) || n_windows < 1)
        throw PreconditionError("rho windows need x0 > 0 and n_windows >= 1");
    std::vector<double> out;
    out.reserve(n_windows);
    double lo = x0;
    for (int w = 0; w < n_windows; ++w) {
        const double hi = 2.0 * lo;
        double min_rho = kInf;
        for (int i = 0; i < samples_per_window; ++i) {
            const double x = lo + (hi - lo) * i / (samples_per_window - 1);
            double r;
            try {
                r = rho(pot, lambda, x);
            } catch (const BranchCutError&) {
                r = -kInf;
            }
            min_rho = std::min(min_rho, r);
        }
        out.push_back(min_rho);
        lo = hi;
    }
    return out;
}

}  // namespace halfline
