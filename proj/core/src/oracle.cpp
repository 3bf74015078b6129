#include "halfline/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "halfline/parallel.hpp"

namespace halfline {

namespace {

// Complex tridiagonal LU with partial pivoting (LAPACK zgttrf/zgtts2 layout;
// pivoting fills the second superdiagonal).
struct TriLU {
    int n = 0;
    std::vector<Complex> dl, d, du, du2;
    std::vector<int> piv;

    TriLU(std::vector<Complex> sub, std::vector<Complex> diag, std::vector<Complex> sup)
        : n(static_cast<int>(diag.size())),
          dl(std::move(sub)),
          d(std::move(diag)),
          du(std::move(sup)),
          du2(n > 2 ? n - 2 : 0),
          piv(n) {
        for (int i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                piv[i] = i;
                if (std::abs(d[i]) == 0.0)
                    throw ConvergenceError("singular pivot in the tridiagonal factorization");
                const Complex fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
                if (i + 2 < n) du2[i] = 0.0;
            } else {
                piv[i] = i + 1;
                const Complex fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const Complex temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
            }
        }
        piv[n - 1] = n - 1;
        if (std::abs(d[n - 1]) == 0.0)
            throw ConvergenceError("singular pivot in the tridiagonal factorization");
    }

    void solve(std::vector<Complex>& b) const {
        for (int i = 0; i + 1 < n; ++i) {
            if (piv[i] == i) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const Complex temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (int i = n - 3; i >= 0; --i)
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
};

struct RitzPair {
    Complex lambda;
    std::vector<Complex> vec;
};

// Deterministic start vector; fixed-seed LCG so runs are identical across
// platforms and thread counts.
std::vector<Complex> start_vector(int dim) {
    std::uint64_t s = 0x243f6a8885a308d3ULL;
    auto next = [&s] {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(s >> 11) * 0x1p-53 - 0.5;
    };
    std::vector<Complex> v(dim);
    for (auto& z : v) {
        const double re = next();
        const double im = next();
        z = {re, im};
    }
    return v;
}

// Shift-invert Arnoldi around 0: dominant eigenvalues of A^{-1} are the
// smallest-|lambda| eigenvalues of A. Modified Gram-Schmidt with a second
// orthogonalization pass; the projected Hessenberg block goes to a dense
// complex eigensolver.
std::vector<RitzPair> smallest_eigenpairs(const TriLU& lu, int count) {
    const int dim = lu.n;
    const int m = std::min(std::max(2 * count + 28, 72), dim);
    std::vector<std::vector<Complex>> basis;
    basis.reserve(m + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);

    std::vector<Complex> v0 = start_vector(dim);
    double nrm = 0.0;
    for (const Complex& z : v0) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (Complex& z : v0) z /= nrm;
    basis.push_back(std::move(v0));

    int steps = m;
    for (int j = 0; j < m; ++j) {
        std::vector<Complex> w = basis[j];
        lu.solve(w);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                Complex proj = 0.0;
                for (int k = 0; k < dim; ++k) proj += std::conj(basis[i][k]) * w[k];
                for (int k = 0; k < dim; ++k) w[k] -= proj * basis[i][k];
                h(i, j) += proj;
            }
        }
        double beta = 0.0;
        for (const Complex& z : w) beta += std::norm(z);
        beta = std::sqrt(beta);
        h(j + 1, j) = beta;
        if (beta < 1e-14) {
            steps = j + 1;
            break;
        }
        for (Complex& z : w) z /= beta;
        basis.push_back(std::move(w));
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.topLeftCorner(steps, steps));
    if (es.info() != Eigen::Success)
        throw ConvergenceError("projected eigenproblem failed to converge");

    struct Ritz {
        Complex theta;
        int idx;
    };
    std::vector<Ritz> ritz(steps);
    for (int i = 0; i < steps; ++i) ritz[i] = {es.eigenvalues()(i), i};
    std::sort(ritz.begin(), ritz.end(), [](const Ritz& a, const Ritz& b) {
        return std::abs(a.theta) > std::abs(b.theta);
    });

    if (count > steps)
        throw ConvergenceError("Krylov space too small for the requested count");
    std::vector<RitzPair> out;
    const double beta_last = std::abs(h(steps, steps - 1));
    for (int r = 0; r < count; ++r) {
        const Complex theta = ritz[r].theta;
        if (std::abs(theta) < 1e-280)
            throw ConvergenceError("shift-invert Ritz value vanished");
        const auto s = es.eigenvectors().col(ritz[r].idx);
        // Arnoldi residual of the inverse problem; the induced error on
        // lambda = 1/theta is resid / |theta|^2, which must stay far below
        // the h^2 discretization error the Richardson step measures.
        const double resid = beta_last * std::abs(s(steps - 1));
        const double lambda_err = resid / std::norm(theta);
        if (lambda_err > 1e-6 * std::max(1.0, 1.0 / std::abs(theta)))
            throw ConvergenceError("Ritz pair did not converge; increase the grid count");
        RitzPair rp;
        rp.lambda = 1.0 / theta;
        rp.vec.assign(dim, 0.0);
        for (int i = 0; i < steps; ++i) {
            const Complex c = s(i);
            const std::vector<Complex>& vi = basis[i];
            for (int k = 0; k < dim; ++k) rp.vec[k] += c * vi[k];
        }
        out.push_back(std::move(rp));
    }
    std::sort(out.begin(), out.end(), [](const RitzPair& a, const RitzPair& b) {
        const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
        if (ma != mb) return ma < mb;
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

std::vector<RitzPair> fd_solve(const Potential& pot, double length, int intervals,
                               const BoundaryForm& bc, int count) {
    const int dim = intervals - 1;
    const double h = length / intervals;
    std::vector<Complex> dl(dim, -1.0 / (h * h));
    std::vector<Complex> du(dim, -1.0 / (h * h));
    std::vector<Complex> diag(dim);
    for (int j = 1; j <= dim; ++j) diag[j - 1] = 2.0 / (h * h) + pot.q(j * h);
    if (std::abs(bc.alpha1) != 0.0) {
        // alpha0 y0 + alpha1 (-3 y0 + 4 y1 - y2)/(2h) = 0, eliminated into the
        // first row through y0 = beta (4 y1 - y2).
        const Complex beta = bc.alpha1 / (3.0 * bc.alpha1 - 2.0 * h * bc.alpha0);
        diag[0] = (2.0 - 4.0 * beta) / (h * h) + pot.q(h);
        du[0] = (beta - 1.0) / (h * h);
    } else if (std::abs(bc.alpha0) == 0.0) {
        throw PreconditionError("boundary form is identically zero");
    }
    TriLU lu(std::move(dl), std::move(diag), std::move(du));
    std::vector<RitzPair> pairs = smallest_eigenpairs(lu, count);

    const int tail_from = dim - std::max(dim / 20, 1);
    for (const RitzPair& rp : pairs) {
        double vmax = 0.0, tmax = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double a = std::abs(rp.vec[k]);
            vmax = std::max(vmax, a);
            if (k >= tail_from) tmax = std::max(tmax, a);
        }
        if (tmax > std::exp(-10.0) * vmax)
            throw PreconditionError(
                "eigenfunction has not decayed by e^-10 before the wall; "
                "increase the truncation length");
    }
    return pairs;
}

}  // namespace

std::vector<FDEigen> fd_eigenvalues(const Potential& pot, const FDProblem& problem,
                                    int count) {
    if (problem.n < 100) throw PreconditionError("grid count must be at least 100");
    if (!(problem.length > 0.0)) throw PreconditionError("truncation length must be > 0");
    if (count < 1 || count > problem.n / 8)
        throw PreconditionError("requested count out of range for the grid");
    if (problem.length > pot.x_upper())
        throw PreconditionError("potential not evaluable up to the truncation length");

    std::vector<std::vector<RitzPair>> runs(2);
    parallel_for(2, [&](std::size_t i) {
        runs[i] = fd_solve(pot, problem.length, problem.n * (i == 0 ? 1 : 2), problem.bc,
                           count);
    });

    std::vector<FDEigen> out;
    std::vector<bool> used(count, false);
    for (int i = 0; i < count; ++i) {
        const Complex fine = runs[1][i].lambda;
        int best = -1;
        double best_d = 0.0;
        for (int j = 0; j < count; ++j) {
            if (used[j]) continue;
            const double dist = std::abs(runs[0][j].lambda - fine);
            if (best < 0 || dist < best_d) {
                best = j;
                best_d = dist;
            }
        }
        used[best] = true;
        const Complex coarse = runs[0][best].lambda;
        out.push_back({fine + (fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0});
    }
    std::sort(out.begin(), out.end(), [](const FDEigen& a, const FDEigen& b) {
        const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
        if (ma != mb) return ma < mb;
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

namespace {

constexpr long double kAi0 = 0.35502805388781723926L;    // Ai(0)
constexpr long double kDAi0 = -0.25881940379280679840L;  // Ai'(0)
constexpr long double kPiL = std::numbers::pi_v<long double>;

// Ai and Ai'' from the two power-series solutions f (f(0)=1, f'(0)=0) and
// g (g(0)=0, g'(0)=1) of w'' = t w.
long double airy_taylor(double t, bool second) {
    if (t == 0.0) return second ? 0.0L : kAi0;
    const long double tl = t;
    const long double t3 = tl * tl * tl;
    long double uf = 1.0L;  // f-series term, k = 0
    long double ug = tl;    // g-series term
    long double f = second ? 0.0L : uf;
    long double g = second ? 0.0L : ug;
    for (int k = 1; k <= 120; ++k) {
        uf *= t3 / (3.0L * k * (3.0L * k - 1.0L));
        ug *= t3 / (3.0L * k * (3.0L * k + 1.0L));
        long double tf = uf, tg = ug;
        if (second) {
            // d^2/dt^2 of t^{3k} and t^{3k+1}
            tf *= (3.0L * k) * (3.0L * k - 1.0L) / (tl * tl);
            tg *= (3.0L * k + 1.0L) * (3.0L * k) / (tl * tl);
        }
        f += tf;
        g += tg;
        if (fabsl(uf) < 1e-30L && fabsl(ug) < 1e-30L) break;
    }
    return kAi0 * f + kDAi0 * g;
}

// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)); the classical
// asymptotic coefficients.
long double next_u(long double u, int k) {
    return u * (6.0L * k - 5.0L) * (6.0L * k - 3.0L) * (6.0L * k - 1.0L) /
           (216.0L * k * (2.0L * k - 1.0L));
}

double airy_asym_right(double t) {
    const long double zeta = 2.0L / 3.0L * powl(static_cast<long double>(t), 1.5L);
    long double sum = 1.0L;
    long double term = 1.0L;
    long double u = 1.0L;
    for (int k = 1; k <= 80; ++k) {
        u = next_u(u, k);
        const long double cand = (k % 2 == 0 ? u : -u) / powl(zeta, k);
        if (fabsl(cand) >= fabsl(term) && k > 1) break;  // optimal truncation
        term = cand;
        sum += term;
    }
    return static_cast<double>(expl(-zeta) /
                               (2.0L * sqrtl(kPiL) * powl(static_cast<long double>(t), 0.25L)) *
                               sum);
}

double airy_asym_left(double t) {
    const long double s = -static_cast<long double>(t);
    const long double zeta = 2.0L / 3.0L * powl(s, 1.5L);
    // P = sum (-1)^k u_{2k} zeta^{-2k}, Q = sum (-1)^k u_{2k+1} zeta^{-2k-1}
    long double p = 0.0L, q = 0.0L;
    long double u = 1.0L;
    long double prev = 1e300L;
    for (int k = 0; k <= 80; ++k) {
        const long double mag = fabsl(u) / powl(zeta, k);
        if (mag >= prev) break;
        prev = mag;
        const long double signed_term = ((k / 2) % 2 == 0 ? 1.0L : -1.0L) * u / powl(zeta, k);
        if (k % 2 == 0)
            p += signed_term;
        else
            q += signed_term;
        u = next_u(u, k + 1);
    }
    const long double phase = zeta - kPiL / 4.0L;
    return static_cast<double>((cosl(phase) * p + sinl(phase) * q) /
                               (sqrtl(kPiL) * powl(s, 0.25L)));
}

}  // namespace

double airy_ai(double t) {
    if (std::abs(t) <= 6.0) return static_cast<double>(airy_taylor(t, false));
    return t > 0.0 ? airy_asym_right(t) : airy_asym_left(t);
}

double airy_ai_second(double t) {
    if (std::abs(t) > 6.0)
        throw PreconditionError("second derivative is evaluated on |t| <= 6 only");
    return static_cast<double>(airy_taylor(t, true));
}

double airy_zero(int n) {
    if (n < 1 || n > 20) throw PreconditionError("zero index must be in [1, 20]");
    const double z = 3.0 * std::numbers::pi * (4.0 * n - 1.0) / 8.0;
    const double guess = -std::pow(z, 2.0 / 3.0) *
                         (1.0 + 5.0 / (48.0 * z * z) - 5.0 / (36.0 * z * z * z * z));
    double lo = guess - 0.3, hi = guess + 0.3;
    double flo = airy_ai(lo), fhi = airy_ai(hi);
    if (flo * fhi > 0.0) {
        lo = guess - 0.6;
        hi = guess + 0.6;
        flo = airy_ai(lo);
        fhi = airy_ai(hi);
        if (flo * fhi > 0.0)
            throw ConvergenceError("bracketing failed for the requested zero");
    }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = airy_ai(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace halfline
