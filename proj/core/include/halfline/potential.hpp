#pragma once

#include <optional>
#include <string>
#include <vector>

#include "halfline/types.hpp"

namespace halfline {

// Complex potential q(x) on the half-line x >= 0. Built-in families know
// their own derivative; tabulated data uses monotone (Fritsch-Carlson) cubic
// interpolation applied to real and imaginary parts separately, with the
// interpolant's own piecewise derivative.
class Potential {
  public:
    enum class Family { Constant, Monomial, Airy, Polynomial, Tabulated };

    // Inert placeholder (evaluation range is empty); use the factories.
    Potential() = default;

    static Potential constant(Complex c);
    // q(x) = x^exponent * exp(i*phase), exponent > 0. For exponent < 1 the
    // derivative is unbounded at 0; condition checks there simply fail.
    static Potential monomial(double exponent, double phase);
    // q(x) = i*x, kept exact rather than routed through monomial phases.
    static Potential airy();
    // q(x) = sum_k coeffs[k] * x^k.
    static Potential polynomial(std::vector<Complex> coeffs);
    // Samples (x_k, q_k), x strictly increasing, x_0 == 0, at least 4 points.
    static Potential tabulated(std::vector<double> x, std::vector<Complex> q);

    Complex q(double x) const;
    Complex dq(double x) const;

    // Abscissae where the interpolant is only C^1; integrators must place
    // step points on them. Empty for smooth families.
    const std::vector<double>& knots() const { return knots_; }
    // Evaluation is refused beyond this point (tabulated data is never
    // extrapolated); +inf for the analytic families.
    double x_upper() const { return x_upper_; }
    Family family() const { return family_; }
    std::string describe() const;

  private:
    Family family_ = Family::Constant;
    Complex c0_{0.0, 0.0};
    double exponent_ = 0.0;
    Complex phase_factor_{1.0, 0.0};
    double x_upper_ = 0.0;
    std::vector<Complex> coeffs_;
    std::vector<double> xs_;
    std::vector<Complex> qs_;
    std::vector<Complex> slopes_;
    std::vector<double> knots_;
};

// Principal square root p_lambda(x) of q(x) - lambda with Re p > 0. Throws
// BranchCutError when the radicand lies on the closed negative real axis.
Complex eval_p(const Potential& pot, Complex lambda, double x);

// Decay weight rho_lambda(x) = Re p - |p'/p|/2 = Re p - |q'/(q-lambda)|/4.
double rho(const Potential& pot, Complex lambda, double x);

struct ConditionReport {
    bool holds = false;
    double c = 0.0;                         // constant the check ran against
    std::optional<double> margin;           // min over branch-valid grid points of lhs - rhs
    std::optional<double> first_violation;  // smallest failing grid abscissa
    double x_lo = 0.0;
    double x_hi = 0.0;
    int n_grid = 0;
};

// Re p >= c + |p'/p|/2 on a uniform grid over [x_lo, x_hi].
ConditionReport check_condition_A(const Potential& pot, Complex lambda, double x_lo,
                                  double x_hi, double c, int n_grid = 2049);

// Strengthened form Re p >= c + (1/2 + eps)|p'/p|, eps > 0.
ConditionReport check_condition_B(const Potential& pot, Complex lambda, double x_lo,
                                  double x_hi, double c, double eps, int n_grid = 2049);

// Sector hypothesis: q(x) stays in {|arg z| <= pi - kappa} and
// |q'/q^{3/2}| < 4*delta*tan(kappa)^{3/2}*sin(kappa/2), 0 < delta < 1.
ConditionReport check_theorem3(const Potential& pot, double kappa, double delta,
                               double x_lo, double x_hi, int n_grid = 2049);

// Smallest grid abscissa a (uniform grid over [0, x_max]) such that the
// condition-A check with constant c holds on [a, x_max]; nullopt if none.
std::optional<double> find_anchor(const Potential& pot, Complex lambda, double c,
                                  double x_max, int n_grid = 2049);

struct RegionSample {
    Complex lambda;
    bool member = false;
    double anchor = 0.0;  // valid only when member
    double margin = 0.0;  // min over [anchor, x_max] of rho - c, when member
};

struct RegionMap {
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0, im_hi = 0.0;
    int nx = 0, ny = 0;
    std::vector<RegionSample> samples;  // row-major, real part fastest
    int member_count = 0;
};

// Membership map of the lambda rectangle: lambda is a member when some anchor
// a <= x_max makes condition A hold with constant c on [a, x_max].
RegionMap sample_N_region(const Potential& pot, double re_lo, double re_hi, int nx,
                          double im_lo, double im_hi, int ny, double c, double x_max,
                          int n_grid = 513);

// Minimum of rho over the doubling windows [x0*2^k, x0*2^{k+1}], k < n_windows.
// Diagnostic for resolvent compactness: the weight must grow without bound.
std::vector<double> rho_window_minima(const Potential& pot, Complex lambda, double x0,
                                      int n_windows, int samples_per_window = 65);

}  // namespace halfline
