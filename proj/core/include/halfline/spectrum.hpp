#pragma once

#include <functional>
#include <vector>

#include "halfline/potential.hpp"
#include "halfline/propagate.hpp"
#include "halfline/types.hpp"
#include "halfline/weyl.hpp"

namespace halfline {

// Boundary form U(y) = alpha0 y(0) + alpha1 y'(0); |alpha0| + |alpha1| > 0.
struct BoundaryForm {
    Complex alpha0{1.0, 0.0};
    Complex alpha1{0.0, 0.0};

    static BoundaryForm dirichlet() { return {Complex(1.0), Complex(0.0)}; }
    static BoundaryForm neumann() { return {Complex(0.0), Complex(1.0)}; }
};

struct ComplexRect {
    double re_lo = 0.0, re_hi = 0.0;
    double im_lo = 0.0, im_hi = 0.0;

    Complex center() const { return {(re_lo + re_hi) / 2.0, (im_lo + im_hi) / 2.0}; }
    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    double diameter() const;  // diagonal length
    bool contains(Complex z, double pad = 0.0) const;
};

// Closed curve traversed counterclockwise, parameterized by t in [0,1].
class Contour {
  public:
    static Contour circle(Complex center, double radius, int n_samples = 64);
    static Contour rectangle(const ComplexRect& rect, int n_samples = 64);

    Complex point(double t) const;
    int n_samples() const { return n_samples_; }

  private:
    Contour() = default;
    bool is_circle_ = true;
    Complex center_;
    double radius_ = 0.0;
    ComplexRect rect_;
    int n_samples_ = 0;
};

// A zero of the characteristic function came within the sample guard of the
// contour; the winding count would be unreliable.
class NearZeroOnContour : public PreconditionError {
  public:
    using PreconditionError::PreconditionError;
};

struct Eigenvalue {
    Complex lambda;
    int multiplicity = 1;
    // |W(lambda)| / max(|eta(0)|, |eta'(0)|). The characteristic function
    // itself carries the arbitrary scale exp(int Re p) of the anchor
    // normalization, so only this scaled form can be driven to the refinement
    // tolerance.
    double residual = 0.0;
    double enclosure_radius = 0.0;
    // False when the subdivision cap was hit and the entry is an unrefined
    // enclosure (lambda = cell center, enclosure_radius = half-diameter).
    bool refined = true;
};

// W(lambda) = alpha0 eta(0) + alpha1 eta'(0) under the fixed-anchor
// normalization eta(anchor) = mu, eta'(anchor) = 1. Analytic in lambda while
// the anchor stays valid; values at different anchors differ by a
// nonvanishing analytic factor, so zeros and windings agree but magnitudes
// are not comparable across anchors.
Complex char_function(const Potential& pot, const BoundaryForm& bc, Complex lambda,
                      double anchor, double tol = 1e-10);

struct CharValue {
    Complex w;
    double scale = 0.0;  // max(|eta(0)|, |eta'(0)|), the natural size of W
};

CharValue char_function_with_scale(const Potential& pot, const BoundaryForm& bc,
                                   Complex lambda, double anchor, double tol = 1e-10);

// Argument-principle winding of W around the contour: phase unwrapping over
// the samples, refined by bisection until consecutive jumps are below pi/2.
// Throws NearZeroOnContour when min |W|/scale over the samples drops under
// max(1e3 tol, 1e-7), and ConvergenceError if refinement fails to settle.
int winding_number(const Potential& pot, const BoundaryForm& bc, const Contour& contour,
                   double anchor, double tol = 1e-10);

// Anchor used for every characteristic-function evaluation inside the region:
// the largest condition-A onset over a coarse lambda grid, plus a safety
// margin, so one normalization is analytic across the whole search.
double choose_region_anchor(const Potential& pot, const ComplexRect& region);

// Recursive contour subdivision on the region until each cell has winding
// <= 1 or diameter < 100 tol; winding-1 cells are polished by Newton steps on
// W (central-difference derivative, step 1e-5 of the cell diameter) until the
// scaled residual is <= tol. Clusters that never isolate are reported with
// multiplicity equal to their winding. Cells still compound when the
// subdivision cap is reached come back with refined = false. The result is
// sorted by (Re, Im) and its multiplicities sum to the region winding.
std::vector<Eigenvalue> find_eigenvalues(const Potential& pot, const BoundaryForm& bc,
                                         const ComplexRect& region, double tol = 1e-10,
                                         int max_subdivision = 40);

struct ResolventOutput {
    Complex lambda;
    double anchor = 0.0;
    double x_max = 0.0;

    // Shared uniform grid on [0, x_max] with y = R_lambda f and y' on it.
    std::vector<double> x;
    std::vector<Complex> y;
    std::vector<Complex> dy;

    Complex wronskian;             // W(lambda) of the boundary form
    double wronskian_scale = 0.0;  // max(|eta(0)|, |eta'(0)|)

    double norm_y = 0.0;           // ||y||_{L2}
    double norm_y_rho = 0.0;       // ||y||_{L2(rho)}
    double norm_y2_rho = 0.0;      // ||y'/p||_{L2(rho)}
    double norm_f_weighted = 0.0;  // ||f||_{L2(1/|q-lambda|)}

    // max_j |-y''(x_j) + (q - lambda) y - f| / (1 + ||f||_inf), y'' by a
    // fourth-order five-point stencil on interior points.
    double ode_residual = 0.0;
    double boundary_residual = 0.0;  // |alpha0 y(0) + alpha1 y'(0)|
    // Bound on the dropped integral beyond x_max from the measured decay
    // rates of eta and f.
    double tail_estimate = 0.0;
};

// Green-formula resolvent y(x) = (eta/W) int_0^x chi f + (chi/W) int_x^xmax
// eta f with chi = alpha0 phi - alpha1 psi, phi(0) = 0, phi'(0) = 1,
// psi(0) = 1, psi'(0) = 0. f is sampled on [0, x_max] and must carry the
// whole mass of int eta f: the tail estimate beyond x_max has to stay under
// tol or the call refuses (PreconditionError). Near-eigenvalue guard:
// |W| <= max(100 tol, 1e-8) scale is also a PreconditionError.
ResolventOutput apply_resolvent(const Potential& pot, const BoundaryForm& bc,
                                Complex lambda, const std::function<Complex(double)>& f,
                                double x_max, double anchor, double tol = 1e-10);

// Weighted-norm verification at lambda = 0 for a Dirichlet or Neumann form,
// with the decay condition holding from x = 0 (anchor 0, constant c = min
// rho). Checks c ||y|| <= ||g||, ||y1||_rho^2 + ||y2||_rho^2 <= ||g|| ||y||,
// and sqrt(c) ||y_i||_rho <= ||g|| for i = 1, 2, where ||g|| =
// ||f||_{L2(1/|q|)}, each up to a (1 + 100 tol) slack factor.
struct WeightedBoundReport {
    double c = 0.0;  // min rho over [0, x_max]
    double norm_y = 0.0;
    double norm_y_rho = 0.0;
    double norm_y2_rho = 0.0;
    double norm_f_weighted = 0.0;
    // Ratios lhs/rhs of the four checks; 0 when both sides vanish.
    double slack_y = 0.0;
    double slack_pair = 0.0;
    double slack_y1_rho = 0.0;
    double slack_y2_rho = 0.0;
    bool holds = false;
    ResolventOutput resolvent;
};

WeightedBoundReport weighted_bound_report(const Potential& pot, const BoundaryForm& bc,
                                          const std::function<Complex(double)>& f,
                                          double x_max, double tol = 1e-10);

}  // namespace halfline
