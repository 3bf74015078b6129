#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "halfline/potential.hpp"
#include "halfline/types.hpp"

namespace halfline {

using State2 = std::array<Complex, 2>;

// (y, y') data of the scalar equation -y'' + (q - lambda) y = 0 at x.
struct ScalarState {
    double x = 0.0;
    Complex y;
    Complex dy;
};

// (y1, y2) = (y, y'/p) data of the first-order system at x.
struct SystemState {
    double x = 0.0;
    Complex y1;
    Complex y2;
};

struct TrajectoryNode {
    double x;
    State2 y;
    State2 f;  // derivative at x, reused for dense output
};

// Output of the adaptive Dormand-Prince 5(4) stepper (PI step control).
// Nodes are stored in integration order; x may decrease for backward runs.
// Dense evaluation is cubic Hermite on each accepted step.
class Trajectory {
  public:
    const std::vector<TrajectoryNode>& nodes() const { return nodes_; }
    const TrajectoryNode& front() const { return nodes_.front(); }
    const TrajectoryNode& back() const { return nodes_.back(); }
    double x_front() const { return nodes_.front().x; }
    double x_back() const { return nodes_.back().x; }

    State2 eval(double x) const;
    State2 eval_derivative(double x) const;

    long steps_accepted() const { return accepted_; }
    long steps_rejected() const { return rejected_; }
    // Sum of accepted-step error-norm estimates; diagnostic only.
    double error_accumulated() const { return err_accum_; }

  private:
    friend class Stepper;
    std::size_t locate(double x) const;
    std::vector<TrajectoryNode> nodes_;
    long accepted_ = 0;
    long rejected_ = 0;
    double err_accum_ = 0.0;
};

struct IntegrateOptions {
    double tol = 1e-10;            // absolute and relative tolerance
    double max_step = 0.0;         // 0: unlimited
    std::vector<double> forced;    // abscissae the stepper must land on exactly
    double magnitude_cap = 1e140;  // BlowupError beyond this state magnitude
};

// State (y, y'); y'' = (q - lambda) y. Valid on any span, including below an
// anchor, since no square root of q - lambda is taken.
Trajectory integrate_scalar(const Potential& pot, Complex lambda, double x_from,
                            double x_to, Complex y, Complex dy,
                            IntegrateOptions opt = {});
Trajectory integrate_scalar(const Potential& pot, Complex lambda, double x_from,
                            double x_to, const ScalarState& init,
                            IntegrateOptions opt = {});

// State (y1, y2) = (y, y'/p); y1' = p y2, y2' = p y1 - (p'/p) y2, where p is
// the principal square root of q - lambda. Throws BranchCutError if the
// radicand touches the closed negative real axis along the span.
Trajectory integrate_system(const Potential& pot, Complex lambda, double x_from,
                            double x_to, Complex y1, Complex y2,
                            IntegrateOptions opt = {});
Trajectory integrate_system(const Potential& pot, Complex lambda, double x_from,
                            double x_to, const SystemState& init,
                            IntegrateOptions opt = {});

// Two system solutions advanced jointly, sharing every accepted step. The
// shared one-step map keeps det[[u1,v1],[u2,v2]] * p(x) conserved to the
// local truncation error; independently stepped runs lose the determinant to
// cancellation at the rate exp(2*int Re p) * tol on growing spans. Both
// returned trajectories carry identical abscissae.
struct PairTrajectory {
    Trajectory u;
    Trajectory v;
};

PairTrajectory integrate_pair(const Potential& pot, Complex lambda, double x_from,
                              double x_to, const SystemState& u0,
                              const SystemState& v0, IntegrateOptions opt = {});

// Composite Simpson of fn(x, y) along the trajectory, two panels per accepted
// step with interior values from dense output. Signed in the trajectory
// direction.
double trajectory_integral(const Trajectory& tr,
                           const std::function<double(double, const State2&)>& fn);
Complex trajectory_integral_c(const Trajectory& tr,
                              const std::function<Complex(double, const State2&)>& fn);

// (y, y') from a system-variable state: y = y1, y' = p * y2.
std::pair<Complex, Complex> system_to_scalar(const Potential& pot, Complex lambda,
                                             double x, const State2& s);

// Relative drift of det[[u1, v1], [u2, v2]] at the shared endpoint b against
// det(anchor) * p(anchor)/p(b), an exact invariant of the system form. U and
// V must be system trajectories over [anchor, b]; use integrate_pair to keep
// the determinant meaningful on growing spans.
double wronskian_drift(const Trajectory& u, const Trajectory& v, const Potential& pot,
                       Complex lambda, double anchor, double b);

// Convenience form: jointly steps the canonical data U(anchor) = (0,1),
// V(anchor) = (1,0) and reports the drift at b.
double wronskian_drift(const Potential& pot, Complex lambda, double anchor, double b,
                       double tol);

// |Re(y1 conj(y2))|_anchor^b - S| / max(1, |lhs|, |rhs|), where S integrates
// Re p (|y1|^2 + |y2|^2) - Re((p'/p) y2 conj(y1)) along the trajectory. The
// two sides agree exactly for exact solutions of the system form, so the
// residual measures integration plus quadrature error at the trajectory's own
// scale. Y must be a system trajectory over [anchor, b].
double energy_identity_residual(const Trajectory& y, const Potential& pot,
                                Complex lambda, double anchor, double b);

}  // namespace halfline
