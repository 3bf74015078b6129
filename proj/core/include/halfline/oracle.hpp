#pragma once

#include <vector>

#include "halfline/potential.hpp"
#include "halfline/spectrum.hpp"
#include "halfline/types.hpp"

namespace halfline {

// Truncated-domain discretization: the boundary form at 0, an artificial
// Dirichlet wall at x = length. Deliberately shares no machinery with the
// adaptive integrators it validates.
struct FDProblem {
    double length = 12.0;
    int n = 2400;  // intervals; unknowns sit at j*h, j = 1..n-1
    BoundaryForm bc;
};

struct FDEigen {
    Complex lambda;        // Richardson-extrapolated between the n and 2n grids
    double err_est = 0.0;  // |lambda_n - lambda_2n| / 3
};

// `count` smallest-|lambda| eigenvalues of the second-order central-difference
// discretization of -y'' + q y. The boundary form enters through a one-sided
// second-order stencil for y'(0), eliminated into the first row, so the
// matrix stays tridiagonal. Requested eigenfunctions must have decayed by
// e^{-10} before the wall (checked on the discrete eigenvectors), else
// PreconditionError.
std::vector<FDEigen> fd_eigenvalues(const Potential& pot, const FDProblem& problem,
                                    int count);

// Ai(t): Taylor series for |t| <= 6 accumulated in long double, asymptotic
// expansions at optimal truncation beyond.
double airy_ai(double t);

// Second derivative from the twice-differentiated Taylor series; defined for
// |t| <= 6 only (PreconditionError beyond), which covers the residual window.
double airy_ai_second(double t);

// n-th negative zero of Ai, n in [1, 20], by bisection to 1e-9.
double airy_zero(int n);

}  // namespace halfline
