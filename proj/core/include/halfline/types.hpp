#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace halfline {

using Complex = std::complex<double>;

// Base class for every failure this library raises on purpose.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// q(x) - lambda landed on the closed negative real axis, where the principal
// square root has Re p = 0 and the decay weight is undefined.
class BranchCutError : public Error {
  public:
    using Error::Error;
};

// Adaptive step size collapsed below the floor (1e-13 of the span).
class StiffnessError : public Error {
  public:
    using Error::Error;
};

// A state magnitude crossed the overflow cap during integration.
class BlowupError : public Error {
  public:
    using Error::Error;
};

// An iteration missed its target: disk radius, contour refinement, Newton
// polish, or the subdivision budget.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

// A caller-side contract was violated (invalid anchor, span, or parameters).
class PreconditionError : public Error {
  public:
    using Error::Error;
};

}  // namespace halfline
