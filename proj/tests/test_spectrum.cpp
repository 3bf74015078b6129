#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "halfline/potential.hpp"
#include "halfline/spectrum.hpp"

using namespace halfline;

namespace {

const Potential kOne = Potential::constant(Complex(1.0, 0.0));
const Potential kHarmonic = Potential::monomial(2.0, 0.0);
const Complex kZero(0.0, 0.0);

Complex exp_decay(double x) { return Complex(std::exp(-x), 0.0); }

}  // namespace

TEST_CASE("characteristic function of the constant potential") {
    // eta(0) = mu(0) = -1 and eta'(0) = 1 with the anchor-0 normalization.
    const Complex wd = char_function(kOne, BoundaryForm::dirichlet(), kZero, 0.0);
    CHECK(std::abs(wd - Complex(-1.0, 0.0)) <= 1e-8);
    const Complex wn = char_function(kOne, BoundaryForm::neumann(), kZero, 0.0);
    CHECK(std::abs(wn - Complex(1.0, 0.0)) <= 1e-8);

    const CharValue cv = char_function_with_scale(kOne, BoundaryForm::dirichlet(), kZero, 0.0);
    CHECK(cv.scale == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(cv.w - wd) <= 1e-10);
}

TEST_CASE("winding numbers count enclosed eigenvalues") {
    // No Dirichlet spectrum for q = 1 near the real interval (0, 1).
    CHECK(winding_number(kOne, BoundaryForm::dirichlet(),
                         Contour::circle(Complex(0.5, 0.0), 0.25), 0.0, 1e-10) == 0);

    // q = x^2 on the half line: Dirichlet spectrum 3, 7, 11, ...
    CHECK(winding_number(kHarmonic, BoundaryForm::dirichlet(),
                         Contour::circle(Complex(3.0, 0.0), 0.5), 3.0, 1e-10) == 1);
    const ComplexRect two{2.0, 8.0, -0.5, 0.5};
    CHECK(winding_number(kHarmonic, BoundaryForm::dirichlet(),
                         Contour::rectangle(two), choose_region_anchor(kHarmonic, two),
                         1e-10) == 2);

    // Neumann spectrum 1, 5, 9, ...
    CHECK(winding_number(kHarmonic, BoundaryForm::neumann(),
                         Contour::circle(Complex(1.0, 0.0), 0.4), 3.0, 1e-10) == 1);
}

TEST_CASE("contours passing through a zero are rejected") {
    CHECK_THROWS_AS(winding_number(kHarmonic, BoundaryForm::dirichlet(),
                                   Contour::circle(Complex(3.0, 0.0), 1e-9), 3.0, 1e-10),
                    NearZeroOnContour);
}

TEST_CASE("harmonic half-line spectra for both classical boundary conditions") {
    const ComplexRect region{0.0, 12.0, -1.0, 1.0};

    const auto dir = find_eigenvalues(kHarmonic, BoundaryForm::dirichlet(), region, 1e-9);
    REQUIRE(dir.size() == 3);
    const double dwant[] = {3.0, 7.0, 11.0};
    for (std::size_t i = 0; i < dir.size(); ++i) {
        CHECK(std::abs(dir[i].lambda - Complex(dwant[i], 0.0)) <= 1e-6);
        CHECK(dir[i].multiplicity == 1);
        CHECK(dir[i].refined);
        CHECK(dir[i].residual <= 1e-6);
        CHECK(dir[i].enclosure_radius <= 1e-4);
    }

    const auto neu = find_eigenvalues(kHarmonic, BoundaryForm::neumann(), region, 1e-9);
    REQUIRE(neu.size() == 3);
    const double nwant[] = {1.0, 5.0, 9.0};
    for (std::size_t i = 0; i < neu.size(); ++i) {
        CHECK(std::abs(neu[i].lambda - Complex(nwant[i], 0.0)) <= 1e-6);
    }
}

TEST_CASE("rotated linear potential: non-real spectrum on the 60 degree ray") {
    const auto got = find_eigenvalues(Potential::airy(), BoundaryForm::dirichlet(),
                                      ComplexRect{0.0, 6.0, 0.0, 6.0}, 1e-9);
    REQUIRE(got.size() == 4);
    const Complex want[] = {
        {1.1690537052298835, 2.0248604142348080},
        {2.0439747220654853, 3.5402680680038953},
        {2.7602799140477755, 4.7809450542426008},
        {3.3933540450358795, 5.8774616140715115},
    };
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i].lambda - want[i]) <= 1e-6);
        CHECK(got[i].multiplicity == 1);
        CHECK(got[i].refined);
    }
}

TEST_CASE("mixed boundary form: count agrees with the region winding") {
    const BoundaryForm robin{Complex(1.0, 0.0), Complex(1.0, 0.0)};
    const ComplexRect region{0.0, 12.0, -1.0, 1.0};
    const auto got = find_eigenvalues(kHarmonic, robin, region, 1e-9);
    REQUIRE(!got.empty());
    int total = 0;
    for (const auto& ev : got) {
        CHECK(ev.refined);
        CHECK(ev.residual <= 1e-6);
        CHECK(std::abs(ev.lambda.imag()) <= 1e-6);  // real operator, real spectrum here
        total += ev.multiplicity;
    }
    CHECK(total == winding_number(kHarmonic, robin, Contour::rectangle(region),
                                  choose_region_anchor(kHarmonic, region), 1e-9));
}

TEST_CASE("a spectrum-free region yields no candidates") {
    const auto got = find_eigenvalues(kOne, BoundaryForm::dirichlet(),
                                      ComplexRect{0.2, 0.8, -0.2, 0.2}, 1e-9);
    CHECK(got.empty());
}

TEST_CASE("resolvent against the constant-potential closed form, Dirichlet") {
    // -y'' + y = e^{-x}, y(0) = 0, decaying: y = (x/2) e^{-x}.
    const ResolventOutput out =
        apply_resolvent(kOne, BoundaryForm::dirichlet(), kZero, exp_decay, 10.5, 0.0, 1e-9);
    REQUIRE(out.x.size() == out.y.size());
    REQUIRE(out.x.size() >= 1024);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        const double xi = out.x[i];
        const Complex want(0.5 * xi * std::exp(-xi), 0.0);
        worst = std::max(worst, std::abs(out.y[i] - want));
    }
    CHECK(worst <= 1e-7);
    CHECK(out.ode_residual <= 1e-6);
    CHECK(out.boundary_residual <= 1e-10);
    CHECK(out.tail_estimate <= 1e-8);
    CHECK(out.norm_y == doctest::Approx(0.25).epsilon(4e-6));
    CHECK(out.norm_f_weighted == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
}

TEST_CASE("resolvent against the constant-potential closed form, Neumann") {
    // -y'' + y = e^{-x}, y'(0) = 0, decaying: y = ((x+1)/2) e^{-x}.
    const ResolventOutput out =
        apply_resolvent(kOne, BoundaryForm::neumann(), kZero, exp_decay, 10.5, 0.0, 1e-9);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        const double xi = out.x[i];
        const Complex want(0.5 * (xi + 1.0) * std::exp(-xi), 0.0);
        worst = std::max(worst, std::abs(out.y[i] - want));
    }
    CHECK(worst <= 1e-7);
    CHECK(std::abs(out.y.front() - Complex(0.5, 0.0)) <= 1e-8);
    CHECK(std::abs(out.dy.front()) <= 1e-8);
    CHECK(out.boundary_residual <= 1e-10);
}

TEST_CASE("resolvent refuses spectral parameters at an eigenvalue") {
    CHECK_THROWS_AS(apply_resolvent(kHarmonic, BoundaryForm::dirichlet(),
                                    Complex(3.0 + 1e-12, 0.0), exp_decay, 8.0, 3.0, 1e-9),
                    PreconditionError);
}

TEST_CASE("resolvent refuses forcings whose tail is not resolved by x_max") {
    const auto one = [](double) { return Complex(1.0, 0.0); };
    CHECK_THROWS_AS(
        apply_resolvent(kOne, BoundaryForm::dirichlet(), kZero, one, 10.0, 0.0, 1e-9),
        PreconditionError);
}

TEST_CASE("weighted resolvent bounds for the constant potential") {
    const WeightedBoundReport rep =
        weighted_bound_report(kOne, BoundaryForm::dirichlet(), exp_decay, 10.5, 1e-9);
    CHECK(rep.holds);
    CHECK(rep.c == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.norm_y == doctest::Approx(0.25).epsilon(4e-6));
    CHECK(rep.norm_f_weighted == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
    // c ||y|| = 0.25 vs ||f|| = 0.7071: slack 0.3536, and the split norms match.
    CHECK(rep.slack_y == doctest::Approx(0.25 / std::sqrt(0.5)).epsilon(1e-4));
    CHECK(rep.slack_pair <= 1.01);
    CHECK(rep.slack_y1_rho <= 1.01);
    CHECK(rep.slack_y2_rho <= 1.01);
}

TEST_CASE("weighted bounds require the decay condition from the origin") {
    // q = x^2 at lambda = 0 has a branch point at x = 0: no admissible weight.
    CHECK_THROWS_AS(
        weighted_bound_report(kHarmonic, BoundaryForm::dirichlet(), exp_decay, 8.0, 1e-9),
        const Error&);
}
