#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "icl/numerics/chebyshev.hpp"
#include "icl/numerics/fd.hpp"
#include "icl/numerics/quadrature.hpp"
#include "icl/numerics/roots.hpp"
#include "icl/numerics/spline.hpp"

namespace {

using icl::ChebyshevSeries;
using icl::CubicSpline;

constexpr double pi = std::numbers::pi;

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

}  // namespace

TEST_CASE("simpson integrates low-degree polynomials exactly") {
    // 4th-order rule: exact through cubics on any panel layout
    auto cubic = [](double t) { return 1.0 + t - 2.0 * t * t + 3.0 * t * t * t; };
    const double exact = 2.0 + 2.0 - 16.0 / 3.0 + 12.0;  // integral on [0, 2]
    CHECK(icl::simpson(cubic, 0.0, 2.0, 9) == doctest::Approx(exact).epsilon(1e-14));
    // odd interval count exercises the 3/8 closeout
    CHECK(icl::simpson(cubic, 0.0, 2.0, 8) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("simpson converges at 4th order on smooth integrands") {
    auto f = [](double t) { return std::exp(std::sin(t)); };
    double ref = icl::simpson(f, 0.0, 3.0, 1 << 14);
    const double e1 = std::abs(icl::simpson(f, 0.0, 3.0, 65) - ref);
    const double e2 = std::abs(icl::simpson(f, 0.0, 3.0, 129) - ref);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.7);
}

TEST_CASE("simpson rejects degenerate sample counts") {
    CHECK_THROWS_AS(icl::simpson([](double) { return 1.0; }, 0.0, 1.0, 1),
                    icl::TooFewSamples);
}

TEST_CASE("gauss rule integrates degree-9 polynomials exactly") {
    double acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        const double t = icl::GaussRule5::nodes[k];
        acc += icl::GaussRule5::weights[k] * (std::pow(t, 9) + std::pow(t, 8) + 1.0);
    }
    CHECK(acc == doctest::Approx(2.0 / 9.0 + 2.0).epsilon(1e-14));
}

TEST_CASE("fd weights reproduce derivatives of smooth samples") {
    const auto x = linspace(0.0, pi, 41);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::sin(x[i]);

    // interior, both ends, both derivative orders
    CHECK(icl::sample_deriv1(x, y, 20) == doctest::Approx(std::cos(x[20])).epsilon(1e-3));
    CHECK(icl::sample_deriv1(x, y, 0) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(icl::sample_deriv2(x, y, 20) == doctest::Approx(-std::sin(x[20])).epsilon(1e-2));
    CHECK(icl::sample_deriv2(x, y, 0) == doctest::Approx(0.0).epsilon(1e-2));
    CHECK(icl::endpoint_deriv1_4pt(x, y, false) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(icl::endpoint_deriv1_4pt(x, y, true) == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("richardson differences beat plain centered stencils") {
    auto f = [](double t) { return std::exp(t); };
    const double d1 = icl::richardson_diff1(f, 0.3, 1e-2);
    const double d2 = icl::richardson_diff2(f, 0.3, 1e-2);
    CHECK(std::abs(d1 - std::exp(0.3)) < 1e-10);
    CHECK(std::abs(d2 - std::exp(0.3)) < 1e-7);
}

TEST_CASE("bisect finds a transcendental root") {
    const double r = icl::bisect([](double t) { return std::cos(t) - t; }, 0.0, 1.0, 1e-14);
    CHECK(std::abs(std::cos(r) - r) < 1e-13);
    CHECK_THROWS_AS(icl::bisect([](double t) { return t * t + 1.0; }, -1.0, 1.0, 1e-12),
                    icl::NoBracket);
}

TEST_CASE("safeguarded newton converges and keeps its bracket") {
    const double r = icl::newton_safeguarded([](double t) { return t * t * t - 2.0; }, 0.0, 2.0,
                                             1e-14, 100, "cube root");
    CHECK(r == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(icl::newton_safeguarded([](double t) { return t * t + 1.0; }, -1.0, 1.0,
                                            1e-12, 50, "no root"),
                    icl::NoBracket);
}

TEST_CASE("chebyshev fit differentiates smooth data spectrally") {
    const auto xi = linspace(-1.0, 1.0, 400);
    std::vector<double> v(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) v[i] = std::exp(xi[i]);
    const auto fit = ChebyshevSeries::fit(xi, v, 24);
    const auto d1 = fit.derivative();
    const auto d2 = d1.derivative();
    double err = 0.0;
    for (double t = -0.95; t <= 0.95; t += 0.05) {
        err = std::max(err, std::abs(fit(t) - std::exp(t)));
        err = std::max(err, std::abs(d1(t) - std::exp(t)));
        err = std::max(err, std::abs(d2(t) - std::exp(t)));
    }
    CHECK(err < 1e-11);
}

TEST_CASE("chebyshev truncation drops a noise tail") {
    std::vector<double> coeffs = {1.0, 0.5, 0.25, 1e-14, -2e-14};
    const auto series = ChebyshevSeries(coeffs).truncated(1e-10);
    CHECK(series.size() == 3);
    CHECK(series(0.3) == doctest::Approx(1.0 + 0.5 * 0.3 + 0.25 * (2 * 0.3 * 0.3 - 1)));
}

TEST_CASE("cubic spline reproduces cubics on a uniform grid") {
    // uniform spacing makes the naive not-a-knot elimination singular; this
    // guards the reformulated end handling
    const auto x = linspace(0.0, 3.0, 16);
    std::vector<double> y(x.size());
    auto cubic = [](double t) { return 2.0 - t + 0.5 * t * t - 0.125 * t * t * t; };
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = cubic(x[i]);
    const CubicSpline s(x, y);
    for (double t = 0.0; t <= 3.0; t += 0.07) {
        CHECK(s(t) == doctest::Approx(cubic(t)).epsilon(1e-13));
        CHECK(s.deriv(t) ==
              doctest::Approx(-1.0 + t - 0.375 * t * t).epsilon(1e-12));
        CHECK(s.deriv2(t) == doctest::Approx(1.0 - 0.75 * t).epsilon(1e-11));
    }
    CHECK(s.integral() == doctest::Approx(6.0 - 4.5 + 4.5 - 0.125 * 81.0 / 4.0).epsilon(1e-13));
}

TEST_CASE("cubic spline handles the minimal and near-minimal sizes") {
    for (std::size_t n : {4u, 5u}) {
        const auto x = linspace(0.0, 1.0, n);
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * x[i] * x[i];
        const CubicSpline s(x, y);
        CHECK(s(0.5) == doctest::Approx(0.125).epsilon(1e-12));
    }
}

TEST_CASE("cubic spline interpolates sin on clustered grids") {
    std::vector<double> x(200);
    for (std::size_t j = 0; j < x.size(); ++j)
        x[j] = 0.5 * pi * (1.0 - std::cos(pi * (static_cast<double>(j) + 0.5) / 200.0));
    std::vector<double> y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = std::sin(x[j]);
    const CubicSpline s(x, y);
    double err = 0.0;
    for (double t = x.front(); t < x.back(); t += 0.01)
        err = std::max(err, std::abs(s(t) - std::sin(t)));
    CHECK(err < 1e-8);
    CHECK(s.integral() ==
          doctest::Approx(std::cos(x.front()) - std::cos(x.back())).epsilon(1e-8));
}

TEST_CASE("integrate_samples matches the analytic integral") {
    const auto x = linspace(0.0, 2.0, 400);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(-x[i]);
    CHECK(icl::integrate_samples(x, y) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("cubic spline rejects bad grids") {
    std::vector<double> x = {0.0, 1.0, 1.0, 2.0};
    std::vector<double> y = {0.0, 1.0, 2.0, 3.0};
    CHECK_THROWS(CubicSpline(x, y));
    std::vector<double> x2 = {0.0, 1.0, 2.0};
    std::vector<double> y2 = {0.0, 1.0, 2.0};
    CHECK_THROWS(CubicSpline(x2, y2));
}
