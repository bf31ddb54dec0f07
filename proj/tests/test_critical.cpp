#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "icl/critical.hpp"

namespace {

using namespace icl;

constexpr double pi = std::numbers::pi;

// Reference values computed independently at 50-digit precision.
constexpr double kSigma14 = 1.4049629462081453;
constexpr double kKappa14 = 4.0556387889656918;
constexpr double kArea14 = 7.5819506301938047;
constexpr double kEnergy14 = 11.532318211681279;
constexpr double kRatio14 = 0.65745242986045249;
constexpr double kCurvMid14 = 0.55134791184647224;   // curvature at s = L
constexpr double kCurvEnd14 = 3.3399977609653305;    // curvature at s = 0
constexpr double kSigma210 = 1.2825498301618641;
constexpr double kKappa210 = 10.430314948315892;
constexpr double kArea210 = 44.345821825503108;
constexpr double kEnergy210 = 69.067810872134329;
constexpr double kRatio210 = 0.64206207299085830;
constexpr double kArea310 = 50.385936575488410;
constexpr double kEnergy310 = 75.738380059577357;
constexpr double kRatioFlat = 0.50009998854849495;   // x0 = 1, L = 10^4

}  // namespace

TEST_CASE("parameter derivation matches the reference values") {
    const CriticalParams p = make_params(1.0, 4.0);
    CHECK(p.sigma == doctest::Approx(kSigma14).epsilon(1e-15));
    CHECK(p.kappa == doctest::Approx(kKappa14).epsilon(1e-15));
    CHECK(p.lambda == doctest::Approx(1.6).epsilon(1e-15));

    const CriticalParams q = make_params(2.0, 10.0);
    CHECK(q.sigma == doctest::Approx(kSigma210).epsilon(1e-15));
    CHECK(q.kappa == doctest::Approx(kKappa210).epsilon(1e-15));
    CHECK(q.lambda == doctest::Approx(5.0 / 3.0).epsilon(1e-15));

    // scale invariance: doubling (x0, L) doubles kappa and preserves sigma
    const CriticalParams r = make_params(2.0, 8.0);
    CHECK(r.sigma == doctest::Approx(p.sigma).epsilon(1e-15));
    CHECK(r.kappa == doctest::Approx(2.0 * p.kappa).epsilon(1e-15));
}

TEST_CASE("existence threshold L > 3*x0 is enforced") {
    CHECK_THROWS_AS(make_params(1.0, 3.0), ThresholdViolation);
    CHECK_THROWS_AS(make_params(1.0, 2.0), ThresholdViolation);
    CHECK_THROWS_AS(make_params(-1.0, 4.0), std::invalid_argument);
    CHECK_NOTHROW(make_params(1.0, 3.0 + 1e-9));
}

TEST_CASE("curve hits its boundary data") {
    const CriticalCurve c = build_critical_curve(make_params(1.0, 4.0), 1024);
    const Vec2 a = c.point(0.0), b = c.point(8.0);
    CHECK(a.x == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(a.y) < 1e-13);
    CHECK(b.x == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(std::abs(b.y) < 1e-13);
    // the tangent is horizontal at both ends and the total turning is 2*pi
    CHECK(std::abs(c.dpoint(0.0).y) < 1e-13);
    CHECK(std::abs(c.dpoint(8.0).y) < 1e-13);
    CHECK(std::abs(c.turning_angle(0.0)) < 1e-13);
    CHECK(c.turning_angle(8.0) == doctest::Approx(2.0 * pi).epsilon(1e-13));
}

TEST_CASE("curvature profile matches the reference values") {
    const CriticalCurve c = build_critical_curve(make_params(1.0, 4.0), 256);
    CHECK(c.curvature(4.0) == doctest::Approx(kCurvMid14).epsilon(1e-15));
    CHECK(c.curvature(0.0) == doctest::Approx(kCurvEnd14).epsilon(1e-15));
    // symmetric about s = L
    CHECK(c.curvature(1.5) == doctest::Approx(c.curvature(6.5)).epsilon(1e-15));
    CHECK(c.dcurvature(4.0) == doctest::Approx(0.0));
    // derivative identities, cross-checked by finite differences
    const double h = 1e-5;
    for (double s : {1.0, 3.0, 5.5}) {
        const double fd1 = (c.curvature(s + h) - c.curvature(s - h)) / (2.0 * h);
        const double fd2 =
            (c.curvature(s + h) - 2.0 * c.curvature(s) + c.curvature(s - h)) / (h * h);
        const double fd3 = (c.dcurvature(s + h) - 2.0 * c.dcurvature(s) + c.dcurvature(s - h)) /
                           (h * h);
        CHECK(c.dcurvature(s) == doctest::Approx(fd1).epsilon(1e-8));
        CHECK(c.ddcurvature(s) == doctest::Approx(fd2).epsilon(1e-5));
        CHECK(c.dddcurvature(s) == doctest::Approx(fd3).epsilon(1e-4));
    }
}

TEST_CASE("analytic evaluators are mutually consistent") {
    const CriticalCurve c = build_critical_curve(make_params(2.0, 10.0), 256);
    const double h = 1e-6;
    for (double s : {2.0, 9.0, 15.5}) {
        const Vec2 fd = (c.point(s + h) - c.point(s - h)) * (1.0 / (2.0 * h));
        CHECK(c.dpoint(s).x == doctest::Approx(fd.x).epsilon(1e-7));
        CHECK(c.dpoint(s).y == doctest::Approx(fd.y).epsilon(1e-7));
        const Vec2 fdd = (c.dpoint(s + h) - c.dpoint(s - h)) * (1.0 / (2.0 * h));
        CHECK(c.ddpoint(s).x == doctest::Approx(fdd.x).epsilon(1e-7));
        CHECK(c.ddpoint(s).y == doctest::Approx(fdd.y).epsilon(1e-7));
        // unit speed
        CHECK(c.dpoint(s).norm() == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("equilibrium equation residual vanishes") {
    for (const auto& [x0, L] : {std::pair{1.0, 4.0}, {2.0, 10.0}, {1.0, 1000.0}}) {
        const CriticalCurve c = build_critical_curve(make_params(x0, L), 2048);
        CHECK(el_residual(c) < 1e-10);
    }
}

TEST_CASE("discrete residual separates equilibria from non-equilibria") {
    const CriticalParams p = make_params(1.0, 4.0);
    const CriticalCurve c = build_critical_curve(p, 4096);
    CHECK(el_residual_discrete(c.view, p.lambda) < 1e-4);

    // a semicircle satisfies 2 + 0 = lambda only for lambda = 2
    DiscreteCurve arc = c.view;
    const double r = 1.0;
    for (std::size_t i = 0; i < arc.s.size(); ++i) {
        const double t = pi * static_cast<double>(i) / static_cast<double>(arc.s.size() - 1);
        arc.s[i] = r * t;
        arc.pts[i] = {r * std::cos(t), r * std::sin(t)};
    }
    arc.analytic = nullptr;
    arc.L_half = pi * r / 2.0;
    arc.x0 = r;
    CHECK(el_residual_discrete(arc, p.lambda) > 0.3);
}

TEST_CASE("closed-form area and energy match the reference values") {
    CHECK(area_closed_form(make_params(1.0, 4.0)) == doctest::Approx(kArea14).epsilon(1e-14));
    CHECK(area_closed_form(make_params(2.0, 10.0)) == doctest::Approx(kArea210).epsilon(1e-14));
    CHECK(area_closed_form(make_params(3.0, 10.0)) == doctest::Approx(kArea310).epsilon(1e-14));
    CHECK(f_closed_form(make_params(1.0, 4.0)) == doctest::Approx(kEnergy14).epsilon(1e-14));
    CHECK(f_closed_form(make_params(2.0, 10.0)) == doctest::Approx(kEnergy210).epsilon(1e-14));
    CHECK(f_closed_form(make_params(3.0, 10.0)) == doctest::Approx(kEnergy310).epsilon(1e-14));
    // scaling: areas and energies scale by 4 when lengths double
    CHECK(area_closed_form(make_params(2.0, 8.0)) ==
          doctest::Approx(4.0 * kArea14).epsilon(1e-14));
    CHECK(f_closed_form(make_params(2.0, 8.0)) ==
          doctest::Approx(4.0 * kEnergy14).epsilon(1e-14));
}

TEST_CASE("area audit certifies the corrected restatement") {
    const AreaFormAudit audit = audit_area_forms(make_params(1.0, 4.0));
    CHECK(audit.adopted_ok);
    CHECK(audit.fixed_ok);
    CHECK_FALSE(audit.printed_ok);  // the (2L + x0) variant misses by ~7%
    CHECK(audit.adopted == doctest::Approx(audit.quadrature).epsilon(1e-7));
    CHECK(std::abs(audit.restated_printed - audit.quadrature) > 0.1);
}

TEST_CASE("quadrature area converges to the closed form at high order") {
    const CriticalParams p = make_params(1.0, 4.0);
    const double exact = area_closed_form(p);
    const double e1 = std::abs(enclosed_area(build_critical_curve(p, 1 << 8).view) - exact);
    const double e2 = std::abs(enclosed_area(build_critical_curve(p, 1 << 9).view) - exact);
    CHECK(std::abs(enclosed_area(build_critical_curve(p, 1 << 14).view) - exact) < 1e-6);
    CHECK(std::log2(e1 / e2) > 3.7);
}

TEST_CASE("length solves back from the prescribed area") {
    for (const auto& [x0, L] : {std::pair{1.0, 4.0}, {2.0, 10.0}, {1.0, 250.0}}) {
        const double area = area_closed_form(make_params(x0, L));
        CHECK(solve_length(x0, area) == doctest::Approx(L).epsilon(1e-9));
    }
    // the enclosed area can never reach the degenerate floor (3/2) pi x0^2
    CHECK_THROWS_AS(solve_length(1.0, 1.5 * pi), ThresholdViolation);
    CHECK_THROWS_AS(solve_length(1.0, 0.1), ThresholdViolation);
    // barely above the floor is solvable
    CHECK_NOTHROW(solve_length(1.0, 1.5 * pi + 1e-3));
}

TEST_CASE("area-to-energy ratio defeats the half-plane bound yet tends to it") {
    CHECK(hk_counterexample_ratio(make_params(1.0, 4.0)) ==
          doctest::Approx(kRatio14).epsilon(1e-14));
    CHECK(hk_counterexample_ratio(make_params(2.0, 10.0)) ==
          doctest::Approx(kRatio210).epsilon(1e-14));
    CHECK(hk_counterexample_ratio(make_params(1.0, 1e4)) ==
          doctest::Approx(kRatioFlat).epsilon(1e-12));
    double prev = 2.0;
    for (double L = 10.0; L <= 1e6; L *= 10.0) {
        const double ratio = hk_counterexample_ratio(make_params(1.0, L));
        CHECK(ratio > 0.5);
        CHECK(ratio < prev);
        prev = ratio;
    }
}
