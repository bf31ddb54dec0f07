#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "icl/critical.hpp"
#include "icl/variations.hpp"

namespace {

using namespace icl;

constexpr double pi = std::numbers::pi;

// Twice-clamped polynomial profile on [0, 2L]: s^2 (2L - s)^2, rescaled.
// Vanishes with its first derivative at both ends; exact derivatives.
Profile poly_clamped(double L, double amp) {
    const double len = 2.0 * L;
    const double norm = amp / std::pow(L, 4);  // peak value amp at s = L
    Profile p;
    p.f = [len, norm](double s) { return norm * s * s * (len - s) * (len - s); };
    p.df = [len, norm](double s) {
        return norm * 2.0 * s * (len - s) * (len - 2.0 * s);
    };
    p.ddf = [len, norm](double s) {
        return norm * 2.0 * (len * len - 6.0 * len * s + 6.0 * s * s);
    };
    return p;
}

}  // namespace

TEST_CASE("profiles: algebra, bump support, clamped endpoints") {
    const double L = 4.0;
    const Profile b = bump_profile(L);
    CHECK(b(0.1) == 0.0);
    CHECK(b(2.0 * L - 0.1) == 0.0);
    CHECK(b(L) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(b.d(L) == doctest::Approx(0.0));

    const Profile q = poly_clamped(L, 1.0);
    const Profile sum = profile_sum(2.0, b, -0.5, q);
    CHECK(sum(L) == doctest::Approx(2.0 * b(L) - 0.5).epsilon(1e-14));
    CHECK(sum.d(3.0) == doctest::Approx(2.0 * b.d(3.0) - 0.5 * q.d(3.0)).epsilon(1e-13));
    const Profile sc = scaled_profile(3.0, q);
    CHECK(sc.dd(1.0) == doctest::Approx(3.0 * q.dd(1.0)).epsilon(1e-14));

    std::mt19937_64 rng(123);
    for (int k = 0; k < 5; ++k) {
        const Profile r = random_clamped_profile(rng, L, 1e-2);
        CHECK(std::abs(r(0.0)) < 1e-15);
        CHECK(std::abs(r(2.0 * L)) < 1e-15);
        CHECK(std::abs(r.d(0.0)) < 1e-15);
        CHECK(std::abs(r.d(2.0 * L)) < 1e-15);
        double sup = 0.0;
        for (double s = 0.0; s <= 2.0 * L; s += 0.01)
            sup = std::max({sup, std::abs(r(s)), std::abs(r.d(s)), std::abs(r.dd(s))});
        CHECK(sup == doctest::Approx(1e-2).epsilon(1e-2));
    }

    // mean-zero variant integrates to zero
    const Profile mz = random_clamped_profile(rng, L, 1e-2, 12, true);
    const double mean = simpson([&mz](double s) { return mz(s); }, 0.0, 2.0 * L, 4097);
    CHECK(std::abs(mean) < 1e-12);
}

TEST_CASE("profile_from_samples reproduces a smooth profile") {
    const double L = 4.0;
    std::vector<double> s(801), v(801);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = 2.0 * L * static_cast<double>(i) / 800.0;
        v[i] = std::sin(pi * s[i] / (2.0 * L));
    }
    const Profile p = profile_from_samples(s, v);
    CHECK(p(3.1) == doctest::Approx(std::sin(pi * 3.1 / 8.0)).epsilon(1e-9));
    CHECK(p.d(3.1) == doctest::Approx(pi / 8.0 * std::cos(pi * 3.1 / 8.0)).epsilon(1e-6));
}

TEST_CASE("first variation of the energy vanishes only at the equilibrium") {
    const CriticalParams params = make_params(1.0, 4.0);
    const CriticalCurve curve = build_critical_curve(params, 4096);
    std::mt19937_64 rng(7);

    for (int k = 0; k < 8; ++k) {
        const Profile phi = random_clamped_profile(rng, params.L, 1e-2);
        const VariationField field = normal_field(phi);
        // at the equilibrium dF = lambda * dA for every admissible field
        const double dF = first_variation_F(curve, field);
        const double dA = simpson([&phi](double s) { return phi(s); }, 0.0, 8.0, 8193);
        CHECK(std::abs(dF - params.lambda * dA) < 1e-10);

        const VariationCheckReport rep =
            check_first_variation(curve.view, field, dF, 1e-3);
        CHECK(rep.abs_err < 1e-8);
    }
}

TEST_CASE("first variation formula holds on a non-equilibrium curve") {
    // upper semicircle: H = 1, (H^-2)'' = 0, so dF = 2 \int phi
    auto ev = std::make_shared<CurveEvaluators>();
    ev->s_end = pi;
    ev->gamma = [](double s) { return Vec2{std::cos(s), std::sin(s)}; };
    ev->dgamma = [](double s) { return Vec2{-std::sin(s), std::cos(s)}; };
    ev->ddgamma = [](double s) { return Vec2{-std::cos(s), -std::sin(s)}; };
    ev->dddgamma = [](double s) { return Vec2{std::sin(s), -std::cos(s)}; };
    const DiscreteCurve arc = sample_analytic(ev, 4097, pi / 2.0, 1.0);

    const Profile phi = poly_clamped(pi / 2.0, 1e-2);
    const double dF = first_variation_F(arc, normal_field(phi));
    const double expected =
        2.0 * simpson([&phi](double s) { return phi(s); }, 0.0, pi, 8193);
    CHECK(dF == doctest::Approx(expected).epsilon(1e-6));

    const VariationCheckReport rep = check_first_variation(arc, normal_field(phi), dF, 1e-3);
    CHECK(rep.rel_err < 1e-8);
}

TEST_CASE("second variations match their finite-difference oracles") {
    const CriticalParams params = make_params(1.0, 4.0);
    const CriticalCurve curve = build_critical_curve(params, 4096);
    std::mt19937_64 rng(99);

    for (int k = 0; k < 6; ++k) {
        VariationField field;
        field.phi = random_clamped_profile(rng, params.L, 1e-2);
        field.phi_tau = random_clamped_profile(rng, params.L, 1e-2);
        field.psi = random_clamped_profile(rng, params.L, 1e-2);

        const double d2F = second_variation_F(params, field);
        const auto repF = check_second_variation(
            [&](double t) { return energy_along(curve.view, field, t); }, d2F, 1e-3);
        CHECK(repF.rel_err < 1e-3);

        const double d2A = second_variation_area(curve.view, field);
        const auto repA = check_second_variation(
            [&](double t) { return area_along(curve.view, field, t); }, d2A, 1e-3);
        CHECK(repA.rel_err < 1e-3);

        // consistency of the constrained form: d2G = d2F - lambda * d2A
        const SecondVariationG d2G = second_variation_G(params, field);
        CHECK(std::abs(d2G.value - (d2F - params.lambda * d2A)) < 1e-8);
    }
}

TEST_CASE("geodesic family: energy and area respond quadratically") {
    const CriticalParams params = make_params(1.0, 4.0);
    const CriticalCurve curve = build_critical_curve(params, 2048);
    const Profile phi = poly_clamped(params.L, 1e-2);
    const VariationField field = normal_field(phi);

    const double f0 = energy_along(curve.view, field, 0.0);
    CHECK(f0 == doctest::Approx(f_closed_form(params)).epsilon(1e-10));
    const double a0 = area_along(curve.view, field, 0.0);
    CHECK(a0 == doctest::Approx(area_closed_form(params)).epsilon(1e-10));

    const DiscreteCurve moved = geodesic_normal_variation(curve.view, phi, 1.0);
    const CurveFrame fr = frame_and_curvature(moved);
    CHECK(check_admissible(moved, fr).is_admissible);
    CHECK(total_inverse_curvature(moved, fr) ==
          doctest::Approx(energy_along(curve.view, field, 1.0)).epsilon(1e-8));

    // a profile that does not vanish at the ends is rejected
    Profile bad;
    bad.f = [](double) { return 1.0; };
    CHECK_THROWS_AS(geodesic_normal_variation(curve.view, bad, 1.0), std::invalid_argument);
}

TEST_CASE("area-preserving correction pins the area exactly") {
    const CriticalParams params = make_params(1.0, 4.0);
    const CriticalCurve curve = build_critical_curve(params, 4096);
    std::mt19937_64 rng(2024);
    const Profile phi = random_clamped_profile(rng, params.L, 1e-2, 12, true);

    const AreaPreservingFamily fam =
        make_area_preserving(curve.view, phi, {0.25, 0.5, 1.0});
    const double a_ref = enclosed_area(curve.view);
    for (std::size_t i = 0; i < fam.t.size(); ++i) {
        CHECK(std::abs(fam.A_values[i] - a_ref) < 1e-10);
        // the correction amplitude is second order in t
        CHECK(std::abs(fam.g[i]) < 10.0 * fam.t[i] * fam.t[i] * 1e-2);
    }
    // the constrained energy strictly increases away from the equilibrium
    const double f0 = total_inverse_curvature(curve.view, frame_and_curvature(curve.view));
    for (double fv : fam.F_values) CHECK(fv > f0);

    // a profile with nonzero mean cannot be corrected this way
    const Profile biased = bump_profile(params.L, 1e-2);
    CHECK_THROWS_AS(make_area_preserving(curve.view, biased, {1.0}), std::invalid_argument);
}
