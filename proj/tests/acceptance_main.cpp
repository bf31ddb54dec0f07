// Acceptance gate: eight property-based criteria, one pass/fail line each.
// Exits nonzero if any criterion fails. Tolerances are pinned here on
// purpose; loosening them is a contract change, not a tuning knob.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "icl/critical.hpp"
#include "icl/stability.hpp"
#include "icl/steiner.hpp"
#include "icl/variations.hpp"

namespace {

using namespace icl;

// ten parameter pairs with L/x0 spanning (3, 1e4]
const std::vector<std::pair<double, double>> kPairs = {
    {1.0, 3.2},  {1.0, 4.0},  {1.0, 5.0},   {1.0, 8.0},    {1.0, 10.0},
    {0.5, 10.0}, {0.2, 10.0}, {0.1, 12.0},  {0.01, 25.0},  {0.001, 10.0}};

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// 1. Equilibrium equation and boundary conditions, closed-form path.
Outcome criterion_equilibrium() {
    Outcome out;
    for (const auto& [x0, L] : kPairs) {
        const CriticalCurve c = build_critical_curve(make_params(x0, L), 2048);
        const double res = el_residual(c);
        out.require(res <= 1e-10, "el residual " + fmt(res) + " at L/x0 = " + fmt(L / x0));
        const Vec2 a = c.point(0.0), b = c.point(2.0 * L);
        const double bc = std::max({std::abs(a.x - x0), std::abs(b.x + x0), std::abs(a.y),
                                    std::abs(b.y), std::abs(c.dpoint(0.0).y),
                                    std::abs(c.dpoint(2.0 * L).y)});
        out.require(bc <= 1e-10, "boundary error " + fmt(bc) + " at L/x0 = " + fmt(L / x0));
    }
    return out;
}

// 2. Closed forms vs quadrature at 2^14 samples, plus convergence order.
Outcome criterion_closed_forms() {
    Outcome out;
    for (const auto& [x0, L] : kPairs) {
        const CriticalParams p = make_params(x0, L);
        const CriticalCurve c = build_critical_curve(p, 1 << 14);
        const CurveFrame fr = frame_and_curvature(c.view);
        const double ea = std::abs(area_closed_form(p) - enclosed_area(c.view));
        const double ef = std::abs(f_closed_form(p) - total_inverse_curvature(c.view, fr));
        out.require(ea <= 1e-6, "area defect " + fmt(ea) + " at L/x0 = " + fmt(L / x0));
        out.require(ef <= 1e-6, "energy defect " + fmt(ef) + " at L/x0 = " + fmt(L / x0));
    }
    const CriticalParams p = make_params(1.0, 4.0);
    const double exact = area_closed_form(p);
    const double e1 = std::abs(enclosed_area(build_critical_curve(p, 1 << 8).view) - exact);
    const double e2 = std::abs(enclosed_area(build_critical_curve(p, 1 << 9).view) - exact);
    const double order = std::log2(e1 / e2);
    out.require(order >= 3.7, "convergence order " + fmt(order));
    return out;
}

// 3. Area-to-length bijection round trip and threshold rejection.
Outcome criterion_bijection() {
    Outcome out;
    for (const auto& [x0, L] : kPairs) {
        const double back = solve_length(x0, area_closed_form(make_params(x0, L)));
        const double rel = std::abs(back - L) / L;
        out.require(rel <= 1e-9, "round trip rel err " + fmt(rel) + " at L/x0 = " + fmt(L / x0));
    }
    for (double x0 : {1.0, 0.3}) {
        bool rejected = false;
        try {
            solve_length(x0, 1.5 * std::numbers::pi * x0 * x0);
        } catch (const ThresholdViolation&) {
            rejected = true;
        }
        out.require(rejected, "threshold area accepted at x0 = " + fmt(x0));
    }
    return out;
}

// 4. Variation formulas against finite differences, 50 random fields.
Outcome criterion_variations() {
    Outcome out;
    const CriticalParams p = make_params(1.0, 4.0);
    const CriticalCurve curve = build_critical_curve(p, 4096);
    std::mt19937_64 rng(314159);

    for (int k = 0; k < 50; ++k) {
        VariationField field;
        field.phi = random_clamped_profile(rng, p.L, 1e-2);
        field.phi_tau = random_clamped_profile(rng, p.L, 1e-2);
        field.psi = random_clamped_profile(rng, p.L, 1e-2);

        // first variation of the constrained functional vanishes
        const double dF = first_variation_F(curve, field);
        const double dA = simpson([&field](double s) { return field.phi(s); }, 0.0, 8.0, 8193);
        out.require(std::abs(dF - p.lambda * dA) <= 1e-8,
                    "first variation " + fmt(std::abs(dF - p.lambda * dA)));

        const double d2F = second_variation_F(p, field);
        const double d2A = second_variation_area(curve.view, field);
        const SecondVariationG d2G = second_variation_G(p, field);

        const auto repF = check_second_variation(
            [&](double t) { return energy_along(curve.view, field, t); }, d2F, 1e-3);
        out.require(repF.rel_err <= 1e-3, "d2F fd rel err " + fmt(repF.rel_err));
        const auto repA = check_second_variation(
            [&](double t) { return area_along(curve.view, field, t); }, d2A, 1e-3);
        out.require(repA.rel_err <= 1e-3, "d2A fd rel err " + fmt(repA.rel_err));
        const auto repG = check_second_variation(
            [&](double t) {
                return energy_along(curve.view, field, t) -
                       p.lambda * area_along(curve.view, field, t);
            },
            d2G.value, 1e-3);
        out.require(repG.rel_err <= 1e-3, "d2G fd rel err " + fmt(repG.rel_err));

        out.require(std::abs(d2F - p.lambda * d2A - d2G.value) <= 1e-8,
                    "d2 identity defect " + fmt(std::abs(d2F - p.lambda * d2A - d2G.value)));
    }
    return out;
}

// 5. Stability: determinant roots, Rayleigh agreement, solution residuals.
Outcome criterion_stability() {
    Outcome out;
    for (int i = 1; i <= 24; ++i) {
        const double ratio = 0.01 * static_cast<double>(i);
        const CriticalParams p = make_params(1.0, (1.0 - ratio) / ratio);
        // find_mu_w1 also certifies no root at or below mu0
        const double root = find_mu_w1(p);
        out.require(root > 1.0, "mu_w1 " + fmt(root) + " at ratio " + fmt(ratio));
        const double rayleigh = rayleigh_min_discrete(p, 2048);
        const double gap = std::abs(rayleigh - root) / root;
        out.require(gap <= 0.01, "rayleigh gap " + fmt(gap) + " at ratio " + fmt(ratio));
    }

    const CriticalParams p = make_params(1.0, 4.0);
    int checked = 0;
    for (double mu : {0.4, 1.7}) {
        const SolutionBasis basis = solution_basis(mu, p);
        for (const OdeProfile& u : basis.u) {
            const double res = ode_residual(u, mu, 0.0, p);
            out.require(res <= 1e-8, "basis residual " + fmt(res) + " at mu = " + fmt(mu));
            ++checked;
        }
    }
    for (const auto& [mu, nu] : {std::pair{2.0, 0.7}, {1.0, 1.3}}) {
        const double res = ode_residual(particular_solution(mu, nu, p), mu, nu, p);
        out.require(res <= 1e-8, "particular residual " + fmt(res) + " at mu = " + fmt(mu));
        ++checked;
    }
    out.require(checked == 10, "expected 10 closed-form solutions");
    return out;
}

// 6. Local minimality under random perturbations with the coercivity bound.
Outcome criterion_minimality() {
    Outcome out;
    const CriticalParams p = make_params(1.0, 4.0);
    const CriticalCurve curve = build_critical_curve(p, 4096);
    const double C = coercivity_constant(p);
    out.require(C > 0.0, "coercivity constant " + fmt(C));

    std::mt19937_64 rng(271828);
    const double len = 2.0 * p.L;

    double g0 = 0.0;
    {
        const VariationField none;
        g0 = energy_along(curve.view, none, 0.0) - p.lambda * area_along(curve.view, none, 0.0);
    }
    for (int k = 0; k < 200; ++k) {
        const Profile phi = random_clamped_profile(rng, p.L, 1e-2);
        const VariationField field = normal_field(phi);
        const double g1 =
            energy_along(curve.view, field, 1.0) - p.lambda * area_along(curve.view, field, 1.0);
        const double delta = g1 - g0;
        out.require(delta > 0.0, "constrained energy fell by " + fmt(-delta));
        const double w22 = simpson(
            [&phi](double s) {
                const double v = phi(s), dv = phi.d(s), ddv = phi.dd(s);
                return v * v + dv * dv + ddv * ddv;
            },
            0.0, len, 2049);
        out.require(delta >= 0.8 * 0.5 * C * w22,
                    "coercivity bound missed: delta " + fmt(delta) + " vs " +
                        fmt(0.5 * C * w22));
    }

    // area-corrected families: the energy itself must increase
    const double f0 = total_inverse_curvature(curve.view, frame_and_curvature(curve.view));
    for (int k = 0; k < 20; ++k) {
        const Profile phi = random_clamped_profile(rng, p.L, 1e-2, 12, true);
        const AreaPreservingFamily fam = make_area_preserving(curve.view, phi, {1.0});
        out.require(fam.F_values.front() > f0,
                    "area-corrected energy fell by " + fmt(f0 - fam.F_values.front()));
    }
    return out;
}

// 7. Symmetrization corpus: area exact, energy strictly down, fixed points.
Outcome criterion_steiner() {
    Outcome out;
    std::mt19937_64 rng(42);
    for (int k = 0; k < 100; ++k) {
        const GraphPair pair = random_graph_pair(rng);
        const FunctionalComparison cmp = compare_functionals(pair);
        const double drift = std::abs(cmp.A_after - cmp.A_before) / cmp.A_before;
        out.require(drift <= 1e-8, "area drift " + fmt(drift) + " at pair " + fmt(k));
        out.require(cmp.F_after < cmp.F_before,
                    "energy rose by " + fmt(cmp.F_after - cmp.F_before));
    }

    // a symmetric input is a fixed point, bitwise
    const GraphPair sym_pair = two_arc_pair(1.2, 1.2, 0.0, 0.0, 0.25);
    const GraphPair fixed = symmetrize(sym_pair);
    for (std::size_t j = 0; j < sym_pair.y_grid.size(); ++j) {
        out.require(fixed.f[j] == sym_pair.f[j] && fixed.g[j] == sym_pair.g[j],
                    "symmetric pair moved at node " + fmt(static_cast<double>(j)));
    }
    const FunctionalComparison cmp = compare_functionals(sym_pair);
    out.require(cmp.F_after == cmp.F_before, "symmetric energy changed");
    out.require(cmp.A_after == cmp.A_before, "symmetric area changed");
    return out;
}

// 8. The ratio A/F stays above 1/2 and trends to it as L/x0 grows.
Outcome criterion_ratio() {
    Outcome out;
    double prev = 2.0;
    for (int i = 0; i < 20; ++i) {
        const double ratio_lx = 4.0 * std::pow(1e6 / 4.0, static_cast<double>(i) / 19.0);
        const double r = hk_counterexample_ratio(make_params(1.0, ratio_lx));
        out.require(r > 0.5, "ratio " + fmt(r) + " at L/x0 = " + fmt(ratio_lx));
        out.require(r < prev, "ratio not decreasing at L/x0 = " + fmt(ratio_lx));
        prev = r;
    }
    out.require(prev - 0.5 < 1e-5, "limit trend stalls at " + fmt(prev));
    return out;
}

struct Criterion {
    const char* label;
    double budget_s;
    Outcome (*run)();
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"equilibrium equation and boundary conditions", 1.0, criterion_equilibrium},
        {"closed forms vs quadrature", 10.0, criterion_closed_forms},
        {"area-length bijection round trip", 1.0, criterion_bijection},
        {"variation formulas vs finite differences", 30.0, criterion_variations},
        {"stability constants and solution residuals", 120.0, criterion_stability},
        {"local minimality with coercivity bound", 60.0, criterion_minimality},
        {"symmetrization corpus", 30.0, criterion_steiner},
        {"inverse-curvature ratio trend", 1.0, criterion_ratio},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double dt = seconds_since(t0);
        if (dt > criteria[i].budget_s) {
            out.pass = false;
            if (out.detail.empty())
                out.detail = "runtime " + fmt(dt) + " s over budget " +
                             fmt(criteria[i].budget_s) + " s";
        }
        std::printf("[%s] %zu. %s (%.2f s)%s%s\n", out.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].label, dt, out.detail.empty() ? "" : " -- ",
                    out.detail.c_str());
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
