#pragma once

// Variation machinery: admissible deformation fields of an arc-length curve,
// the perturbed-curve families they generate, and the first/second variation
// formulas of the inverse-curvature energy, the enclosed area, and their
// constrained combination G = F - lambda * A.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "icl/critical.hpp"
#include "icl/curve.hpp"
#include "icl/errors.hpp"
#include "icl/numerics/fd.hpp"
#include "icl/numerics/quadrature.hpp"
#include "icl/numerics/spline.hpp"

namespace icl {

// Scalar profile on [0, 2L] with exact first and second derivatives. A
// default-constructed profile is identically zero, so unused field components
// cost nothing.
struct Profile {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> ddf;

    bool is_zero() const { return !f; }
    double operator()(double s) const { return f ? f(s) : 0.0; }
    double d(double s) const { return df ? df(s) : 0.0; }
    double dd(double s) const { return ddf ? ddf(s) : 0.0; }
};

// Deformation field gamma_t = gamma + t*(phi N + phi_tau T)
//                                   + (t^2/2)*(psi N + psi_tau T).
// All four components vanish at the endpoints (the variation fixes the
// boundary); fields used with the constrained second-variation formulas
// additionally have dphi/ds = 0 at both endpoints.
struct VariationField {
    Profile phi;      // normal velocity component
    Profile phi_tau;  // tangential velocity component
    Profile psi;      // normal acceleration component
    Profile psi_tau;  // tangential acceleration component
};

inline VariationField normal_field(Profile phi) {
    VariationField f;
    f.phi = std::move(phi);
    return f;
}

struct VariationCheckReport {
    double analytic = 0.0;
    double finite_difference = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;  // against max(1, |analytic|)
    double fd_step = 0.0;
};

// ---------------------------------------------------------------------------
// profile constructors

// a*p + b*q with exact derivatives.
inline Profile profile_sum(double a, const Profile& p, double b, const Profile& q) {
    Profile out;
    out.f = [a, p, b, q](double s) { return a * p(s) + b * q(s); };
    out.df = [a, p, b, q](double s) { return a * p.d(s) + b * q.d(s); };
    out.ddf = [a, p, b, q](double s) { return a * p.dd(s) + b * q.dd(s); };
    return out;
}

inline Profile scaled_profile(double a, const Profile& p) {
    return profile_sum(a, p, 0.0, Profile{});
}

// Smooth bump supported on [L/2, 3L/2]: exp(-1/(1-u^2)) in the rescaled
// coordinate u = (s-L)/(L/2), identically zero outside. All derivatives
// vanish at the support boundary, so the profile is C^infinity on [0, 2L].
inline Profile bump_profile(double L, double amplitude = 1.0) {
    const double half = 0.5 * L;
    Profile p;
    auto u_of = [L, half](double s) { return (s - L) / half; };
    p.f = [=](double s) {
        const double u = u_of(s);
        if (std::abs(u) >= 1.0 - 1e-8) return 0.0;
        return amplitude * std::exp(-1.0 / (1.0 - u * u));
    };
    p.df = [=](double s) {
        const double u = u_of(s);
        if (std::abs(u) >= 1.0 - 1e-8) return 0.0;
        const double m = 1.0 - u * u;
        return amplitude * std::exp(-1.0 / m) * (-2.0 * u / (m * m)) / half;
    };
    p.ddf = [=](double s) {
        const double u = u_of(s);
        if (std::abs(u) >= 1.0 - 1e-8) return 0.0;
        const double m = 1.0 - u * u;
        const double g1 = -2.0 * u / (m * m);
        const double g2 = -2.0 / (m * m) - 8.0 * u * u / (m * m * m);
        return amplitude * std::exp(-1.0 / m) * (g1 * g1 + g2) / (half * half);
    };
    return p;
}

// Band-limited random profile with two-sided clamped endpoints:
//   phi0(s) = sum_{k=1..modes} g_k k^-3 sin(k pi s / (2L)),  g_k ~ N(0,1),
// then explicit cubic corrections remove the endpoint slopes so that
// phi = dphi/ds = 0 at s = 0 and s = 2L exactly. Rescaled so that
// max(sup|phi|, sup|phi'|, sup|phi''|) = eps.
inline Profile random_clamped_profile(std::mt19937_64& rng, double L, double eps,
                                      int modes = 12, bool mean_zero = false) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> amp(static_cast<std::size_t>(modes));
    for (int k = 1; k <= modes; ++k)
        amp[static_cast<std::size_t>(k - 1)] = gauss(rng) / (static_cast<double>(k) *
                                                             static_cast<double>(k) *
                                                             static_cast<double>(k));
    const double len = 2.0 * L;
    const double a = 1.0 / len;  // shorthand for the correction cubics

    auto base = [amp, len, modes](double s) {
        double v = 0.0;
        for (int k = 1; k <= modes; ++k)
            v += amp[static_cast<std::size_t>(k - 1)] * std::sin(k * std::numbers::pi * s / len);
        return v;
    };
    auto dbase = [amp, len, modes](double s) {
        double v = 0.0;
        for (int k = 1; k <= modes; ++k) {
            const double w = k * std::numbers::pi / len;
            v += amp[static_cast<std::size_t>(k - 1)] * w * std::cos(w * s);
        }
        return v;
    };
    auto ddbase = [amp, len, modes](double s) {
        double v = 0.0;
        for (int k = 1; k <= modes; ++k) {
            const double w = k * std::numbers::pi / len;
            v -= amp[static_cast<std::size_t>(k - 1)] * w * w * std::sin(w * s);
        }
        return v;
    };

    // Correction cubics: B0 kills the left endpoint slope (B0(0)=B0(2L)=0,
    // B0'(0)=1, B0'(2L)=0) and B1 the right one (B1'(2L)=1, B1'(0)=0).
    const double s0 = dbase(0.0);
    const double s1 = dbase(len);
    Profile p;
    p.f = [=](double s) {
        const double b0 = s * (1.0 - a * s) * (1.0 - a * s);
        const double b1 = a * a * s * s * (s - len);
        return base(s) - s0 * b0 - s1 * b1;
    };
    p.df = [=](double s) {
        const double db0 = (1.0 - a * s) * (1.0 - 3.0 * a * s);
        const double db1 = a * a * (3.0 * s * s - 2.0 * len * s);
        return dbase(s) - s0 * db0 - s1 * db1;
    };
    p.ddf = [=](double s) {
        const double ddb0 = 2.0 * a * (3.0 * a * s - 2.0);
        const double ddb1 = a * a * (6.0 * s - 2.0 * len);
        return ddbase(s) - s0 * ddb0 - s1 * ddb1;
    };

    if (mean_zero) {
        // Remove the mean against sin^2(pi s / 2L), which keeps both the
        // endpoint values and slopes pinned at zero.
        double integral = simpson(p.f, 0.0, len, 4096);
        Profile carrier;
        carrier.f = [len](double s) {
            const double t = std::sin(std::numbers::pi * s / len);
            return t * t;
        };
        carrier.df = [len](double s) {
            const double w = std::numbers::pi / len;
            return w * std::sin(2.0 * w * s);
        };
        carrier.ddf = [len](double s) {
            const double w = std::numbers::pi / len;
            return 2.0 * w * w * std::cos(2.0 * w * s);
        };
        p = profile_sum(1.0, p, -integral / L, carrier);  // carrier integrates to L
    }

    // Normalize the C^2 size on a fine grid.
    double norm = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double s = len * static_cast<double>(i) / 4096.0;
        norm = std::max({norm, std::abs(p(s)), std::abs(p.d(s)), std::abs(p.dd(s))});
    }
    if (norm == 0.0) return p;
    return scaled_profile(eps / norm, p);
}

// Spline-backed profile from samples; the endpoint slopes come from one-sided
// 4-point stencils so the boundary terms of the variation formulas are
// third-order accurate even when the field is only known on the grid.
inline Profile profile_from_samples(std::vector<double> s, std::vector<double> values) {
    auto sp = std::make_shared<CubicSpline>(s, values);
    const double left = s.front();
    const double right = s.back();
    const double dleft = endpoint_deriv1_4pt(s, values, false);
    const double dright = endpoint_deriv1_4pt(s, values, true);
    Profile p;
    p.f = [sp](double x) { return (*sp)(x); };
    p.df = [sp, left, right, dleft, dright](double x) {
        if (x <= left) return dleft;
        if (x >= right) return dright;
        return sp->deriv(x);
    };
    p.ddf = [sp](double x) { return sp->deriv2(x); };
    return p;
}

// ---------------------------------------------------------------------------
// perturbed families

namespace detail {

inline void require_family_base(const DiscreteCurve& base) {
    if (!base.analytic || !base.analytic->gamma || !base.analytic->dgamma ||
        !base.analytic->ddgamma || !base.analytic->dddgamma)
        throw std::invalid_argument(
            "perturbed family needs analytic curve evaluators up to the third derivative");
    // The frame decomposition below identifies N with perp(dgamma), which is
    // only a unit normal on an arc-length parametrization.
    for (double s : {0.0, 0.5 * base.analytic->s_end, base.analytic->s_end}) {
        if (std::abs(base.analytic->dgamma(s).norm() - 1.0) > 1e-8)
            throw std::invalid_argument("perturbed family base must be arc-length parametrized");
    }
}

}  // namespace detail

// Exact evaluators of gamma_t = gamma + t X + (t^2/2) Y with
// X = phi N + phi_tau T and Y = psi N + psi_tau T. Derivatives in s are
// assembled from the base derivatives directly (N = perp(T) on an arc-length
// base), so the returned curve can be framed without finite differences.
inline std::shared_ptr<const CurveEvaluators> perturbed_evaluators(const DiscreteCurve& base,
                                                                   const VariationField& field,
                                                                   double t) {
    detail::require_family_base(base);
    auto bb = base.analytic;
    const Profile n1 = profile_sum(t, field.phi, 0.5 * t * t, field.psi);
    const Profile t1 = profile_sum(t, field.phi_tau, 0.5 * t * t, field.psi_tau);

    auto out = std::make_shared<CurveEvaluators>();
    out->s_end = bb->s_end;
    out->gamma = [bb, n1, t1](double s) {
        const Vec2 d1 = bb->dgamma(s);
        return bb->gamma(s) + n1(s) * perp(d1) + t1(s) * d1;
    };
    out->dgamma = [bb, n1, t1](double s) {
        const Vec2 d1 = bb->dgamma(s);
        const Vec2 d2 = bb->ddgamma(s);
        return d1 + n1.d(s) * perp(d1) + n1(s) * perp(d2) + t1.d(s) * d1 + t1(s) * d2;
    };
    out->ddgamma = [bb, n1, t1](double s) {
        const Vec2 d1 = bb->dgamma(s);
        const Vec2 d2 = bb->ddgamma(s);
        const Vec2 d3 = bb->dddgamma(s);
        return d2 + n1.dd(s) * perp(d1) + 2.0 * n1.d(s) * perp(d2) + n1(s) * perp(d3) +
               t1.dd(s) * d1 + 2.0 * t1.d(s) * d2 + t1(s) * d3;
    };
    return out;
}

// Geodesic normal variation gamma + t*phi*N as a sampled curve. Endpoints are
// fixed because phi vanishes there; admissibility of the result is checked and
// failures are reported, not silently returned.
inline DiscreteCurve geodesic_normal_variation(const DiscreteCurve& base, const Profile& phi,
                                               double t) {
    detail::require_family_base(base);
    const double len = base.analytic->s_end;
    const double scale = std::max(1.0, std::abs(phi(0.5 * len)));
    if (std::abs(phi(0.0)) > 1e-12 * scale || std::abs(phi(len)) > 1e-12 * scale)
        throw std::invalid_argument("geodesic_normal_variation: phi must vanish at the endpoints");

    auto eval = perturbed_evaluators(base, normal_field(phi), t);
    DiscreteCurve out = sample_analytic(eval, base.s.size(), base.L_half, base.x0);
    const CurveFrame frame = frame_and_curvature(out);
    const AdmissibilityReport rep = check_admissible(out, frame);
    if (!rep.is_admissible) {
        std::string why = "geodesic_normal_variation: ";
        for (const auto& m : rep.messages) why += m + "; ";
        throw AdmissibilityLost(why);
    }
    return out;
}

// Energy or area along the family t -> gamma + tX + (t^2/2)Y, used as the
// finite-difference oracle for the variation formulas.
inline double energy_along(const DiscreteCurve& base, const VariationField& field, double t,
                           std::size_t n = 8192) {
    auto eval = perturbed_evaluators(base, field, t);
    DiscreteCurve c = sample_analytic(eval, n, base.L_half, base.x0);
    return total_inverse_curvature(c, frame_and_curvature(c));
}

inline double area_along(const DiscreteCurve& base, const VariationField& field, double t,
                         std::size_t n = 8192) {
    auto eval = perturbed_evaluators(base, field, t);
    DiscreteCurve c = sample_analytic(eval, n, base.L_half, base.x0);
    return enclosed_area(c);
}

// ---------------------------------------------------------------------------
// area-preserving correction

struct AreaPreservingFamily {
    std::vector<double> t;
    std::vector<double> g;  // correction amplitudes; g(0) = 0 and g'(0) = 0
    std::vector<DiscreteCurve> curves;
    std::vector<double> F_values;
    std::vector<double> A_values;
};

// Corrects the geodesic family gamma + t*phi*N (with mean-zero phi) into an
// exactly area-preserving one by adding g(t) * bump * N, where the bump has
// nonzero mean. The area is an exactly quadratic polynomial in the correction
// amplitude, so the safeguarded Newton iteration below converges in a few
// steps; 50 iterations without reaching the residual target is a stall.
inline AreaPreservingFamily make_area_preserving(const DiscreteCurve& base, const Profile& phi,
                                                 const std::vector<double>& t_grid,
                                                 std::size_t n = 4096) {
    detail::require_family_base(base);
    const double len = base.analytic->s_end;
    const double L = 0.5 * len;

    double sup = 0.0;
    for (int i = 0; i <= 512; ++i)
        sup = std::max(sup, std::abs(phi(len * static_cast<double>(i) / 512.0)));
    const double mean = simpson([&phi](double s) { return phi(s); }, 0.0, len, 8192);
    if (std::abs(mean) > 1e-9 * std::max(1.0, sup) * len)
        throw std::invalid_argument("make_area_preserving: phi must have zero mean");

    const Profile bump = bump_profile(L);
    const double target = enclosed_area(resample(base, n));

    AreaPreservingFamily fam;
    fam.t = t_grid;
    for (double t : t_grid) {
        auto area_of = [&](double u) {
            VariationField f = normal_field(profile_sum(t, phi, u, bump));
            return area_along(base, f, 1.0, n) - target;
        };
        double u = 0.0;
        double r = area_of(u);
        bool done = std::abs(r) < 1e-12;
        for (int it = 0; it < 50 && !done; ++it) {
            const double h = 1e-6 * (1.0 + std::abs(u));
            const double slope = (area_of(u + h) - area_of(u - h)) / (2.0 * h);
            if (!(slope != 0.0) || !std::isfinite(slope))
                throw NewtonStall("make_area_preserving: flat area response");
            u -= r / slope;
            r = area_of(u);
            done = std::abs(r) < 1e-12;
        }
        if (!done) throw NewtonStall("make_area_preserving: no convergence in 50 iterations");

        VariationField f = normal_field(profile_sum(t, phi, u, bump));
        auto eval = perturbed_evaluators(base, f, 1.0);
        DiscreteCurve c = sample_analytic(eval, n, base.L_half, base.x0);
        fam.g.push_back(u);
        fam.curves.push_back(c);
        fam.F_values.push_back(total_inverse_curvature(c, frame_and_curvature(c)));
        fam.A_values.push_back(enclosed_area(c));
    }
    return fam;
}

// ---------------------------------------------------------------------------
// variation formulas

// First variation of the energy in the plane:
//   dF = \int ((H^-2)'' + 2) phi ds + [H^-2 dphi/ds] at the ends.
// At an equilibrium the integrand collapses to lambda * phi, so the value is
// lambda * \int phi plus the boundary term.
inline double first_variation_F(const CriticalCurve& curve, const VariationField& field) {
    const auto& s = curve.view.s;
    const std::size_t n = s.size();
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double H = curve.curvature(s[i]);
        const double H1 = curve.dcurvature(s[i]);
        const double H2 = curve.ddcurvature(s[i]);
        const double inv2_dd = 6.0 * H1 * H1 / std::pow(H, 4) - 2.0 * H2 / std::pow(H, 3);
        integrand[i] = (inv2_dd + 2.0) * field.phi(s[i]);
    }
    const double h = s[1] - s[0];
    const double bulk = simpson_uniform(integrand, h);
    const double H_lo = curve.curvature(s.front());
    const double H_hi = curve.curvature(s.back());
    const double boundary =
        field.phi.d(s.back()) / (H_hi * H_hi) - field.phi.d(s.front()) / (H_lo * H_lo);
    return bulk + boundary;
}

// Same formula on a sampled curve: curvature from the frame, (H^-2)'' from
// grid stencils. Valid for arc-length parametrized strictly convex curves.
inline double first_variation_F(const DiscreteCurve& curve, const VariationField& field) {
    const CurveFrame frame = frame_and_curvature(curve);
    const std::size_t n = curve.s.size();
    std::vector<double> inv2(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(frame.curvature[i] > 0.0))
            throw NonConvexCurve("first_variation_F: curvature must be positive");
        inv2[i] = 1.0 / (frame.curvature[i] * frame.curvature[i]);
    }
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i)
        integrand[i] = (sample_deriv2(curve.s, inv2, i) + 2.0) * field.phi(curve.s[i]);
    const double bulk = detail::integrate_on_grid(curve, integrand);
    const double boundary = field.phi.d(curve.s.back()) * inv2[n - 1] -
                            field.phi.d(curve.s.front()) * inv2[0];
    return bulk + boundary;
}

// Second variation of the energy at the equilibrium:
//   d2F = \int (2 H phi^2 - 2 phi'^2 / H + 2 phi''^2 / H^3) ds
//       + lambda \int (psi + H phi_tau^2 + 2 phi phi_tau') ds
//       + [(psi' - 2 phi' phi_tau') / H^2] at the ends.
// The boundary term is the general one; it reduces to [psi'/H^2] for fields
// with clamped endpoint slopes.
inline double second_variation_F(const CriticalParams& params, const VariationField& field,
                                 std::size_t n = 4096) {
    const CriticalCurve curve = build_critical_curve(params, n);
    const auto& s = curve.view.s;
    std::vector<double> quad(n), lin(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double H = curve.curvature(s[i]);
        const double p = field.phi(s[i]);
        const double dp = field.phi.d(s[i]);
        const double ddp = field.phi.dd(s[i]);
        quad[i] = 2.0 * H * p * p - 2.0 * dp * dp / H + 2.0 * ddp * ddp / (H * H * H);
        lin[i] = field.psi(s[i]) + H * field.phi_tau(s[i]) * field.phi_tau(s[i]) +
                 2.0 * p * field.phi_tau.d(s[i]);
    }
    const double h = s[1] - s[0];
    const double H0 = curve.curvature(s.front());
    const double HL = curve.curvature(s.back());
    const double b_lo =
        (field.psi.d(s.front()) - 2.0 * field.phi.d(s.front()) * field.phi_tau.d(s.front())) /
        (H0 * H0);
    const double b_hi =
        (field.psi.d(s.back()) - 2.0 * field.phi.d(s.back()) * field.phi_tau.d(s.back())) /
        (HL * HL);
    return simpson_uniform(quad, h) + params.lambda * simpson_uniform(lin, h) + (b_hi - b_lo);
}

// Second variation of the enclosed area on any admissible arc-length curve:
//   d2A = \int H phi^2 ds + \int (psi + H phi_tau^2 + 2 phi phi_tau') ds.
inline double second_variation_area(const DiscreteCurve& curve, const VariationField& field) {
    const CurveFrame frame = frame_and_curvature(curve);
    const std::size_t n = curve.s.size();
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double H = frame.curvature[i];
        const double p = field.phi(curve.s[i]);
        integrand[i] = H * p * p + field.psi(curve.s[i]) +
                       H * field.phi_tau(curve.s[i]) * field.phi_tau(curve.s[i]) +
                       2.0 * p * field.phi_tau.d(curve.s[i]);
    }
    return detail::integrate_on_grid(curve, integrand);
}

struct SecondVariationG {
    double value = 0.0;             // integral plus boundary term
    double coercive_integral = 0.0; // integral part alone, the stability bound
};

// Second variation of G = F - lambda * A at the equilibrium:
//   d2G = \int ((2-lambda) H phi^2 - 2 phi'^2/H + 2 phi''^2/H^3) ds
//       + [(psi' - 2 phi' phi_tau')/H^2] at the ends.
inline SecondVariationG second_variation_G(const CriticalParams& params,
                                           const VariationField& field, std::size_t n = 4096) {
    const CriticalCurve curve = build_critical_curve(params, n);
    const auto& s = curve.view.s;
    std::vector<double> quad(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double H = curve.curvature(s[i]);
        const double p = field.phi(s[i]);
        const double dp = field.phi.d(s[i]);
        const double ddp = field.phi.dd(s[i]);
        quad[i] = (2.0 - params.lambda) * H * p * p - 2.0 * dp * dp / H +
                  2.0 * ddp * ddp / (H * H * H);
    }
    const double h = s[1] - s[0];
    const double H0 = curve.curvature(s.front());
    const double HL = curve.curvature(s.back());
    const double b_lo =
        (field.psi.d(s.front()) - 2.0 * field.phi.d(s.front()) * field.phi_tau.d(s.front())) /
        (H0 * H0);
    const double b_hi =
        (field.psi.d(s.back()) - 2.0 * field.phi.d(s.back()) * field.phi_tau.d(s.back())) /
        (HL * HL);
    SecondVariationG out;
    out.coercive_integral = simpson_uniform(quad, h);
    out.value = out.coercive_integral + (b_hi - b_lo);
    return out;
}

// ---------------------------------------------------------------------------
// finite-difference validation

inline VariationCheckReport check_first_variation(const DiscreteCurve& base,
                                                  const VariationField& field, double analytic,
                                                  double h, std::size_t n = 8192) {
    VariationCheckReport rep;
    rep.analytic = analytic;
    rep.fd_step = h;
    rep.finite_difference =
        richardson_diff1([&](double t) { return energy_along(base, field, t, n); }, 0.0, h);
    rep.abs_err = std::abs(rep.analytic - rep.finite_difference);
    rep.rel_err = rep.abs_err / std::max(1.0, std::abs(rep.analytic));
    return rep;
}

template <class F>
VariationCheckReport check_second_variation(F&& value_along, double analytic, double h) {
    VariationCheckReport rep;
    rep.analytic = analytic;
    rep.fd_step = h;
    rep.finite_difference = richardson_diff2(value_along, 0.0, h);
    rep.abs_err = std::abs(rep.analytic - rep.finite_difference);
    rep.rel_err = rep.abs_err / std::max(1.0, std::abs(rep.analytic));
    return rep;
}

}  // namespace icl
