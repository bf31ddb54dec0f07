#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icl/errors.hpp"
#include "icl/numerics/fd.hpp"
#include "icl/numerics/quadrature.hpp"
#include "icl/numerics/spline.hpp"

namespace icl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {c * x, c * y}; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Quarter-turn used throughout: (xi, eta) -> (eta, -xi). For a counterclockwise
// convex curve this makes N = perp(tangent) the outward normal.
inline Vec2 perp(Vec2 v) { return {v.y, -v.x}; }

// Exact parametrization attached to a sampled curve. When present, frames and
// quadratures use these instead of finite differences; s_end is the parameter
// range (equal to 2L for arc-length curves).
struct CurveEvaluators {
    std::function<Vec2(double)> gamma;
    std::function<Vec2(double)> dgamma;
    std::function<Vec2(double)> ddgamma;
    std::function<Vec2(double)> dddgamma;  // optional; needed to frame perturbed families
    double s_end = 0.0;
};

struct DiscreteCurve {
    std::vector<double> s;   // parameter grid, arc length unless perturbed
    std::vector<Vec2> pts;
    double L_half = 0.0;     // half-length L; the parameter runs over [0, 2L]
    double x0 = 0.0;         // endpoints sit at (+x0, 0) and (-x0, 0)
    std::shared_ptr<const CurveEvaluators> analytic;  // optional exact evaluators
};

struct CurveFrame {
    std::vector<Vec2> tangent;      // unit tangent per sample
    std::vector<Vec2> normal;       // perp(tangent), outward for admissible curves
    std::vector<double> curvature;  // H per sample
    std::vector<double> speed;      // |dgamma/ds| per sample (1 on arc-length grids)
};

struct AdmissibilityReport {
    bool is_admissible = false;
    double min_H = 0.0;
    double min_interior_y = 0.0;
    std::pair<double, double> endpoint_errors{0.0, 0.0};
    std::vector<std::string> messages;
};

// ---------------------------------------------------------------------------
// construction helpers

inline DiscreteCurve sample_analytic(std::shared_ptr<const CurveEvaluators> eval, std::size_t n,
                                     double L_half, double x0) {
    if (n < 5) throw TooFewSamples("sample_analytic: need at least 5 samples");
    DiscreteCurve c;
    c.s.resize(n);
    c.pts.resize(n);
    c.L_half = L_half;
    c.x0 = x0;
    const double h = eval->s_end / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        c.s[i] = h * static_cast<double>(i);
        c.pts[i] = eval->gamma(c.s[i]);
    }
    c.s.back() = eval->s_end;  // guard against rounding drift at the last node
    c.analytic = std::move(eval);
    return c;
}

inline bool arc_length_consistent(const DiscreteCurve& curve, double eps_arc) {
    for (std::size_t i = 0; i + 1 < curve.s.size(); ++i) {
        const double ds = curve.s[i + 1] - curve.s[i];
        if (!(ds > 0.0)) return false;
        const double ratio = (curve.pts[i + 1] - curve.pts[i]).norm() / ds;
        // chord/arc ratio of a smooth unit-speed curve is 1 - (H*ds)^2/24 + ...,
        // so allow that second-order sagitta term on top of the requested slack
        if (std::abs(ratio - 1.0) > eps_arc + ds * ds) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// frames and curvature

namespace detail {

inline void require_valid_grid(const DiscreteCurve& curve) {
    if (curve.s.size() < 5) throw TooFewSamples("curve needs at least 5 samples");
    if (curve.s.size() != curve.pts.size())
        throw DegenerateSpacing("curve sample/parameter counts differ");
    for (std::size_t i = 0; i + 1 < curve.s.size(); ++i)
        if (curve.s[i + 1] <= curve.s[i])
            throw DegenerateSpacing("parameter grid must be strictly increasing");
}

inline bool uniform_grid(std::span<const double> s) {
    const double h = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (std::abs((s[i + 1] - s[i]) - h) > 1e-9 * std::abs(h)) return false;
    return true;
}

// Quadrature of per-sample values against the curve's own grid.
inline double integrate_on_grid(const DiscreteCurve& curve, std::span<const double> values) {
    if (uniform_grid(curve.s)) {
        const double h =
            (curve.s.back() - curve.s.front()) / static_cast<double>(curve.s.size() - 1);
        return simpson_uniform(values, h);
    }
    return integrate_samples(curve.s, values);
}

}  // namespace detail

inline CurveFrame frame_and_curvature(const DiscreteCurve& curve) {
    detail::require_valid_grid(curve);
    const std::size_t n = curve.s.size();
    CurveFrame fr;
    fr.tangent.resize(n);
    fr.normal.resize(n);
    fr.curvature.resize(n);
    fr.speed.resize(n);

    std::vector<Vec2> d1(n), d2(n);
    if (curve.analytic) {
        for (std::size_t i = 0; i < n; ++i) {
            d1[i] = curve.analytic->dgamma(curve.s[i]);
            d2[i] = curve.analytic->ddgamma(curve.s[i]);
        }
    } else {
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = curve.pts[i].x;
            ys[i] = curve.pts[i].y;
        }
        for (std::size_t i = 0; i < n; ++i) {
            d1[i] = {sample_deriv1(curve.s, xs, i), sample_deriv1(curve.s, ys, i)};
            d2[i] = {sample_deriv2(curve.s, xs, i), sample_deriv2(curve.s, ys, i)};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double v = d1[i].norm();
        fr.speed[i] = v;
        fr.tangent[i] = d1[i] * (1.0 / v);
        fr.normal[i] = perp(fr.tangent[i]);
        fr.curvature[i] = dot(d1[i], perp(d2[i])) / (v * v * v);
    }
    return fr;
}

// ---------------------------------------------------------------------------
// functionals

// Total inverse curvature: integral of 1/H with respect to arc length. On a
// non-arc-length parametrization the line element contributes |dgamma|.
inline double total_inverse_curvature(const DiscreteCurve& curve, const CurveFrame& frame) {
    detail::require_valid_grid(curve);
    std::vector<double> integrand(curve.s.size());
    for (std::size_t i = 0; i < curve.s.size(); ++i) {
        if (!(frame.curvature[i] > 0.0))
            throw NonConvexCurve("total_inverse_curvature: H <= 0 at s = " +
                                 std::to_string(curve.s[i]));
        integrand[i] = frame.speed[i] / frame.curvature[i];
    }
    return detail::integrate_on_grid(curve, integrand);
}

// Area enclosed by the curve and the axis segment between its endpoints,
// computed from both divergence-theorem forms. The two must agree: their
// difference telescopes to  -(x*y)|_ends / 2, so endpoints off the axis (or a
// corrupted grid) show up as a mismatch rather than a silently wrong number.
inline double enclosed_area(const DiscreteCurve& curve) {
    detail::require_valid_grid(curve);
    const std::size_t n = curve.s.size();
    std::vector<double> dx(n), dy(n);
    if (curve.analytic) {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 d = curve.analytic->dgamma(curve.s[i]);
            dx[i] = d.x;
            dy[i] = d.y;
        }
    } else {
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = curve.pts[i].x;
            ys[i] = curve.pts[i].y;
        }
        for (std::size_t i = 0; i < n; ++i) {
            dx[i] = sample_deriv1(curve.s, xs, i);
            dy[i] = sample_deriv1(curve.s, ys, i);
        }
    }
    std::vector<double> f1(n), f2(n);
    for (std::size_t i = 0; i < n; ++i) {
        f1[i] = curve.pts[i].x * dy[i];
        f2[i] = 0.5 * (curve.pts[i].x * dy[i] - dx[i] * curve.pts[i].y);
    }
    const double a1 = detail::integrate_on_grid(curve, f1);
    const double a2 = detail::integrate_on_grid(curve, f2);
    const double h = (curve.s.back() - curve.s.front()) / static_cast<double>(n - 1);
    const double grid_tol = h * h;  // FD-frame quadrature error scale
    const double mean = 0.5 * (a1 + a2);
    if (std::abs(a1 - a2) > 10.0 * grid_tol * std::max(1.0, std::abs(mean)))
        throw FormMismatch("enclosed_area: divergence forms disagree: " + std::to_string(a1) +
                           " vs " + std::to_string(a2));
    return mean;
}

inline AdmissibilityReport check_admissible(const DiscreteCurve& curve, const CurveFrame& frame,
                                            double endpoint_tol = 1e-8) {
    AdmissibilityReport rep;
    rep.min_H = frame.curvature[0];
    for (double h : frame.curvature) rep.min_H = std::min(rep.min_H, h);

    rep.min_interior_y = curve.pts[1].y;
    for (std::size_t i = 1; i + 1 < curve.pts.size(); ++i)
        rep.min_interior_y = std::min(rep.min_interior_y, curve.pts[i].y);

    const Vec2 start{curve.x0, 0.0}, end{-curve.x0, 0.0};
    rep.endpoint_errors = {(curve.pts.front() - start).norm(), (curve.pts.back() - end).norm()};

    if (!(rep.min_H > 0.0))
        rep.messages.push_back("curvature reaches " + std::to_string(rep.min_H) +
                               "; curve is not strictly convex");
    if (!(rep.min_interior_y > 0.0))
        rep.messages.push_back("interior dips to y = " + std::to_string(rep.min_interior_y));
    if (rep.endpoint_errors.first > endpoint_tol || rep.endpoint_errors.second > endpoint_tol)
        rep.messages.push_back("endpoints miss (+/-x0, 0) by " +
                               std::to_string(rep.endpoint_errors.first) + " / " +
                               std::to_string(rep.endpoint_errors.second));

    rep.is_admissible = rep.messages.empty();
    return rep;
}

// Curve length by quadrature of the speed (not the polyline, which is only
// 2nd-order accurate).
inline double curve_length(const DiscreteCurve& curve) {
    detail::require_valid_grid(curve);
    const std::size_t n = curve.s.size();
    std::vector<double> speed(n);
    if (curve.analytic) {
        for (std::size_t i = 0; i < n; ++i)
            speed[i] = curve.analytic->dgamma(curve.s[i]).norm();
    } else {
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = curve.pts[i].x;
            ys[i] = curve.pts[i].y;
        }
        for (std::size_t i = 0; i < n; ++i)
            speed[i] = Vec2{sample_deriv1(curve.s, xs, i), sample_deriv1(curve.s, ys, i)}.norm();
    }
    return detail::integrate_on_grid(curve, speed);
}

inline DiscreteCurve resample(const DiscreteCurve& curve, std::size_t n) {
    if (n < 5) throw TooFewSamples("resample: need at least 5 samples");
    detail::require_valid_grid(curve);

    DiscreteCurve out;
    out.L_half = curve.L_half;
    out.x0 = curve.x0;
    out.analytic = curve.analytic;
    out.s.resize(n);
    out.pts.resize(n);
    const double a = curve.s.front();
    const double b = curve.s.back();
    const double h = (b - a) / static_cast<double>(n - 1);

    if (curve.analytic) {
        for (std::size_t i = 0; i < n; ++i) {
            out.s[i] = a + h * static_cast<double>(i);
            out.pts[i] = curve.analytic->gamma(out.s[i]);
        }
    } else {
        std::vector<double> xs(curve.s.size()), ys(curve.s.size());
        for (std::size_t i = 0; i < curve.s.size(); ++i) {
            xs[i] = curve.pts[i].x;
            ys[i] = curve.pts[i].y;
        }
        const CubicSpline sx(curve.s, xs), sy(curve.s, ys);
        for (std::size_t i = 0; i < n; ++i) {
            out.s[i] = a + h * static_cast<double>(i);
            out.pts[i] = {sx(out.s[i]), sy(out.s[i])};
        }
    }
    out.s.back() = b;
    out.pts.back() = curve.pts.back();
    return out;
}

}  // namespace icl
