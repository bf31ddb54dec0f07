#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "icl/curve.hpp"
#include "icl/errors.hpp"
#include "icl/numerics/roots.hpp"
#include "icl/numerics/spline.hpp"

namespace icl {

// Convex region between a left boundary x = f(y) (convex) and a right
// boundary x = g(y) (concave), sampled on a shared height grid strictly
// inside (0, ybar).
struct GraphPair {
    std::vector<double> y_grid;  // strictly increasing heights
    std::vector<double> f;       // left boundary
    std::vector<double> g;       // right boundary
    double ybar = 0.0;           // top of the region
};

namespace detail {

// Chebyshev-clustered heights on the open interval (0, ybar). In graph form
// the boundary tangents go vertical at the axis and at the apex, so the grid
// keeps clear of both ends while clustering toward them.
inline std::vector<double> clustered_heights(double ybar, std::size_t m) {
    if (m < 16) throw TooFewSamples("clustered_heights: need at least 16 nodes");
    std::vector<double> y(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
        y[j] = 0.5 * ybar * (1.0 - std::cos(t));
    }
    return y;
}

}  // namespace detail

// Split a convex curve at its apex and resample both boundary branches onto a
// shared height grid by monotone spline inversion. The left branch is
// reversed and mirrored before inversion so that a vertically symmetric curve
// runs through the same arithmetic on both sides and f = -g comes out exact.
inline GraphPair to_graph_pair(const DiscreteCurve& curve, const CurveFrame& frame,
                               std::size_t m = 2048) {
    detail::require_valid_grid(curve);
    const std::size_t n = curve.pts.size();
    if (frame.curvature.size() != n)
        throw DegenerateSpacing("to_graph_pair: frame and curve sample counts differ");
    for (std::size_t i = 0; i < n; ++i)
        if (!(frame.curvature[i] > 0.0))
            throw NotConvex("to_graph_pair: curvature " + std::to_string(frame.curvature[i]) +
                            " at s = " + std::to_string(curve.s[i]));

    std::size_t apex = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (curve.pts[i].y > curve.pts[apex].y) apex = i;
    if (apex == 0 || apex + 1 == n)
        throw MultipleApexes("to_graph_pair: height profile has no interior maximum");
    // strict monotonicity up to rounding: an apex that falls between samples
    // leaves a bitwise tie that is geometry-free
    const double tie_tol = 1e-12 * curve.pts[apex].y;
    for (std::size_t i = 0; i < apex; ++i)
        if (!(curve.pts[i + 1].y > curve.pts[i].y - tie_tol))
            throw MultipleApexes("to_graph_pair: height not strictly increasing before the apex");
    for (std::size_t i = apex; i + 1 < n; ++i)
        if (!(curve.pts[i + 1].y < curve.pts[i].y + tie_tol))
            throw MultipleApexes("to_graph_pair: height not strictly decreasing after the apex");

    // right branch as sampled; left branch reversed and mirrored so both run
    // upward with the same parameter origin
    std::vector<double> sr(apex + 1), xr(apex + 1), yr(apex + 1);
    for (std::size_t i = 0; i <= apex; ++i) {
        sr[i] = curve.s[i];
        xr[i] = curve.pts[i].x;
        yr[i] = curve.pts[i].y;
    }
    const double s_end = curve.s.back();
    const std::size_t nl = n - apex;
    std::vector<double> sl(nl), xl(nl), yl(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        const std::size_t idx = n - 1 - j;
        sl[j] = s_end - curve.s[idx];
        xl[j] = -curve.pts[idx].x;
        yl[j] = curve.pts[idx].y;
    }

    const CubicSpline y_right(sr, yr), x_right(sr, xr);
    const CubicSpline y_left(sl, yl), x_left(sl, xl);

    GraphPair pair;
    pair.ybar = curve.pts[apex].y;
    pair.y_grid = detail::clustered_heights(pair.ybar, m);
    pair.f.resize(m);
    pair.g.resize(m);
    auto invert = [](const CubicSpline& ys, const CubicSpline& xs, double lo, double hi,
                     double target) {
        const double s_star =
            bisect([&](double s) { return ys(s) - target; }, lo, hi, 0.0, 120);
        return xs(s_star);
    };
    for (std::size_t j = 0; j < m; ++j) {
        const double y = pair.y_grid[j];
        pair.g[j] = invert(y_right, x_right, sr.front(), sr.back(), y);
        pair.f[j] = -invert(y_left, x_left, sl.front(), sl.back(), y);
    }
    return pair;
}

// Steiner symmetrization: replace the region by the one of the same width
// centered on the vertical axis. Exact fixed point for symmetric input.
inline GraphPair symmetrize(const GraphPair& pair) {
    GraphPair out;
    out.y_grid = pair.y_grid;
    out.ybar = pair.ybar;
    out.f.resize(pair.f.size());
    out.g.resize(pair.g.size());
    for (std::size_t j = 0; j < pair.f.size(); ++j) {
        const double h = 0.5 * (pair.g[j] - pair.f[j]);
        out.f[j] = -h;
        out.g[j] = h;
    }
    return out;
}

// Boundary slopes and convexities on the pair's own grid, estimated from
// interpolating splines of f and g.
struct GraphDerivatives {
    std::vector<double> df, ddf;  // left boundary
    std::vector<double> dg, ddg;  // right boundary
};

inline GraphDerivatives graph_derivatives(const GraphPair& pair) {
    if (pair.y_grid.size() < 16) throw TooFewSamples("graph_derivatives: grid too coarse");
    const CubicSpline sf(pair.y_grid, pair.f), sg(pair.y_grid, pair.g);
    const std::size_t m = pair.y_grid.size();
    GraphDerivatives d;
    d.df.resize(m);
    d.ddf.resize(m);
    d.dg.resize(m);
    d.ddg.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double y = pair.y_grid[j];
        d.df[j] = sf.deriv(y);
        d.ddf[j] = sf.deriv2(y);
        d.dg[j] = sg.deriv(y);
        d.ddg[j] = sg.deriv2(y);
    }
    return d;
}

// Line integral of 1/H along a graph branch, per unit height: a branch with
// slope z and convexity w > 0 contributes (1 + z^2)^2 / w. Strictly convex in
// (z, w), which is what drives the decrease under symmetrization.
inline double inv_curvature_graph_integrand(double slope, double convexity) {
    const double one_plus = 1.0 + slope * slope;
    return one_plus * one_plus / convexity;
}

// Curvature of each boundary (and of the symmetrized one) as a function of
// height, from the same derivative estimates used by the functionals.
struct GraphCurvatures {
    std::vector<double> left, right, symmetrized;
};

inline GraphCurvatures graph_curvatures(const GraphPair& pair) {
    const GraphDerivatives d = graph_derivatives(pair);
    const std::size_t m = pair.y_grid.size();
    GraphCurvatures out;
    out.left.resize(m);
    out.right.resize(m);
    out.symmetrized.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        out.left[j] = d.ddf[j] / std::pow(1.0 + d.df[j] * d.df[j], 1.5);
        out.right[j] = -d.ddg[j] / std::pow(1.0 + d.dg[j] * d.dg[j], 1.5);
        const double zm = 0.5 * (d.df[j] - d.dg[j]);
        out.symmetrized[j] = 0.5 * (d.ddf[j] - d.ddg[j]) / std::pow(1.0 + zm * zm, 1.5);
    }
    return out;
}

// Area and total inverse curvature before and after symmetrization. Areas are
// width integrals over the full grid; the symmetrized width equals the
// original one identically, so the area is preserved to rounding. The
// inverse-curvature integrals run over the clipped window
// [window_rel * ybar, (1 - window_rel) * ybar], where the graph derivatives
// stay resolvable; both sides are clipped identically and the pointwise
// comparison is direction-preserving on any window.
struct FunctionalComparison {
    double A_before = 0.0;
    double A_after = 0.0;
    double F_before = 0.0;
    double F_after = 0.0;
    double window_lo = 0.0;  // heights actually integrated for F
    double window_hi = 0.0;
};

inline FunctionalComparison compare_functionals(const GraphPair& pair, double window_rel = 1e-3,
                                                double convexity_floor = 1e-9) {
    const std::size_t m = pair.y_grid.size();
    if (m < 16 || pair.f.size() != m || pair.g.size() != m)
        throw TooFewSamples("compare_functionals: malformed pair");

    std::vector<double> width(m), width_sym(m);
    for (std::size_t j = 0; j < m; ++j) {
        width[j] = pair.g[j] - pair.f[j];
        width_sym[j] = 2.0 * (0.5 * (pair.g[j] - pair.f[j]));
    }
    FunctionalComparison cmp;
    cmp.A_before = integrate_samples(pair.y_grid, width);
    cmp.A_after = integrate_samples(pair.y_grid, width_sym);

    const GraphDerivatives d = graph_derivatives(pair);
    cmp.window_lo = window_rel * pair.ybar;
    cmp.window_hi = (1.0 - window_rel) * pair.ybar;
    std::vector<double> yw, before, after;
    yw.reserve(m);
    before.reserve(m);
    after.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double y = pair.y_grid[j];
        if (y < cmp.window_lo || y > cmp.window_hi) continue;
        const double wf = d.ddf[j];
        const double wg = -d.ddg[j];
        if (wf < convexity_floor || wg < convexity_floor)
            throw DegenerateCurvature("compare_functionals: boundary convexity " +
                                      std::to_string(std::min(wf, wg)) + " at y = " +
                                      std::to_string(y) + " is below the floor");
        yw.push_back(y);
        before.push_back(inv_curvature_graph_integrand(d.df[j], wf) +
                         inv_curvature_graph_integrand(-d.dg[j], wg));
        after.push_back(2.0 * inv_curvature_graph_integrand(0.5 * (d.df[j] - d.dg[j]),
                                                            0.5 * (wf + wg)));
    }
    if (yw.size() < 16) throw TooFewSamples("compare_functionals: window left too few nodes");
    cmp.F_before = integrate_samples(yw, before);
    cmp.F_after = integrate_samples(yw, after);
    return cmp;
}

// Rebuild an arc-length sampled curve bounding the pair's region: up the
// right boundary, across the apex, down the left one. The grid stops just
// short of the axis, so both feet are extended to y = 0 along the local
// quadratic model. Used to cross-check the width integral against the
// curve-side area form.
inline DiscreteCurve reconstitute(const GraphPair& pair, std::size_t n = 4096) {
    const std::size_t m = pair.y_grid.size();
    if (m < 16) throw TooFewSamples("reconstitute: grid too coarse");
    const CubicSpline sf(pair.y_grid, pair.f), sg(pair.y_grid, pair.g);
    const double y0 = pair.y_grid.front();
    const double foot_right = sg(y0) - sg.deriv(y0) * y0 + 0.5 * sg.deriv2(y0) * y0 * y0;
    const double foot_left = sf(y0) - sf.deriv(y0) * y0 + 0.5 * sf.deriv2(y0) * y0 * y0;

    std::vector<Vec2> poly;
    poly.reserve(2 * m + 3);
    poly.push_back({foot_right, 0.0});
    for (std::size_t j = 0; j < m; ++j) poly.push_back({pair.g[j], pair.y_grid[j]});
    poly.push_back({0.5 * (pair.f[m - 1] + pair.g[m - 1]), pair.ybar});
    for (std::size_t j = m; j-- > 0;) poly.push_back({pair.f[j], pair.y_grid[j]});
    poly.push_back({foot_left, 0.0});

    DiscreteCurve chain;
    chain.pts = std::move(poly);
    chain.s.resize(chain.pts.size());
    chain.s[0] = 0.0;
    for (std::size_t i = 1; i < chain.pts.size(); ++i)
        chain.s[i] = chain.s[i - 1] + (chain.pts[i] - chain.pts[i - 1]).norm();
    chain.L_half = 0.5 * chain.s.back();
    chain.x0 = 0.5 * (foot_right - foot_left);
    return resample(chain, n);
}

// Two circular arcs with independent radii, shears and a horizontal gap:
// f(y) = -sqrt(rl^2 - y^2) + shear_l * y - gap/2 and mirrored for g. Convex /
// concave by construction; the gap and bounded shears keep f < g. A positive
// top_cut < 1 clips the region below the smaller radius, keeping both
// boundaries smooth across the whole grid (the region then ends in a flat
// top rather than an apex).
inline GraphPair two_arc_pair(double r_left, double r_right, double shear_left,
                              double shear_right, double gap, std::size_t m = 2048,
                              double top_cut = 1.0) {
    if (!(r_left > 0.0) || !(r_right > 0.0) || gap < 0.0 || !(top_cut > 0.0) || top_cut > 1.0)
        throw std::invalid_argument("two_arc_pair: need positive radii, gap >= 0, top_cut in (0,1]");
    GraphPair pair;
    pair.ybar = top_cut * std::min(r_left, r_right);
    pair.y_grid = detail::clustered_heights(pair.ybar, m);
    pair.f.resize(m);
    pair.g.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double y = pair.y_grid[j];
        pair.f[j] = -std::sqrt(r_left * r_left - y * y) + shear_left * y - 0.5 * gap;
        pair.g[j] = std::sqrt(r_right * r_right - y * y) + shear_right * y + 0.5 * gap;
    }
    return pair;
}

// Random asymmetric convex test region: independent radii, shears and gap,
// top cut at 80% of the smaller radius.
inline GraphPair random_graph_pair(std::mt19937_64& rng, std::size_t m = 2048) {
    std::uniform_real_distribution<double> radius(1.0, 2.0);
    std::uniform_real_distribution<double> shear(-0.2, 0.2);
    std::uniform_real_distribution<double> gap(0.0, 0.4);
    const double r_left = radius(rng);
    const double r_right = radius(rng);
    const double shear_left = shear(rng);
    const double shear_right = shear(rng);
    return two_arc_pair(r_left, r_right, shear_left, shear_right, gap(rng), m, 0.8);
}

}  // namespace icl
