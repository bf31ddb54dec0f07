#pragma once

// Stability analysis of the equilibrium arc. The constrained second variation
// is controlled by the quadratic forms
//   a(u,v) = int 2 u' v' / H ds,   b(u,v) = int (2 u'' v'' / H^3 + (2-l) H u v) ds
// over profiles with clamped endpoints, and the optimal constant
//   mu_W1 = inf b(u,u) / a(u,u)
// is computed two independent ways: as the first root of a closed-form
// characteristic determinant, and by Rayleigh-Ritz minimization with C^1
// Hermite elements. Stability (and a coercivity constant) follows from
// mu_W1 > 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "icl/critical.hpp"
#include "icl/errors.hpp"
#include "icl/numerics/chebyshev.hpp"
#include "icl/numerics/quadrature.hpp"
#include "icl/numerics/roots.hpp"
#include "icl/variations.hpp"

namespace icl {

// ---------------------------------------------------------------------------
// coefficients and regimes

// Coefficients of the fourth-order equation (r u'')'' + mu (q u')' + p u = nu.
struct CoefficientTriple {
    std::function<double(double)> r;  // 2 / H^3
    std::function<double(double)> q;  // 2 / H
    std::function<double(double)> p;  // (2 - lambda) H
};

inline CoefficientTriple make_coefficients(const CriticalParams& params) {
    CriticalCurve c;
    c.params = params;
    CoefficientTriple t;
    t.r = [c](double s) { return 2.0 / std::pow(c.curvature(s), 3); };
    t.q = [c](double s) { return 2.0 / c.curvature(s); };
    t.p = [c](double s) { return (2.0 - c.params.lambda) * c.curvature(s); };
    return t;
}

enum class Regime { Below, Critical, Above };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Below: return "below";
        case Regime::Critical: return "critical";
        default: return "above";
    }
}

// Threshold separating oscillatory-hyperbolic from purely oscillatory
// solutions: mu0 = -rho + 2 sqrt(rho) with rho = x0/(L+x0). (An alternative
// sign convention with +rho circulates; the minus sign is forced by the
// requirement that beta below be real exactly for mu < mu0.)
inline double mu0_threshold(const CriticalParams& params) {
    const double rho = params.x0 / (params.L + params.x0);
    return -rho + 2.0 * std::sqrt(rho);
}

struct RegimeParams {
    double mu = 0.0;
    double mu0 = 0.0;
    Regime regime = Regime::Below;
    double alpha = 0.0;
    double beta = 0.0;   // Below only
    double gamma = 0.0;  // Above only
};

// Frequencies come from the quartic z^4 - (mu + rho) z^2 + rho = 0 satisfied
// by the exponents of solutions in the angle variable.
inline RegimeParams make_regime(double mu, const CriticalParams& params) {
    if (!(mu > 0.0)) throw std::invalid_argument("make_regime: mu must be positive");
    const double rho = params.x0 / (params.L + params.x0);
    const double root = std::sqrt(rho);
    RegimeParams rp;
    rp.mu = mu;
    rp.mu0 = mu0_threshold(params);
    rp.alpha = 0.5 * std::sqrt(mu + rho + 2.0 * root);
    if (mu < rp.mu0) {
        rp.regime = Regime::Below;
        rp.beta = 0.5 * std::sqrt(rp.mu0 - mu);
    } else if (mu > rp.mu0) {
        rp.regime = Regime::Above;
        rp.gamma = 0.5 * std::sqrt(mu - rp.mu0);
    } else {
        rp.regime = Regime::Critical;
        rp.alpha = std::pow(rho, 0.25);
    }
    return rp;
}

// Characteristic determinant of the clamped endpoint conditions, in the
// regime-specific normalization (the three expressions are not continuations
// of one another across mu0).
inline double characteristic_det(double mu, const CriticalParams& params) {
    const RegimeParams rp = make_regime(mu, params);
    const double two_pi = 2.0 * std::numbers::pi;
    switch (rp.regime) {
        case Regime::Below: {
            const double sh = std::sinh(two_pi * rp.beta);
            const double sn = std::sin(two_pi * rp.alpha);
            return rp.alpha * rp.alpha * sh * sh - rp.beta * rp.beta * sn * sn;
        }
        case Regime::Critical: {
            const double sn = std::sin(two_pi * rp.alpha);
            return sn * sn - two_pi * two_pi * rp.alpha * rp.alpha;
        }
        default: {
            const double sa = std::sin(two_pi * rp.alpha);
            const double sg = std::sin(two_pi * rp.gamma);
            return 4.0 * rp.gamma * rp.gamma * sa * sa - 4.0 * rp.alpha * rp.alpha * sg * sg;
        }
    }
}

// ---------------------------------------------------------------------------
// closed-form solutions composed with the angle variable

// Value and first four derivatives with respect to the angle theta.
using DerivCycle = std::function<std::array<double, 5>(double)>;

inline DerivCycle cycle_sin(double a, double phase = 0.0) {
    return [a, phase](double th) -> std::array<double, 5> {
        const double s = std::sin(a * th + phase);
        const double c = std::cos(a * th + phase);
        return {s, a * c, -a * a * s, -a * a * a * c, a * a * a * a * s};
    };
}

inline DerivCycle cycle_cos(double a, double phase = 0.0) {
    return [a, phase](double th) -> std::array<double, 5> {
        const double s = std::sin(a * th + phase);
        const double c = std::cos(a * th + phase);
        return {c, -a * s, -a * a * c, a * a * a * s, a * a * a * a * c};
    };
}

inline DerivCycle cycle_sinh(double a) {
    return [a](double th) -> std::array<double, 5> {
        const double s = std::sinh(a * th);
        const double c = std::cosh(a * th);
        return {s, a * c, a * a * s, a * a * a * c, a * a * a * a * s};
    };
}

inline DerivCycle cycle_cosh(double a) {
    return [a](double th) -> std::array<double, 5> {
        const double s = std::sinh(a * th);
        const double c = std::cosh(a * th);
        return {c, a * s, a * a * c, a * a * a * s, a * a * a * a * c};
    };
}

inline DerivCycle cycle_linear() {
    return [](double th) -> std::array<double, 5> { return {th, 1.0, 0.0, 0.0, 0.0}; };
}

inline DerivCycle cycle_scale(double c, DerivCycle f) {
    return [c, f](double th) {
        std::array<double, 5> v = f(th);
        for (double& x : v) x *= c;
        return v;
    };
}

inline DerivCycle cycle_product(DerivCycle f, DerivCycle g) {
    return [f, g](double th) -> std::array<double, 5> {
        const std::array<double, 5> a = f(th);
        const std::array<double, 5> b = g(th);
        return {a[0] * b[0],
                a[1] * b[0] + a[0] * b[1],
                a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
                a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3],
                a[4] * b[0] + 4.0 * a[3] * b[1] + 6.0 * a[2] * b[2] + 4.0 * a[1] * b[3] +
                    a[0] * b[4]};
    };
}

// Scalar profile with exact derivatives up to fourth order in arc length.
struct OdeProfile {
    std::function<double(double)> u, du, d2u, d3u, d4u;
};

// Composition u(s) = f(theta(s)) through the chain rule; theta' = H and the
// higher curvature derivatives are closed-form, so all four s-derivatives are
// exact.
inline OdeProfile theta_profile(const CriticalParams& params, DerivCycle f) {
    CriticalCurve c;
    c.params = params;
    auto at = [c, f](double s, int order) {
        const double th = c.turning_angle(s);
        const std::array<double, 5> F = f(th);
        if (order == 0) return F[0];
        const double t1 = c.curvature(s);
        if (order == 1) return F[1] * t1;
        const double t2 = c.dcurvature(s);
        if (order == 2) return F[2] * t1 * t1 + F[1] * t2;
        const double t3 = c.ddcurvature(s);
        if (order == 3) return F[3] * t1 * t1 * t1 + 3.0 * F[2] * t1 * t2 + F[1] * t3;
        const double t4 = c.dddcurvature(s);
        return F[4] * t1 * t1 * t1 * t1 + 6.0 * F[3] * t1 * t1 * t2 +
               F[2] * (3.0 * t2 * t2 + 4.0 * t1 * t3) + F[1] * t4;
    };
    OdeProfile p;
    p.u = [at](double s) { return at(s, 0); };
    p.du = [at](double s) { return at(s, 1); };
    p.d2u = [at](double s) { return at(s, 2); };
    p.d3u = [at](double s) { return at(s, 3); };
    p.d4u = [at](double s) { return at(s, 4); };
    return p;
}

struct SolutionBasis {
    RegimeParams regime;
    std::array<OdeProfile, 4> u;
    double det_numeric = 0.0;  // 4x4 derivative matrix at s = 0, columns = basis
    double det_formula = 0.0;  // closed-form value of the same determinant
};

// The four homogeneous solutions in each regime, plus the endpoint matrix
// certifying their linear independence. Column order matches the closed-form
// determinant:
//   below:    cos(a th) sinh(b th), sin(a th) cosh(b th),
//             sin(a th) sinh(b th), cos(a th) cosh(b th)
//   critical: sin(a th), cos(a th), th sin(a th), th cos(a th)
//   above:    sin(z1 th), sin(z2 th), cos(z1 th), cos(z2 th), z12 = a -+ g
inline SolutionBasis solution_basis(double mu, const CriticalParams& params) {
    SolutionBasis out;
    out.regime = make_regime(mu, params);
    const RegimeParams& rp = out.regime;

    CriticalCurve c;
    c.params = params;
    const double H0 = c.curvature(0.0);

    switch (rp.regime) {
        case Regime::Below: {
            out.u[0] = theta_profile(params, cycle_product(cycle_cos(rp.alpha), cycle_sinh(rp.beta)));
            out.u[1] = theta_profile(params, cycle_product(cycle_sin(rp.alpha), cycle_cosh(rp.beta)));
            out.u[2] = theta_profile(params, cycle_product(cycle_sin(rp.alpha), cycle_sinh(rp.beta)));
            out.u[3] = theta_profile(params, cycle_product(cycle_cos(rp.alpha), cycle_cosh(rp.beta)));
            const double a2 = rp.alpha * rp.alpha;
            const double b2 = rp.beta * rp.beta;
            out.det_formula = 4.0 * std::pow(H0, 6) * a2 * b2 * (a2 + b2);
            break;
        }
        case Regime::Critical: {
            out.u[0] = theta_profile(params, cycle_sin(rp.alpha));
            out.u[1] = theta_profile(params, cycle_cos(rp.alpha));
            out.u[2] = theta_profile(params, cycle_product(cycle_linear(), cycle_sin(rp.alpha)));
            out.u[3] = theta_profile(params, cycle_product(cycle_linear(), cycle_cos(rp.alpha)));
            out.det_formula = 4.0 * std::pow(H0, 6) * std::pow(rp.alpha, 4);
            break;
        }
        default: {
            const double z1 = rp.alpha - rp.gamma;
            const double z2 = rp.alpha + rp.gamma;
            out.u[0] = theta_profile(params, cycle_sin(z1));
            out.u[1] = theta_profile(params, cycle_sin(z2));
            out.u[2] = theta_profile(params, cycle_cos(z1));
            out.u[3] = theta_profile(params, cycle_cos(z2));
            const double d = z1 * z1 - z2 * z2;
            out.det_formula = -std::pow(H0, 6) * z1 * z2 * d * d;
            break;
        }
    }

    Eigen::Matrix4d M;
    for (int col = 0; col < 4; ++col) {
        const OdeProfile& u = out.u[static_cast<std::size_t>(col)];
        M(0, col) = u.u(0.0);
        M(1, col) = u.du(0.0);
        M(2, col) = u.d2u(0.0);
        M(3, col) = u.d3u(0.0);
    }
    out.det_numeric = M.determinant();
    return out;
}

// Particular solution of (r u'')'' + mu (q u')' + p u = nu. Both branches are
// again functions of theta alone: H^-1 = (sigma kappa / pi) cos(sigma (theta/pi - 1))
// and s - L = kappa sin(sigma (theta/pi - 1)).
inline OdeProfile particular_solution(double mu, double nu, const CriticalParams& params) {
    const double sg = params.sigma;
    const double pi = std::numbers::pi;
    if (mu == 1.0) {
        return theta_profile(params,
                             cycle_scale(nu * params.kappa / (2.0 * params.lambda),
                                         cycle_product(cycle_linear(), cycle_sin(sg / pi, -sg))));
    }
    const double c = nu * sg * params.kappa / (pi * (2.0 - params.lambda) * (1.0 - mu));
    return theta_profile(params, cycle_scale(c, cycle_cos(sg / pi, -sg)));
}

// ---------------------------------------------------------------------------
// ODE residual oracles

// Max scaled defect of (r u'')'' + mu (q u')' + p u = nu on the interior grid,
// expanded as r'' u'' + 2 r' u''' + r u'''' + mu (q' u' + q u'') + p u.
inline double ode_residual(const OdeProfile& u, double mu, double nu,
                           const CriticalParams& params, std::size_t n = 2048) {
    CriticalCurve c;
    c.params = params;
    double worst = 0.0;
    double scale = std::abs(nu);
    const double len = 2.0 * params.L;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = len * static_cast<double>(i) / static_cast<double>(n - 1);
        const double H = c.curvature(s);
        const double H1 = c.dcurvature(s);
        const double H2 = c.ddcurvature(s);
        const double r = 2.0 / std::pow(H, 3);
        const double r1 = -6.0 * H1 / std::pow(H, 4);
        const double r2 = -6.0 * H2 / std::pow(H, 4) + 24.0 * H1 * H1 / std::pow(H, 5);
        const double q = 2.0 / H;
        const double q1 = -2.0 * H1 / (H * H);
        const double p = (2.0 - params.lambda) * H;
        const double res = r2 * u.d2u(s) + 2.0 * r1 * u.d3u(s) + r * u.d4u(s) +
                           mu * (q1 * u.du(s) + q * u.d2u(s)) + p * u.u(s) - nu;
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(p * u.u(s)) + std::abs(nu));
    }
    return worst / (scale + std::numeric_limits<double>::epsilon());
}

// Discrete-profile variant. The fit runs in the angle coordinate
// xi = theta(s)/pi - 1 in [-1, 1]: the solutions are entire functions of the
// angle, whereas in arc length they carry branch points just outside [0, 2L]
// (at s = L -+ kappa) that stall polynomial convergence. Coefficients below
// the noise floor are dropped, the series is differentiated exactly four
// times, and arc-length derivatives come from the chain rule with
// xi' = H/pi, xi'' = H'/pi, and so on. Evaluation stays away from the ends,
// where a least-squares fit of finite-element data is least reliable.
inline double ode_residual(const std::vector<double>& s, const std::vector<double>& values,
                           double mu, double nu, const CriticalParams& params) {
    if (s.size() != values.size() || s.size() < 32)
        throw TooFewSamples("ode_residual: need at least 32 samples");
    CriticalCurve c;
    c.params = params;
    const double pi = std::numbers::pi;
    std::vector<double> xi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) xi[i] = c.turning_angle(s[i]) / pi - 1.0;

    const std::size_t degree = std::min<std::size_t>(64, s.size() / 8);
    ChebyshevSeries fit = ChebyshevSeries::fit(xi, values, degree).truncated(1e-10);
    ChebyshevSeries f1 = fit.derivative();
    ChebyshevSeries f2 = f1.derivative();
    ChebyshevSeries f3 = f2.derivative();
    ChebyshevSeries f4 = f3.derivative();

    double worst = 0.0;
    double scale = std::abs(nu);
    const std::size_t m = 1024;
    const double len = 2.0 * params.L;
    for (std::size_t i = 0; i < m; ++i) {
        const double sp = (0.02 + 0.96 * static_cast<double>(i) / static_cast<double>(m - 1)) * len;
        const double x = c.turning_angle(sp) / pi - 1.0;
        const double H = c.curvature(sp);
        const double H1 = c.dcurvature(sp);
        const double H2 = c.ddcurvature(sp);
        const double r = 2.0 / std::pow(H, 3);
        const double r1 = -6.0 * H1 / std::pow(H, 4);
        const double r2 = -6.0 * H2 / std::pow(H, 4) + 24.0 * H1 * H1 / std::pow(H, 5);
        const double q = 2.0 / H;
        const double q1 = -2.0 * H1 / (H * H);
        const double p = (2.0 - params.lambda) * H;
        // chain rule through xi(s); the four xi-derivatives are H, H', H'',
        // H''' over pi
        const double g1 = H / pi;
        const double g2 = H1 / pi;
        const double g3 = H2 / pi;
        const double g4 = c.dddcurvature(sp) / pi;
        const double F1 = f1(x), F2 = f2(x), F3 = f3(x), F4 = f4(x);
        const double u0 = fit(x);
        const double u1 = F1 * g1;
        const double u2 = F2 * g1 * g1 + F1 * g2;
        const double u3 = F3 * g1 * g1 * g1 + 3.0 * F2 * g1 * g2 + F1 * g3;
        const double u4 = F4 * g1 * g1 * g1 * g1 + 6.0 * F3 * g1 * g1 * g2 +
                          F2 * (3.0 * g2 * g2 + 4.0 * g1 * g3) + F1 * g4;
        const double res = r2 * u2 + 2.0 * r1 * u3 + r * u4 + mu * (q1 * u1 + q * u2) + p * u0 - nu;
        worst = std::max(worst, std::abs(res));
        scale = std::max(scale, std::abs(p * u0) + std::abs(nu));
    }
    return worst / (scale + std::numeric_limits<double>::epsilon());
}

// ---------------------------------------------------------------------------
// quadratic forms on analytic profiles

inline std::pair<double, double> quadratic_forms(const CriticalParams& params, const Profile& u,
                                                 const Profile& v, std::size_t n = 4096) {
    CriticalCurve c;
    c.params = params;
    const double len = 2.0 * params.L;
    std::vector<double> fa(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = len * static_cast<double>(i) / static_cast<double>(n - 1);
        const double H = c.curvature(s);
        fa[i] = 2.0 * u.d(s) * v.d(s) / H;
        fb[i] = 2.0 * u.dd(s) * v.dd(s) / (H * H * H) +
                (2.0 - params.lambda) * H * u(s) * v(s);
    }
    const double h = len / static_cast<double>(n - 1);
    return {simpson_uniform(fa, h), simpson_uniform(fb, h)};
}

// ---------------------------------------------------------------------------
// characteristic-root solver

struct RegimeTraceEntry {
    double mu = 0.0;
    Regime regime = Regime::Below;
    double det = 0.0;
};

// Smallest mu > mu0 where the clamped problem admits a nontrivial solution,
// located by a Delta-mu = 1e-3 grid scan of the Above-regime determinant and
// bisection. Also certifies that no root hides at or below mu0: the Below
// determinant is positive on the scan grid and the Critical one is negative.
inline double find_mu_w1(const CriticalParams& params,
                         std::vector<RegimeTraceEntry>* trace = nullptr) {
    const double mu0 = mu0_threshold(params);
    const double step = 1e-3;

    for (double mu = step; mu < mu0; mu += step) {
        const double d = characteristic_det(mu, params);
        if (!(d > 0.0))
            throw RootNotFound("find_mu_w1: sub-threshold determinant lost positivity at mu = " +
                               std::to_string(mu));
    }
    const double dcrit = characteristic_det(mu0, params);
    if (!(dcrit < 0.0))
        throw RootNotFound("find_mu_w1: critical determinant is not negative");

    if (trace) {
        for (double f : {0.25, 0.5, 0.75})
            trace->push_back({f * mu0, Regime::Below, characteristic_det(f * mu0, params)});
        trace->push_back({mu0, Regime::Critical, dcrit});
    }

    double lo = mu0 + step;
    double dlo = characteristic_det(lo, params);
    for (double mu = lo + step; mu <= 50.0; mu += step) {
        const double d = characteristic_det(mu, params);
        if ((dlo < 0.0) != (d < 0.0) || d == 0.0) {
            const double root =
                bisect([&](double m) { return characteristic_det(m, params); }, lo, mu, 1e-12, 200);
            if (trace) {
                trace->push_back({lo, Regime::Above, dlo});
                trace->push_back({root, Regime::Above, characteristic_det(root, params)});
            }
            return root;
        }
        lo = mu;
        dlo = d;
    }
    throw RootNotFound("find_mu_w1: no determinant sign change below mu = 50");
}

// ---------------------------------------------------------------------------
// discrete minimization with C^1 Hermite elements

namespace fem {

// Cubic Hermite shape values/derivatives at reference coordinate xi in [0,1];
// the slope shapes carry the element length so the DOFs are (value, slope).
inline void hermite_shapes(double xi, double h, std::array<double, 4>& N,
                           std::array<double, 4>& dN, std::array<double, 4>& ddN) {
    const double x2 = xi * xi;
    const double x3 = x2 * xi;
    N = {1.0 - 3.0 * x2 + 2.0 * x3, h * (xi - 2.0 * x2 + x3), 3.0 * x2 - 2.0 * x3,
         h * (x3 - x2)};
    dN = {(-6.0 * xi + 6.0 * x2) / h, 1.0 - 4.0 * xi + 3.0 * x2, (6.0 * xi - 6.0 * x2) / h,
          3.0 * x2 - 2.0 * xi};
    ddN = {(-6.0 + 12.0 * xi) / (h * h), (-4.0 + 6.0 * xi) / h, (6.0 - 12.0 * xi) / (h * h),
           (6.0 * xi - 2.0) / h};
}

struct Matrices {
    Eigen::SparseMatrix<double> A;     // a-form
    Eigen::SparseMatrix<double> B;     // b-form
    Eigen::SparseMatrix<double> G;     // W^{2,2} Gram
    Eigen::SparseMatrix<double> M;     // L^2 mass
    Eigen::VectorXd mean;              // integral of each shape function
    std::vector<double> nodes;         // element boundaries on [0, 2L]
};

// Assembles all forms over the full DOF set (value, slope) per node; boundary
// conditions are imposed later by selecting DOF subsets.
inline Matrices assemble(const CriticalParams& params, std::size_t n_elements) {
    CriticalCurve curve;
    curve.params = params;
    const double len = 2.0 * params.L;
    const double h = len / static_cast<double>(n_elements);
    const std::size_t n_dofs = 2 * (n_elements + 1);

    std::vector<Eigen::Triplet<double>> ta, tb, tg, tm;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_dofs));

    for (std::size_t e = 0; e < n_elements; ++e) {
        const double s0 = h * static_cast<double>(e);
        std::array<std::array<double, 4>, 4> Ae{}, Be{}, Ge{}, Me{};
        std::array<double, 4> me{};
        for (int gp = 0; gp < 5; ++gp) {
            const double xi = 0.5 * (GaussRule5::nodes[gp] + 1.0);
            const double w = 0.5 * h * GaussRule5::weights[gp];
            const double s = s0 + xi * h;
            std::array<double, 4> N, dN, ddN;
            hermite_shapes(xi, h, N, dN, ddN);
            const double H = curve.curvature(s);
            const double cq = 2.0 / H;
            const double cr = 2.0 / (H * H * H);
            const double cp = (2.0 - params.lambda) * H;
            for (int i = 0; i < 4; ++i) {
                me[i] += w * N[i];
                for (int k = 0; k < 4; ++k) {
                    Ae[i][k] += w * cq * dN[i] * dN[k];
                    Be[i][k] += w * (cr * ddN[i] * ddN[k] + cp * N[i] * N[k]);
                    Ge[i][k] += w * (N[i] * N[k] + dN[i] * dN[k] + ddN[i] * ddN[k]);
                    Me[i][k] += w * N[i] * N[k];
                }
            }
        }
        const std::array<Eigen::Index, 4> idx = {
            static_cast<Eigen::Index>(2 * e), static_cast<Eigen::Index>(2 * e + 1),
            static_cast<Eigen::Index>(2 * e + 2), static_cast<Eigen::Index>(2 * e + 3)};
        for (int i = 0; i < 4; ++i) {
            mean(idx[i]) += me[i];
            for (int k = 0; k < 4; ++k) {
                ta.emplace_back(idx[i], idx[k], Ae[i][k]);
                tb.emplace_back(idx[i], idx[k], Be[i][k]);
                tg.emplace_back(idx[i], idx[k], Ge[i][k]);
                tm.emplace_back(idx[i], idx[k], Me[i][k]);
            }
        }
    }

    Matrices m;
    const auto dim = static_cast<Eigen::Index>(n_dofs);
    m.A.resize(dim, dim);
    m.B.resize(dim, dim);
    m.G.resize(dim, dim);
    m.M.resize(dim, dim);
    m.A.setFromTriplets(ta.begin(), ta.end());
    m.B.setFromTriplets(tb.begin(), tb.end());
    m.G.setFromTriplets(tg.begin(), tg.end());
    m.M.setFromTriplets(tm.begin(), tm.end());
    m.mean = mean;
    m.nodes.resize(n_elements + 1);
    for (std::size_t i = 0; i <= n_elements; ++i)
        m.nodes[i] = h * static_cast<double>(i);
    return m;
}

inline Eigen::SparseMatrix<double> select(const Eigen::SparseMatrix<double>& full,
                                          const std::vector<Eigen::Index>& keep) {
    // Column-selection matrix: reduced = S^T full S.
    Eigen::SparseMatrix<double> S(full.rows(), static_cast<Eigen::Index>(keep.size()));
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t j = 0; j < keep.size(); ++j)
        t.emplace_back(keep[j], static_cast<Eigen::Index>(j), 1.0);
    S.setFromTriplets(t.begin(), t.end());
    return Eigen::SparseMatrix<double>(S.transpose() * full * S);
}

// Smallest eigenvalue of the SPD pencil S w = c D w by shift-inverted power
// iteration on (S - shift*D)^{-1} D (deterministic start vector, Rayleigh
// quotient convergence to relative 1e-12). A shift strictly below the target
// eigenvalue keeps the factored matrix definite and makes the iteration
// contract fast enough that the h^-4 conditioning of the fourth-order form
// never pollutes the estimate; pass 0 when no bound is known.
inline std::pair<double, Eigen::VectorXd> smallest_pencil_eigenvalue(
    const Eigen::SparseMatrix<double>& S, const Eigen::SparseMatrix<double>& D,
    double shift = 0.0) {
    Eigen::SparseMatrix<double> shifted = S;
    if (shift != 0.0) shifted -= Eigen::SparseMatrix<double>(shift * D);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
    if (solver.info() != Eigen::Success)
        throw SingularForm("smallest_pencil_eigenvalue: factorization failed");

    const Eigen::Index n = S.rows();
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i)
        w(i) = 1.0 + 1e-3 * std::sin(static_cast<double>(i));
    w.normalize();

    double value = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd next = solver.solve(D * w);
        if (solver.info() != Eigen::Success)
            throw SingularForm("smallest_pencil_eigenvalue: solve failed");
        next.normalize();
        const double num = next.dot(S * next);
        const double den = next.dot(D * next);
        if (!(den > 0.0)) throw SingularForm("smallest_pencil_eigenvalue: denominator lost positivity");
        const double estimate = num / den;
        const bool settled = it > 0 && std::abs(estimate - value) <= 1e-12 * std::abs(estimate);
        value = estimate;
        w = next;
        if (settled) break;
    }
    return {value, w};
}

}  // namespace fem

// Discrete minimizer of b/a over the clamped space, reported with enough data
// to evaluate the eigenfunction anywhere (Hermite interpolation). Residual
// checks should be fed `nodes`/`values` directly: nodal values carry the full
// accuracy of the solve, while evaluate() between nodes adds piecewise-cubic
// interpolation error that a high-order fit would chase.
struct RayleighSolution {
    double mu = 0.0;
    std::vector<double> nodes;
    std::vector<double> values;  // per node
    std::vector<double> slopes;  // per node

    double evaluate(double s) const {
        const std::size_t n_el = nodes.size() - 1;
        const double h = nodes[1] - nodes[0];
        std::size_t e = static_cast<std::size_t>(std::floor((s - nodes.front()) / h));
        e = std::min(e, n_el - 1);
        const double xi = (s - nodes[e]) / h;
        std::array<double, 4> N, dN, ddN;
        fem::hermite_shapes(xi, h, N, dN, ddN);
        return N[0] * values[e] + N[1] * slopes[e] + N[2] * values[e + 1] + N[3] * slopes[e + 1];
    }
};

inline RayleighSolution rayleigh_minimizer(const CriticalParams& params, std::size_t n_elements) {
    if (n_elements < 64) throw TooFewSamples("rayleigh_minimizer: need at least 64 elements");
    const fem::Matrices m = fem::assemble(params, n_elements);

    // Clamped subspace: drop value and slope at both endpoint nodes.
    std::vector<Eigen::Index> keep;
    const std::size_t n_dofs = 2 * (n_elements + 1);
    for (std::size_t i = 2; i + 2 < n_dofs; ++i)
        keep.push_back(static_cast<Eigen::Index>(i));

    const auto B = fem::select(m.B, keep);
    const auto A = fem::select(m.A, keep);
    // Fine grids get a shift from a coarse solve: the coarse value bounds the
    // fine one from above (nested spaces), so 0.995 of it sits safely below.
    double shift = 0.0;
    if (n_elements > 256) shift = 0.995 * rayleigh_minimizer(params, 256).mu;
    auto [mu, w] = fem::smallest_pencil_eigenvalue(B, A, shift);

    RayleighSolution sol;
    sol.mu = mu;
    sol.nodes = m.nodes;
    sol.values.assign(n_elements + 1, 0.0);
    sol.slopes.assign(n_elements + 1, 0.0);
    for (std::size_t j = 0; j < keep.size(); ++j) {
        const auto dof = static_cast<std::size_t>(keep[j]);
        if (dof % 2 == 0)
            sol.values[dof / 2] = w(static_cast<Eigen::Index>(j));
        else
            sol.slopes[dof / 2] = w(static_cast<Eigen::Index>(j));
    }
    return sol;
}

inline double rayleigh_min_discrete(const CriticalParams& params, std::size_t n_elements) {
    return rayleigh_minimizer(params, n_elements).mu;
}

// Coercivity margin of the stability form: the smallest c with
// b(u,u) - a(u,u) >= c ||u||^2_{W^{2,2}} on the clamped space. Positive
// exactly because the discrete mu_W1 exceeds 1.
inline double coercivity_constant(const CriticalParams& params, std::size_t n_elements = 512) {
    const fem::Matrices m = fem::assemble(params, n_elements);
    std::vector<Eigen::Index> keep;
    const std::size_t n_dofs = 2 * (n_elements + 1);
    for (std::size_t i = 2; i + 2 < n_dofs; ++i)
        keep.push_back(static_cast<Eigen::Index>(i));
    const auto B = fem::select(m.B, keep);
    const auto A = fem::select(m.A, keep);
    const auto G = fem::select(m.G, keep);
    Eigen::SparseMatrix<double> S = B - A;
    double shift = 0.0;
    if (n_elements > 256) shift = 0.9 * coercivity_constant(params, 256);
    return fem::smallest_pencil_eigenvalue(S, G, shift).first;
}

// ---------------------------------------------------------------------------
// one-sided problem (reporting only)

struct W2Statement {
    CoefficientTriple coefficients;
    std::vector<std::string> conditions;
    double mu_w2_rayleigh = 0.0;
    double mu_w1_rayleigh = 0.0;
    double minimizer_mean_over_norm = 0.0;  // |int u| / ||u||_{L^2}
};

// The one-sided problem relaxes the endpoint slopes (natural conditions
// u''(0) = u''(2L) = 0 appear instead) and constrains the mean of u; no root
// search is attempted for it, only the discrete Rayleigh value is reported.
inline W2Statement w2_bvp_statement(const CriticalParams& params, std::size_t n_elements = 512) {
    W2Statement st;
    st.coefficients = make_coefficients(params);
    st.conditions = {"u(0) = 0", "u(2L) = 0", "u''(0) = 0 (natural)", "u''(2L) = 0 (natural)",
                     "int_0^2L u ds = 0", "nu is a free Lagrange multiplier"};

    const fem::Matrices m = fem::assemble(params, n_elements);
    const std::size_t n_dofs = 2 * (n_elements + 1);

    // Value-clamped subspace: endpoint values dropped, endpoint slopes kept.
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 1; i < n_dofs; ++i)
        if (i != 0 && i != n_dofs - 2) keep.push_back(static_cast<Eigen::Index>(i));

    const auto B = fem::select(m.B, keep);
    const auto A = fem::select(m.A, keep);
    const auto M = fem::select(m.M, keep);
    Eigen::VectorXd mean(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) mean(static_cast<Eigen::Index>(j)) = m.mean(keep[j]);

    // Null-space reduction of the mean constraint: eliminate the largest
    // pivot DOF, T maps reduced coordinates to the constrained subspace.
    Eigen::Index pivot = 0;
    mean.cwiseAbs().maxCoeff(&pivot);
    const Eigen::Index dim = static_cast<Eigen::Index>(keep.size());
    std::vector<Eigen::Triplet<double>> tt;
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (i == pivot) continue;
        tt.emplace_back(i, col, 1.0);
        tt.emplace_back(pivot, col, -mean(i) / mean(pivot));
        ++col;
    }
    Eigen::SparseMatrix<double> T(dim, dim - 1);
    T.setFromTriplets(tt.begin(), tt.end());

    const Eigen::SparseMatrix<double> Br(T.transpose() * B * T);
    const Eigen::SparseMatrix<double> Ar(T.transpose() * A * T);
    auto [mu2, wr] = fem::smallest_pencil_eigenvalue(Br, Ar);
    st.mu_w2_rayleigh = mu2;
    st.mu_w1_rayleigh = rayleigh_min_discrete(params, n_elements);

    const Eigen::VectorXd w = T * wr;
    const double integral = std::abs(mean.dot(w));
    const double l2 = std::sqrt(w.dot(M * w));
    st.minimizer_mean_over_norm = integral / (l2 > 0.0 ? l2 : 1.0);
    return st;
}

// ---------------------------------------------------------------------------
// combined report

struct StabilityReport {
    double ratio = 0.0;  // x0 / (L + x0)
    double mu0 = 0.0;
    double mu_w1_det = 0.0;
    double mu_w1_rayleigh = 0.0;
    double coercivity = 0.0;
    std::vector<RegimeTraceEntry> regime_trace;
    bool pass = false;
};

inline StabilityReport stability_report(const CriticalParams& params,
                                        std::size_t n_rayleigh = 2048,
                                        std::size_t n_coercivity = 512) {
    StabilityReport rep;
    rep.ratio = params.x0 / (params.L + params.x0);
    rep.mu0 = mu0_threshold(params);
    rep.mu_w1_det = find_mu_w1(params, &rep.regime_trace);
    rep.mu_w1_rayleigh = rayleigh_min_discrete(params, n_rayleigh);
    rep.coercivity = coercivity_constant(params, n_coercivity);
    const double gap = std::abs(rep.mu_w1_det - rep.mu_w1_rayleigh) / rep.mu_w1_det;
    rep.pass = rep.mu_w1_det > 1.0 && rep.mu_w1_rayleigh > 1.0 && gap <= 0.01 &&
               rep.coercivity > 0.0;
    return rep;
}

}  // namespace icl
