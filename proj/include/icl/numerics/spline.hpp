#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "icl/errors.hpp"

namespace icl {

// Cubic interpolating spline with not-a-knot end conditions (third derivative
// continuous across the first and last interior knots). Reproduces cubics
// exactly, which keeps resampling 4th-order accurate up to the endpoints;
// natural end conditions would degrade to O(h^2) there.
class CubicSpline {
public:
    CubicSpline(std::span<const double> x, std::span<const double> y) {
        const std::size_t n = x.size();
        if (n != y.size() || n < 4)
            throw TooFewSamples("CubicSpline: need at least 4 samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x[i + 1] > x[i]))
                throw DegenerateSpacing("CubicSpline: abscissae must be strictly increasing");
        x_.assign(x.begin(), x.end());
        y_.assign(y.begin(), y.end());
        solve_second_derivatives();
    }

    double operator()(double t) const { return eval<0>(t); }
    double deriv(double t) const { return eval<1>(t); }
    double deriv2(double t) const { return eval<2>(t); }

    // Definite integral over the full knot range.
    double integral() const {
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double h = x_[i + 1] - x_[i];
            acc += 0.5 * h * (y_[i] + y_[i + 1]) - h * h * h / 24.0 * (m_[i] + m_[i + 1]);
        }
        return acc;
    }

    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;  // m_ holds the knot second derivatives

    void solve_second_derivatives() {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            h[i] = x_[i + 1] - x_[i];

        // Interior continuity rows for the knot second derivatives.
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        }

        // Not-a-knot makes the end second derivatives affine in their two
        // neighbours:
        //   m0      = ((h0 + h1) m1 - h0 m2) / h1
        //   m_{n-1} = ((h_{n-2} + h_{n-3}) m_{n-2} - h_{n-2} m_{n-3}) / h_{n-3}
        // Substituting these into the first and last interior rows keeps the
        // reduced system tridiagonal with strictly dominant pivots on any
        // grid. (Eliminating the third unknown from the end rows directly
        // instead yields a zero pivot on exactly uniform grids.)
        b[1] += h[0] * (h[0] + h[1]) / h[1];
        c[1] -= h[0] * h[0] / h[1];
        a[1] = 0.0;
        b[n - 2] += h[n - 2] * (h[n - 2] + h[n - 3]) / h[n - 3];
        a[n - 2] -= h[n - 2] * h[n - 2] / h[n - 3];
        c[n - 2] = 0.0;

        // Thomas sweep over the interior unknowns m1 .. m_{n-2}.
        m_.assign(n, 0.0);
        std::vector<double> cp(n, 0.0), dp(n, 0.0);
        cp[1] = c[1] / b[1];
        dp[1] = d[1] / b[1];
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double den = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / den;
            dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
        }
        m_[n - 2] = dp[n - 2];
        for (std::size_t i = n - 2; i-- > 1;)
            m_[i] = dp[i] - cp[i] * m_[i + 1];
        m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
        m_[n - 1] = ((h[n - 2] + h[n - 3]) * m_[n - 2] - h[n - 2] * m_[n - 3]) / h[n - 3];
    }

    std::size_t segment(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
        if (i == 0) return 0;
        if (i >= x_.size()) return x_.size() - 2;
        return i - 1;
    }

    template <int Order>
    double eval(double t) const {
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double u = x_[i + 1] - t;  // distance to the right knot
        const double v = t - x_[i];      // distance to the left knot
        if constexpr (Order == 0) {
            return m_[i] * u * u * u / (6.0 * h) + m_[i + 1] * v * v * v / (6.0 * h) +
                   (y_[i] / h - m_[i] * h / 6.0) * u + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * v;
        } else if constexpr (Order == 1) {
            return -m_[i] * u * u / (2.0 * h) + m_[i + 1] * v * v / (2.0 * h) -
                   (y_[i] / h - m_[i] * h / 6.0) + (y_[i + 1] / h - m_[i + 1] * h / 6.0);
        } else {
            return m_[i] * u / h + m_[i + 1] * v / h;
        }
    }
};

// Integral of tabulated values: Simpson-grade via an interpolating spline, so
// non-uniform grids (Chebyshev-clustered y-grids) get the same treatment.
inline double integrate_samples(std::span<const double> x, std::span<const double> y) {
    return CubicSpline(x, y).integral();
}

}  // namespace icl
