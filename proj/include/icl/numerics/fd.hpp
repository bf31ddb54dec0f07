#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace icl {

// Fornberg's recurrence: weights of the m-th derivative at z from the given
// nodes. Returns one weight per node; exact for polynomials up to degree
// nodes.size()-1, so 3 nodes give 2nd-order first/second derivatives.
inline std::vector<double> fd_weights(double z, std::span<const double> nodes, int m) {
    const int n = static_cast<int>(nodes.size()) - 1;
    std::vector<double> d(static_cast<std::size_t>(n + 1) * (m + 1), 0.0);
    auto at = [&](int i, int k) -> double& { return d[static_cast<std::size_t>(i) * (m + 1) + k]; };

    double c1 = 1.0;
    double c4 = nodes[0] - z;
    at(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = i < m ? i : m;
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }

    std::vector<double> w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        w[i] = d[i * (m + 1) + m];
    return w;
}

// Derivative of sampled data at sample i, 2nd-order accurate: centered 3-point
// stencils in the interior, one-sided at the ends (4 points for the second
// derivative, which needs the extra node to stay 2nd order one-sided).
inline double sample_deriv1(std::span<const double> x, std::span<const double> y, std::size_t i) {
    const std::size_t n = x.size();
    std::size_t lo = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
    auto w = fd_weights(x[i], x.subspan(lo, 3), 1);
    return w[0] * y[lo] + w[1] * y[lo + 1] + w[2] * y[lo + 2];
}

inline double sample_deriv2(std::span<const double> x, std::span<const double> y, std::size_t i) {
    const std::size_t n = x.size();
    std::size_t lo;
    std::size_t len;
    if (i == 0) {
        lo = 0;
        len = 4;
    } else if (i == n - 1) {
        lo = n - 4;
        len = 4;
    } else {
        lo = i - 1;
        len = 3;
    }
    auto w = fd_weights(x[i], x.subspan(lo, len), 2);
    double acc = 0.0;
    for (std::size_t k = 0; k < len; ++k)
        acc += w[k] * y[lo + k];
    return acc;
}

// One-sided 4-point first derivative (3rd-order); used for the boundary terms
// of the variation formulas where 2nd-order bias is too coarse.
inline double endpoint_deriv1_4pt(std::span<const double> x, std::span<const double> y, bool at_end) {
    const std::size_t n = x.size();
    const std::size_t lo = at_end ? n - 4 : 0;
    const double z = at_end ? x[n - 1] : x[0];
    auto w = fd_weights(z, x.subspan(lo, 4), 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        acc += w[k] * y[lo + k];
    return acc;
}

// Finite differences in a scalar family parameter (for variation checks).
template <class F>
double central_diff1(F&& f, double t, double h) {
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

template <class F>
double central_diff2(F&& f, double t, double h) {
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

// One Richardson step: cancels the leading O(h^2) error of the centered stencils.
template <class F>
double richardson_diff1(F&& f, double t, double h) {
    return (4.0 * central_diff1(f, t, h / 2) - central_diff1(f, t, h)) / 3.0;
}

template <class F>
double richardson_diff2(F&& f, double t, double h) {
    return (4.0 * central_diff2(f, t, h / 2) - central_diff2(f, t, h)) / 3.0;
}

}  // namespace icl
