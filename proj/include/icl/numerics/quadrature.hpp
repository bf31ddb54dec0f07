#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "icl/errors.hpp"

namespace icl {

// Composite Simpson on a uniform grid. An odd interval count is closed out
// with one Newton 3/8 panel so the rule stays 4th order for any n >= 4
// samples; 2 or 3 samples fall back to the single exact low-order panel.
inline double simpson_uniform(std::span<const double> y, double h) {
    const std::size_t n = y.size();
    if (n < 2) throw TooFewSamples("simpson_uniform: need at least 2 samples");
    if (n == 2) return 0.5 * h * (y[0] + y[1]);
    if (n == 3) return h / 3.0 * (y[0] + 4.0 * y[1] + y[2]);

    const std::size_t intervals = n - 1;
    std::size_t m = intervals;  // intervals covered by Simpson pairs
    double tail = 0.0;
    if (intervals % 2 != 0) {
        m = intervals - 3;  // leave the final three intervals for the 3/8 rule
        tail = 3.0 * h / 8.0 * (y[n - 4] + 3.0 * y[n - 3] + 3.0 * y[n - 2] + y[n - 1]);
    }
    double acc = 0.0;
    if (m > 0) {
        acc = y[0] + y[m];
        for (std::size_t i = 1; i < m; i += 2) acc += 4.0 * y[i];
        for (std::size_t i = 2; i < m; i += 2) acc += 2.0 * y[i];
        acc *= h / 3.0;
    }
    return acc + tail;
}

// Integrate a callable sampled at n uniform points on [a, b].
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
    if (n < 2) throw TooFewSamples("simpson: need at least 2 samples");
    const double h = (b - a) / static_cast<double>(n - 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = f(a + h * static_cast<double>(i));
    return simpson_uniform(y, h);
}

// 5-point Gauss-Legendre on [-1, 1]; exact through degree 9. Used for the
// Hermite element assembly where the integrands are (cubic)^2 times a smooth
// coefficient.
struct GaussRule5 {
    static constexpr std::array<double, 5> nodes = {
        -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> weights = {
        0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
        0.2369268850561891};
};

}  // namespace icl
