#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace icl {

// Chebyshev series on [-1, 1], least-squares fitted to scattered samples.
// Used for spectral differentiation of discrete profiles: fit once, then
// differentiate the series analytically instead of stacking noisy finite
// differences four times.
class ChebyshevSeries {
public:
    ChebyshevSeries() = default;
    explicit ChebyshevSeries(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

    static ChebyshevSeries fit(std::span<const double> xi, std::span<const double> values,
                               std::size_t degree) {
        const std::size_t m = xi.size();
        Eigen::MatrixXd V(m, degree + 1);
        for (std::size_t j = 0; j < m; ++j) {
            double t0 = 1.0, t1 = xi[j];
            V(j, 0) = t0;
            if (degree >= 1) V(j, 1) = t1;
            for (std::size_t k = 2; k <= degree; ++k) {
                const double t2 = 2.0 * xi[j] * t1 - t0;
                V(j, k) = t2;
                t0 = t1;
                t1 = t2;
            }
        }
        Eigen::VectorXd rhs(m);
        for (std::size_t j = 0; j < m; ++j) rhs(j) = values[j];
        Eigen::VectorXd sol = V.householderQr().solve(rhs);
        return ChebyshevSeries(std::vector<double>(sol.data(), sol.data() + sol.size()));
    }

    // Drop trailing coefficients below floor_rel * max|c|: the tail of a fit
    // to noisy data carries only noise, and differentiation amplifies it.
    ChebyshevSeries truncated(double floor_rel) const {
        double peak = 0.0;
        for (double v : c_) peak = std::max(peak, std::abs(v));
        std::size_t keep = c_.size();
        while (keep > 1 && std::abs(c_[keep - 1]) < floor_rel * peak) --keep;
        return ChebyshevSeries(std::vector<double>(c_.begin(), c_.begin() + keep));
    }

    ChebyshevSeries derivative() const {
        const std::size_t n = c_.size();
        if (n <= 1) return ChebyshevSeries(std::vector<double>{0.0});
        std::vector<double> b(n, 0.0);  // b[n-1] stays 0
        double next1 = 0.0, next2 = 0.0;
        for (std::size_t k = n - 1; k >= 1; --k) {
            const double bk = next2 + 2.0 * static_cast<double>(k) * c_[k];
            b[k - 1] = bk;
            next2 = next1;
            next1 = bk;
            if (k == 1) break;
        }
        b[0] *= 0.5;
        b.resize(n - 1);
        return ChebyshevSeries(std::move(b));
    }

    double operator()(double x) const {
        // Clenshaw recurrence
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = c_.size(); k-- > 1;) {
            const double b0 = 2.0 * x * b1 - b2 + c_[k];
            b2 = b1;
            b1 = b0;
        }
        return x * b1 - b2 + c_[0];
    }

    std::size_t size() const { return c_.size(); }
    const std::vector<double>& coeffs() const { return c_; }

private:
    std::vector<double> c_;
};

}  // namespace icl
