#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "icl/errors.hpp"

namespace icl {

// Bisection on a sign-changing bracket. Iterates until the bracket width or
// the residual drops below tol; transcendental but monotone-friendly, so the
// ~50 halvings are never the bottleneck here.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, std::size_t max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw NoBracket("bisect: no sign change on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || (hi - lo) < tol) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Newton iteration with a numeric slope, safeguarded by a maintained bracket:
// any step that leaves the bracket (or lands on a bad slope) falls back to
// bisection. Caller supplies a bracket with a sign change.
template <class F>
double newton_safeguarded(F&& f, double lo, double hi, double tol, std::size_t max_iter,
                          const char* what) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw NoBracket(std::string(what) + ": no sign change on the initial bracket");
    double x = 0.5 * (lo + hi);
    double fx = f(x);
    for (std::size_t it = 0; it < max_iter; ++it) {
        if (std::abs(fx) < tol) return x;
        // keep the bracket current
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double h = 1e-7 * (std::abs(x) + std::abs(hi - lo) + 1e-30);
        const double slope = (f(x + h) - f(x - h)) / (2.0 * h);
        double next = x - fx / slope;
        if (!(slope != 0.0) || !(next > lo) || !(next < hi))
            next = 0.5 * (lo + hi);
        x = next;
        fx = f(x);
    }
    throw NewtonStall(std::string(what) + ": no convergence after " + std::to_string(max_iter) +
                      " iterations");
}

}  // namespace icl
