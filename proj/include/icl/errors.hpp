#pragma once

#include <stdexcept>
#include <string>

namespace icl {

// Common base so callers can catch everything from this library at once.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Curve sampling problems
struct DegenerateSpacing : Error {
    using Error::Error;
};
struct TooFewSamples : Error {
    using Error::Error;
};

// Geometry violations
struct NonConvexCurve : Error {
    using Error::Error;
};
struct FormMismatch : Error {
    using Error::Error;
};
struct AdmissibilityLost : Error {
    using Error::Error;
};

// Parameter domain violations (L <= 3*x0, or equivalently A0 <= (3/2)*pi*x0^2)
struct ThresholdViolation : Error {
    using Error::Error;
};

// Root finding / iteration failures
struct NoBracket : Error {
    using Error::Error;
};
struct NewtonStall : Error {
    using Error::Error;
};
struct RootNotFound : Error {
    using Error::Error;
};
struct SingularForm : Error {
    using Error::Error;
};

// Graph-pair (symmetrization) failures
struct NotConvex : Error {
    using Error::Error;
};
struct MultipleApexes : Error {
    using Error::Error;
};
struct DegenerateCurvature : Error {
    using Error::Error;
};

}  // namespace icl
