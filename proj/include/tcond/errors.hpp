#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcond {

// Base class for all numerical-domain failures raised by this library.
// Configuration mistakes (bad flags, malformed input) use std::invalid_argument
// instead, so callers can map the two families to distinct exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroLeadingCoefficient : Error {
    using Error::Error;
};

struct NonConvergence : Error {
    NonConvergence(const std::string& what, std::size_t iterations, double residual)
        : Error(what), iterations(iterations), residual(residual) {}
    std::size_t iterations = 0;
    double residual = 0.0;
};

struct ZeroOnUnitCircle : Error {
    using Error::Error;
};

struct NearUnitCircleZero : Error {
    using Error::Error;
};

struct RootAtOrigin : Error {
    using Error::Error;
};

struct RootOnContour : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ZeroWindingNumber : Error {
    using Error::Error;
};

struct AngleTooClose : Error {
    using Error::Error;
};

}  // namespace tcond
