#pragma once

#include <stdexcept>
#include <string>

namespace itow {

/// Malformed problem description (degenerate shape, inadmissible field, ...).
struct InvalidSpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// (p,S) pair outside the operator domain: p below the gradient tolerance and
/// S not within tolerance of a multiple of the identity.
struct OutsideDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NonConvergedError : std::runtime_error {
    NonConvergedError(const std::string& what, double residual_, int sweeps_)
        : std::runtime_error(what), residual(residual_), sweeps(sweeps_) {}
    double residual;
    int sweeps;
};

/// Finite-difference stencil (or interpolation cell) would leave the domain.
struct NearBoundaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGradientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exit-forcing construction queried where |D(level + |x-anchor|^2)| < 1/2.
struct OutsideValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace itow
