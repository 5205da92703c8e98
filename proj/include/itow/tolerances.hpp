#pragma once

#include "itow/vec.hpp"

namespace itow {

/// Membership tolerances for the operator domain D = D0 ∪ D1.
///
/// D1 asks |p| > tol_grad; D0 asks S to be a multiple of the identity up to
/// tol_iso(S). Shared by the Isaacs operators and the residual checker so the
/// branch decision is taken identically everywhere.
struct DTolerances {
    double tol_grad = 1e-8;
    double tol_iso_base = 1e-8;

    double tol_iso(const SymMat& s) const { return tol_iso_base * (1.0 + s.frobenius()); }
};

inline const DTolerances& default_d_tolerances() {
    static const DTolerances t{};
    return t;
}

}  // namespace itow
