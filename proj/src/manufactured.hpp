#pragma once

#include <array>

#include "fem.hpp"

namespace pnp {

// Smooth reference problem on [0,1]^3 with two species of charge +1/-1 and
// unit coefficients. The exact fields are
//     phi = sin(pi x) sin(pi y) sin(pi z)
//     p1  = sin(2 pi x) sin(2 pi y) sin(2 pi z)
//     p2  = sin(3 pi x) sin(3 pi y) sin(3 pi z)
// and the loads are derived against the implemented weak forms, so the
// discrete solutions converge to these fields for either choice of the
// coupling sign.
struct ManufacturedCase {
    PnpCoefficients coefficients;

    ScalarField exact_phi, exact_p1, exact_p2;
    VectorField grad_phi, grad_p1, grad_p2;
    ScalarField load_p1, load_p2, load_poisson;

    RhsBundle rhs() const;

    // field index: 0 = phi, 1 = p1, 2 = p2
    const ScalarField& exact(int field) const;
    const VectorField& grad(int field) const;
};

ManufacturedCase manufactured_case(double b2_sign = -1.0);

struct InterpolationErrors {
    std::array<double, 3> l2; // phi, p1, p2
    std::array<double, 3> h1;
};

// Errors of the nodal interpolants of the exact fields; a floor no FE solution
// can beat by more than a constant.
InterpolationErrors interpolation_baseline(int level);

} // namespace pnp
