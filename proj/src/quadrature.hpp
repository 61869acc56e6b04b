#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace pnp {

// Quadrature rule on the reference tetrahedron in barycentric form.
// Weights sum to 1; scale by the element volume at the call site.
struct QuadratureRule {
    std::span<const std::array<double, 4>> points;
    std::span<const double> weights;
    int degree; // highest total polynomial degree integrated exactly

    std::size_t size() const { return weights.size(); }
};

// 4-point rule, exact through degree 2.
const QuadratureRule& quadrature_degree2();

// 14-point Keast rule, exact through degree 5. Used for trigonometric
// loads and error norms.
const QuadratureRule& quadrature_degree5();

} // namespace pnp
