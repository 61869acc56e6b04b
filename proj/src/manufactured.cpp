#include "manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mesh.hpp"

namespace pnp {

namespace {

constexpr double kPi = std::numbers::pi;

double trig(int k, const Vec3& x) {
    return std::sin(k * kPi * x[0]) * std::sin(k * kPi * x[1]) * std::sin(k * kPi * x[2]);
}

Vec3 trig_grad(int k, const Vec3& x) {
    const double w = k * kPi;
    const double sx = std::sin(w * x[0]), sy = std::sin(w * x[1]), sz = std::sin(w * x[2]);
    const double cx = std::cos(w * x[0]), cy = std::cos(w * x[1]), cz = std::cos(w * x[2]);
    return {w * cx * sy * sz, w * sx * cy * sz, w * sx * sy * cz};
}

// laplacian of trig(k, .) is -3 (k pi)^2 trig(k, .)
double trig_laplacian(int k, const Vec3& x) {
    const double w = k * kPi;
    return -3.0 * w * w * trig(k, x);
}

} // namespace

RhsBundle ManufacturedCase::rhs() const {
    RhsBundle r;
    r.species_loads = {load_p1, load_p2};
    r.poisson_load = load_poisson;
    r.use_point_charges = false;
    return r;
}

const ScalarField& ManufacturedCase::exact(int field) const {
    switch (field) {
        case 0: return exact_phi;
        case 1: return exact_p1;
        case 2: return exact_p2;
        default: throw std::invalid_argument("field index out of range");
    }
}

const VectorField& ManufacturedCase::grad(int field) const {
    switch (field) {
        case 0: return grad_phi;
        case 1: return grad_p1;
        case 2: return grad_p2;
        default: throw std::invalid_argument("field index out of range");
    }
}

ManufacturedCase manufactured_case(double b2_sign) {
    ManufacturedCase c;
    c.coefficients.n_species = 2;
    c.coefficients.diffusion = {RegionValue(1.0), RegionValue(1.0)};
    c.coefficients.charge = {1.0, -1.0};
    c.coefficients.beta = 1.0;
    c.coefficients.eps = RegionValue(1.0);
    c.coefficients.bulk = {0.0, 0.0};
    c.coefficients.b2_sign = b2_sign;
    c.coefficients.validate();

    c.exact_phi = [](const Vec3& x) { return trig(1, x); };
    c.exact_p1 = [](const Vec3& x) { return trig(2, x); };
    c.exact_p2 = [](const Vec3& x) { return trig(3, x); };
    c.grad_phi = [](const Vec3& x) { return trig_grad(1, x); };
    c.grad_p1 = [](const Vec3& x) { return trig_grad(2, x); };
    c.grad_p2 = [](const Vec3& x) { return trig_grad(3, x); };

    // Species equation -div(D grad p + D beta q p grad phi) = f_i expanded
    // with unit coefficients: f_i = -lap p - q (grad p . grad phi + p lap phi).
    auto species_load = [](int k, double q) {
        return [k, q](const Vec3& x) {
            const Vec3 gp = trig_grad(k, x);
            const Vec3 gphi = trig_grad(1, x);
            const double adv = gp[0] * gphi[0] + gp[1] * gphi[1] + gp[2] * gphi[2];
            return -trig_laplacian(k, x) - q * (adv + trig(k, x) * trig_laplacian(1, x));
        };
    };
    c.load_p1 = species_load(2, c.coefficients.charge[0]);
    c.load_p2 = species_load(3, c.coefficients.charge[1]);

    // Poisson equation -lap phi + s sum_i q^i p^i = f_3 with the configured
    // coupling sign s.
    const double q1 = c.coefficients.charge[0];
    const double q2 = c.coefficients.charge[1];
    c.load_poisson = [b2_sign, q1, q2](const Vec3& x) {
        return -trig_laplacian(1, x) + b2_sign * (q1 * trig(2, x) + q2 * trig(3, x));
    };
    return c;
}

InterpolationErrors interpolation_baseline(int level) {
    const ManufacturedCase c = manufactured_case();
    const Mesh mesh = Mesh::unit_box(level);
    InterpolationErrors e{};
    for (int field = 0; field < 3; ++field) {
        const FeFunction u = interpolate(mesh, c.exact(field));
        e.l2[static_cast<std::size_t>(field)] = error_l2(u, c.exact(field));
        e.h1[static_cast<std::size_t>(field)] = error_h1(u, c.exact(field), c.grad(field));
    }
    return e;
}

} // namespace pnp
