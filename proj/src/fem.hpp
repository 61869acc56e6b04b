#pragma once

#include <functional>
#include <span>
#include <vector>

#include "csr.hpp"
#include "mesh.hpp"

namespace pnp {

using ScalarField = std::function<double(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

// Piecewise-constant value over the two regions.
struct RegionValue {
    double solute = 1.0;
    double solvent = 1.0;

    RegionValue() = default;
    RegionValue(double uniform) : solute(uniform), solvent(uniform) {} // NOLINT: implicit by design
    RegionValue(double m, double s) : solute(m), solvent(s) {}

    double at(int marker) const { return marker == kRegionSolute ? solute : solvent; }
};

// lambda of the model: 0 in the solute region, 1 in the solvent.
inline constexpr double kLambdaSolute = 0.0;
inline constexpr double kLambdaSolvent = 1.0;
inline RegionValue lambda_weight() { return {kLambdaSolute, kLambdaSolvent}; }

// Nodal P1 function bound to a mesh.
struct FeFunction {
    const Mesh* mesh = nullptr;
    std::vector<double> coeffs;

    FeFunction() = default;
    explicit FeFunction(const Mesh& m) : mesh(&m), coeffs(static_cast<std::size_t>(m.vertex_count()), 0.0) {}
    FeFunction(const Mesh& m, std::vector<double> c);

    double operator()(const Vec3& x) const { return mesh->eval(coeffs, mesh->locate(x)); }
    double eval(const PointLocation& loc) const { return mesh->eval(coeffs, loc); }
};

// Nodal interpolant of a scalar field.
FeFunction interpolate(const Mesh& mesh, const ScalarField& f);

struct PointCharge {
    double magnitude = 0.0;
    Vec3 location{};
};

// Physical data of the coupled model.
struct PnpCoefficients {
    int n_species = 2;
    std::vector<RegionValue> diffusion; // D^i, per species
    std::vector<double> charge;         // q^i
    double beta = 1.0;                  // inverse thermal energy
    RegionValue eps{1.0, 1.0};          // dielectric (eps_m, eps_s)
    std::vector<double> bulk;           // boundary concentration per species
    std::vector<PointCharge> fixed_charges;
    // Sign s of the coupling form b2(p,w) = s * sum_i q^i (lambda p^i, w).
    double b2_sign = -1.0;

    void validate() const; // throws std::invalid_argument on bad data
};

// Right-hand side of the coupled system: either manufactured volumetric loads
// for every equation, or the point-charge functional for the Poisson equation
// (species loads default to zero).
struct RhsBundle {
    std::vector<ScalarField> species_loads; // f_i, size n_species (may be empty)
    ScalarField poisson_load;               // f_3 (null when point charges are used)
    bool use_point_charges = false;
};

// --- assembly -------------------------------------------------------------

// (coeff grad u, grad v); symmetric, no boundary conditions applied.
CsrMatrix assemble_stiffness(const Mesh& mesh, RegionValue coeff);

// Weighted P1 mass matrix, exact entries (vol/20 * (1 + delta_kl) per tet).
CsrMatrix assemble_mass(const Mesh& mesh, RegionValue weight);

// Drift form (scale * p grad(phi_h), grad v): entry (k,l) integrates
// scale * lambda_l * grad(phi_h) . grad(lambda_k), exact for the piecewise
// constant grad(phi_h) via the degree-2 rule.
CsrMatrix assemble_drift(const Mesh& mesh, const FeFunction& phi, double scale);
CsrMatrix assemble_drift(const Mesh& mesh, const FeFunction& phi, RegionValue scale);

// Load vector (f, v) by degree-5 quadrature.
std::vector<double> assemble_load(const Mesh& mesh, const ScalarField& f);

// Point-source functional sum_j q_j w(x_j): entry k = sum_j q_j lambda_k(x_j).
std::vector<double> assemble_point_sources(const Mesh& mesh, std::span<const PointCharge> charges);

// Symmetric Dirichlet elimination in place: moves column contributions to the
// rhs, zeroes boundary rows and columns, sets unit diagonal and b[k] = g_k.
// `values` is aligned with `boundary`.
void apply_dirichlet(CsrMatrix& A, std::span<double> b, std::span<const int> boundary,
                     std::span<const double> values);
void apply_dirichlet(CsrMatrix& A, std::span<double> b, std::span<const int> boundary,
                     double value = 0.0);

// --- grid transfer ---------------------------------------------------------

// Evaluates a coarse-mesh function at every fine-mesh vertex. Exact for the
// nested structured meshes. Throws std::invalid_argument when the source mesh
// is finer than the target.
FeFunction transfer(const FeFunction& coarse, const Mesh& fine_mesh);

// --- norms ------------------------------------------------------------------

// Quadrature approximations of || u_h - exact ||.
double error_l2(const FeFunction& u, const ScalarField& exact);
// Full H1 norm: sqrt(L2^2 + seminorm^2).
double error_h1(const FeFunction& u, const ScalarField& exact, const VectorField& exact_grad);

// Discrete norms of a coefficient vector on a mesh, optionally region-weighted
// (weight {0,1} restricts to the solvent region).
double fe_l2_norm(const Mesh& mesh, std::span<const double> coeffs, RegionValue weight = {1.0, 1.0});
double h1_semi_norm(const Mesh& mesh, std::span<const double> coeffs, RegionValue weight = {1.0, 1.0});
double fe_h1_norm(const Mesh& mesh, std::span<const double> coeffs, RegionValue weight = {1.0, 1.0});

std::vector<double> subtract(std::span<const double> a, std::span<const double> b);

} // namespace pnp
