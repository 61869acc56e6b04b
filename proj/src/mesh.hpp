#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pnp {

using Vec3 = std::array<double, 3>;

// Region markers: 1 = solute (Omega_m), 2 = solvent (Omega_s).
inline constexpr int kRegionSolute = 1;
inline constexpr int kRegionSolvent = 2;

struct PointLocation {
    int tet = -1;
    std::array<double, 4> barycentric{};
};

// Structured tetrahedral mesh of the unit box [0,1]^3 at a dyadic resolution.
//
// Each of the (2^level)^3 grid cells is split into the six path tetrahedra
// around its main diagonal, with the same diagonal orientation in every cell,
// so meshes at consecutive levels are nested: a coarse P1 function restricted
// to any finer-level element is still linear.
//
// Immutable after construction; concurrent reads are safe.
class Mesh {
public:
    static constexpr int kMaxLevel = 7; // memory guard

    // Uniform-solvent box mesh. Throws CapacityError above kMaxLevel.
    static Mesh unit_box(int level);
    // Box mesh with region markers assigned from tet barycenters.
    static Mesh unit_box(int level, const std::function<int(const Vec3&)>& region_of);

    int level() const { return level_; }
    double h() const { return h_; }
    int cells_per_axis() const { return cells_; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int tet_count() const { return static_cast<int>(tets_.size()); }

    std::span<const Vec3> vertices() const { return vertices_; }
    std::span<const std::array<int, 4>> tets() const { return tets_; }
    const Vec3& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const std::array<int, 4>& tet(int t) const { return tets_[static_cast<std::size_t>(t)]; }

    bool is_boundary_vertex(int v) const { return boundary_[static_cast<std::size_t>(v)] != 0; }
    // Flagged vertices, ascending.
    std::vector<int> boundary_vertices() const;

    int region_marker(int t) const { return region_[static_cast<std::size_t>(t)]; }

    // All tets of the structured mesh share the volume h^3/6.
    double tet_volume(int /*t*/) const { return volume_; }
    // P1 basis gradients of tet t (constant per tet); row a is grad(lambda_a).
    const std::array<Vec3, 4>& gradients(int t) const { return gradients_[static_cast<std::size_t>(t % 6)]; }

    // Containing tet and barycentric coordinates of x. Structured lookup:
    // identify the grid cell by index arithmetic, then test its six tets.
    // Throws std::domain_error for points outside [0,1]^3 (tolerance 1e-12).
    PointLocation locate(const Vec3& x) const;

    // Value of the P1 function with the given nodal coefficients at a located point.
    double eval(std::span<const double> coeffs, const PointLocation& loc) const;

private:
    Mesh() = default;

    int level_ = 0;
    int cells_ = 1;
    double h_ = 1.0;
    double volume_ = 1.0 / 6.0;
    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 4>> tets_;
    std::vector<std::uint8_t> boundary_;
    std::vector<std::uint8_t> region_;
    std::array<std::array<Vec3, 4>, 6> gradients_{};
};

} // namespace pnp
