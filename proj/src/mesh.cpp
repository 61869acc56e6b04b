#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace pnp {

namespace {

// The six coordinate permutations, lexicographic, with parity. Each one names
// the order in which unit steps are taken along the cell's main diagonal.
struct Perm {
    std::array<int, 3> axes;
    int sign;
};
constexpr std::array<Perm, 6> kPerms = {{
    {{0, 1, 2}, +1},
    {{0, 2, 1}, -1},
    {{1, 0, 2}, -1},
    {{1, 2, 0}, +1},
    {{2, 0, 1}, +1},
    {{2, 1, 0}, -1},
}};

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1])
         - a[1] * (b[0] * c[2] - b[2] * c[0])
         + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

} // namespace

Mesh Mesh::unit_box(int level) {
    return unit_box(level, [](const Vec3&) { return kRegionSolvent; });
}

Mesh Mesh::unit_box(int level, const std::function<int(const Vec3&)>& region_of) {
    if (level < 0) throw std::invalid_argument("mesh level must be nonnegative");
    if (level > kMaxLevel)
        throw CapacityError("mesh level " + std::to_string(level) + " exceeds guard " +
                            std::to_string(kMaxLevel));

    Mesh m;
    m.level_ = level;
    m.cells_ = 1 << level;
    m.h_ = 1.0 / m.cells_;
    m.volume_ = m.h_ * m.h_ * m.h_ / 6.0;

    const int n = m.cells_;
    const int nv = n + 1;
    m.vertices_.resize(static_cast<std::size_t>(nv) * nv * nv);
    m.boundary_.resize(m.vertices_.size());
    for (int k = 0; k < nv; ++k)
        for (int j = 0; j < nv; ++j)
            for (int i = 0; i < nv; ++i) {
                const std::size_t v = static_cast<std::size_t>(i) + static_cast<std::size_t>(nv) * (j + static_cast<std::size_t>(nv) * k);
                // dyadic coordinates, exactly representable
                m.vertices_[v] = {i * m.h_, j * m.h_, k * m.h_};
                const Vec3& x = m.vertices_[v];
                m.boundary_[v] = (x[0] == 0.0 || x[0] == 1.0 ||
                                  x[1] == 0.0 || x[1] == 1.0 ||
                                  x[2] == 0.0 || x[2] == 1.0)
                                     ? 1
                                     : 0;
            }

    auto vid = [nv](int i, int j, int k) { return i + nv * (j + nv * k); };

    m.tets_.reserve(static_cast<std::size_t>(6) * n * n * n);
    m.region_.reserve(m.tets_.capacity());
    for (int ck = 0; ck < n; ++ck)
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci)
                for (const Perm& p : kPerms) {
                    std::array<int, 3> c0 = {ci, cj, ck};
                    std::array<int, 3> c1 = c0;
                    c1[p.axes[0]] += 1;
                    std::array<int, 3> c2 = c1;
                    c2[p.axes[1]] += 1;
                    std::array<int, 4> t = {vid(c0[0], c0[1], c0[2]), vid(c1[0], c1[1], c1[2]),
                                            vid(c2[0], c2[1], c2[2]), vid(ci + 1, cj + 1, ck + 1)};
                    if (p.sign < 0) std::swap(t[1], t[2]); // keep signed volume positive
                    m.tets_.push_back(t);
                    Vec3 bc = {0, 0, 0};
                    for (int a = 0; a < 4; ++a)
                        for (int d = 0; d < 3; ++d) bc[d] += 0.25 * m.vertices_[static_cast<std::size_t>(t[a])][d];
                    m.region_.push_back(static_cast<std::uint8_t>(region_of(bc)));
                }

    // Barycentric gradients of the first cell's six tets; every other cell is
    // a translate, so these are shared mesh-wide.
    for (int lt = 0; lt < 6; ++lt) {
        const auto& t = m.tets_[static_cast<std::size_t>(lt)];
        const Vec3& x0 = m.vertices_[static_cast<std::size_t>(t[0])];
        Vec3 e1, e2, e3;
        for (int d = 0; d < 3; ++d) {
            e1[d] = m.vertices_[static_cast<std::size_t>(t[1])][d] - x0[d];
            e2[d] = m.vertices_[static_cast<std::size_t>(t[2])][d] - x0[d];
            e3[d] = m.vertices_[static_cast<std::size_t>(t[3])][d] - x0[d];
        }
        const double det = det3(e1, e2, e3);
        // rows of the inverse Jacobian (cofactor transpose / det)
        const Vec3 r1 = {(e2[1] * e3[2] - e2[2] * e3[1]) / det, (e2[2] * e3[0] - e2[0] * e3[2]) / det,
                         (e2[0] * e3[1] - e2[1] * e3[0]) / det};
        const Vec3 r2 = {(e3[1] * e1[2] - e3[2] * e1[1]) / det, (e3[2] * e1[0] - e3[0] * e1[2]) / det,
                         (e3[0] * e1[1] - e3[1] * e1[0]) / det};
        const Vec3 r3 = {(e1[1] * e2[2] - e1[2] * e2[1]) / det, (e1[2] * e2[0] - e1[0] * e2[2]) / det,
                         (e1[0] * e2[1] - e1[1] * e2[0]) / det};
        auto& g = m.gradients_[static_cast<std::size_t>(lt)];
        g[1] = r1;
        g[2] = r2;
        g[3] = r3;
        for (int d = 0; d < 3; ++d) g[0][d] = -(r1[d] + r2[d] + r3[d]);
    }
    return m;
}

std::vector<int> Mesh::boundary_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count(); ++v)
        if (boundary_[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
}

PointLocation Mesh::locate(const Vec3& x) const {
    constexpr double tol = 1e-12;
    for (int d = 0; d < 3; ++d)
        if (x[d] < -tol || x[d] > 1.0 + tol)
            throw std::domain_error("point outside [0,1]^3");

    std::array<int, 3> cell;
    for (int d = 0; d < 3; ++d) {
        int c = static_cast<int>(std::floor(x[d] * cells_));
        cell[d] = std::clamp(c, 0, cells_ - 1);
    }
    const int cell_index = cell[0] + cells_ * (cell[1] + cells_ * cell[2]);

    PointLocation best;
    double best_min = -1e30;
    for (int lt = 0; lt < 6; ++lt) {
        const int t = 6 * cell_index + lt;
        const auto& conn = tets_[static_cast<std::size_t>(t)];
        const Vec3& x0 = vertices_[static_cast<std::size_t>(conn[0])];
        const auto& g = gradients_[static_cast<std::size_t>(lt)];
        std::array<double, 4> lam;
        for (int a = 0; a < 4; ++a) {
            lam[a] = (a == 0 ? 1.0 : 0.0);
            for (int d = 0; d < 3; ++d) lam[a] += g[a][d] * (x[d] - x0[d]);
        }
        const double lam_min = std::min(std::min(lam[0], lam[1]), std::min(lam[2], lam[3]));
        if (lam_min >= -tol) return {t, lam};
        if (lam_min > best_min) {
            best_min = lam_min;
            best = {t, lam};
        }
    }
    // Floating-point dust on a cell face: the closest candidate is correct up
    // to roundoff.
    return best;
}

double Mesh::eval(std::span<const double> coeffs, const PointLocation& loc) const {
    const auto& conn = tets_[static_cast<std::size_t>(loc.tet)];
    double v = 0.0;
    for (int a = 0; a < 4; ++a) v += loc.barycentric[static_cast<std::size_t>(a)] * coeffs[static_cast<std::size_t>(conn[a])];
    return v;
}

} // namespace pnp
