#include "fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"

namespace pnp {

namespace {

// Vertex-adjacency sparsity pattern of the P1 operator, zero values.
CsrMatrix adjacency_pattern(const Mesh& mesh) {
    const int n = mesh.vertex_count();
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n));
    for (const auto& t : mesh.tets())
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) rows[static_cast<std::size_t>(t[a])].push_back(t[b]);

    CsrMatrix A;
    A.n_rows = A.n_cols = n;
    A.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t nnz = 0;
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        nnz += r.size();
    }
    A.col_idx.reserve(nnz);
    A.values.assign(nnz, 0.0);
    for (int r = 0; r < n; ++r) {
        A.row_ptr[static_cast<std::size_t>(r) + 1] =
            A.row_ptr[static_cast<std::size_t>(r)] + static_cast<int>(rows[static_cast<std::size_t>(r)].size());
        A.col_idx.insert(A.col_idx.end(), rows[static_cast<std::size_t>(r)].begin(), rows[static_cast<std::size_t>(r)].end());
    }
    return A;
}

void scatter_add(CsrMatrix& A, int row, int col, double v) {
    double* p = A.find(row, col);
    *p += v;
}

Vec3 physical_point(const Mesh& mesh, const std::array<int, 4>& t, const std::array<double, 4>& bary) {
    Vec3 x = {0, 0, 0};
    for (int a = 0; a < 4; ++a) {
        const Vec3& va = mesh.vertex(t[a]);
        for (int d = 0; d < 3; ++d) x[d] += bary[static_cast<std::size_t>(a)] * va[d];
    }
    return x;
}

} // namespace

FeFunction::FeFunction(const Mesh& m, std::vector<double> c) : mesh(&m), coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) != m.vertex_count())
        throw std::invalid_argument("FeFunction: coefficient count != vertex count");
}

FeFunction interpolate(const Mesh& mesh, const ScalarField& f) {
    FeFunction u(mesh);
    for (int v = 0; v < mesh.vertex_count(); ++v) u.coeffs[static_cast<std::size_t>(v)] = f(mesh.vertex(v));
    return u;
}

void PnpCoefficients::validate() const {
    if (n_species < 1) throw std::invalid_argument("coefficients: need at least one species");
    if (static_cast<int>(diffusion.size()) != n_species ||
        static_cast<int>(charge.size()) != n_species || static_cast<int>(bulk.size()) != n_species)
        throw std::invalid_argument("coefficients: per-species array sizes must equal n_species");
    for (const RegionValue& d : diffusion)
        if (!(d.solute > 0.0) || !(d.solvent > 0.0))
            throw std::invalid_argument("coefficients: diffusion must be positive");
    if (!(eps.solute > 0.0) || !(eps.solvent > 0.0))
        throw std::invalid_argument("coefficients: dielectric must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("coefficients: beta must be positive");
    if (std::abs(std::abs(b2_sign) - 1.0) > 1e-15)
        throw std::invalid_argument("coefficients: b2_sign must be +1 or -1");
}

CsrMatrix assemble_stiffness(const Mesh& mesh, RegionValue coeff) {
    CsrMatrix A = adjacency_pattern(mesh);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const auto& g = mesh.gradients(t);
        const double c = coeff.at(mesh.region_marker(t)) * mesh.tet_volume(t);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double dotg = g[a][0] * g[b][0] + g[a][1] * g[b][1] + g[a][2] * g[b][2];
                scatter_add(A, conn[a], conn[b], c * dotg);
            }
    }
    return A;
}

CsrMatrix assemble_mass(const Mesh& mesh, RegionValue weight) {
    CsrMatrix A = adjacency_pattern(mesh);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const double c = weight.at(mesh.region_marker(t)) * mesh.tet_volume(t) / 20.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) scatter_add(A, conn[a], conn[b], c * (a == b ? 2.0 : 1.0));
    }
    return A;
}

CsrMatrix assemble_drift(const Mesh& mesh, const FeFunction& phi, double scale) {
    return assemble_drift(mesh, phi, RegionValue(scale));
}

CsrMatrix assemble_drift(const Mesh& mesh, const FeFunction& phi, RegionValue scale) {
    if (phi.mesh != &mesh) throw std::invalid_argument("assemble_drift: phi lives on a different mesh");
    const QuadratureRule& q = quadrature_degree2();
    CsrMatrix A = adjacency_pattern(mesh);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const auto& g = mesh.gradients(t);
        Vec3 grad_phi = {0, 0, 0};
        for (int a = 0; a < 4; ++a) {
            const double c = phi.coeffs[static_cast<std::size_t>(conn[a])];
            for (int d = 0; d < 3; ++d) grad_phi[d] += c * g[a][d];
        }
        const double cT = scale.at(mesh.region_marker(t)) * mesh.tet_volume(t);
        for (int b = 0; b < 4; ++b) {
            // integral of lambda_b over the tet by the degree-2 rule (= vol/4)
            double wb = 0.0;
            for (std::size_t k = 0; k < q.size(); ++k) wb += q.weights[k] * q.points[k][static_cast<std::size_t>(b)];
            for (int a = 0; a < 4; ++a) {
                const double gdot = grad_phi[0] * g[a][0] + grad_phi[1] * g[a][1] + grad_phi[2] * g[a][2];
                scatter_add(A, conn[a], conn[b], cT * gdot * wb);
            }
        }
    }
    return A;
}

std::vector<double> assemble_load(const Mesh& mesh, const ScalarField& f) {
    const QuadratureRule& q = quadrature_degree5();
    std::vector<double> b(static_cast<std::size_t>(mesh.vertex_count()), 0.0);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const double vol = mesh.tet_volume(t);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const Vec3 x = physical_point(mesh, conn, q.points[k]);
            const double fw = f(x) * q.weights[k] * vol;
            for (int a = 0; a < 4; ++a)
                b[static_cast<std::size_t>(conn[a])] += fw * q.points[k][static_cast<std::size_t>(a)];
        }
    }
    return b;
}

std::vector<double> assemble_point_sources(const Mesh& mesh, std::span<const PointCharge> charges) {
    std::vector<double> b(static_cast<std::size_t>(mesh.vertex_count()), 0.0);
    for (const PointCharge& c : charges) {
        const PointLocation loc = mesh.locate(c.location); // throws outside the domain
        const auto& conn = mesh.tet(loc.tet);
        for (int a = 0; a < 4; ++a)
            b[static_cast<std::size_t>(conn[a])] += c.magnitude * loc.barycentric[static_cast<std::size_t>(a)];
    }
    return b;
}

void apply_dirichlet(CsrMatrix& A, std::span<double> b, std::span<const int> boundary,
                     std::span<const double> values) {
    if (boundary.size() != values.size())
        throw std::invalid_argument("apply_dirichlet: boundary/value size mismatch");
    const int n = A.n_rows;
    std::vector<std::uint8_t> is_bnd(static_cast<std::size_t>(n), 0);
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const int k = boundary[i];
        if (k < 0 || k >= n) throw std::invalid_argument("apply_dirichlet: index out of range");
        is_bnd[static_cast<std::size_t>(k)] = 1;
        g[static_cast<std::size_t>(k)] = values[i];
    }

    for (int r = 0; r < n; ++r) {
        const bool rb = is_bnd[static_cast<std::size_t>(r)];
        for (int k = A.row_ptr[static_cast<std::size_t>(r)]; k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const int c = A.col_idx[static_cast<std::size_t>(k)];
            double& v = A.values[static_cast<std::size_t>(k)];
            if (rb) {
                v = (c == r) ? 1.0 : 0.0;
            } else if (is_bnd[static_cast<std::size_t>(c)]) {
                b[static_cast<std::size_t>(r)] -= v * g[static_cast<std::size_t>(c)];
                v = 0.0;
            }
        }
        if (rb) {
            if (A.find(r, r) == nullptr)
                throw std::logic_error("apply_dirichlet: missing diagonal entry");
            b[static_cast<std::size_t>(r)] = g[static_cast<std::size_t>(r)];
        }
    }
}

void apply_dirichlet(CsrMatrix& A, std::span<double> b, std::span<const int> boundary, double value) {
    const std::vector<double> values(boundary.size(), value);
    apply_dirichlet(A, b, boundary, values);
}

FeFunction transfer(const FeFunction& coarse, const Mesh& fine_mesh) {
    if (coarse.mesh == nullptr) throw std::invalid_argument("transfer: source is unbound");
    if (coarse.mesh->level() > fine_mesh.level())
        throw std::invalid_argument("transfer: source mesh is finer than target");
    FeFunction out(fine_mesh);
    if (coarse.mesh == &fine_mesh || coarse.mesh->level() == fine_mesh.level()) {
        out.coeffs = coarse.coeffs;
        return out;
    }
    for (int v = 0; v < fine_mesh.vertex_count(); ++v)
        out.coeffs[static_cast<std::size_t>(v)] = coarse.eval(coarse.mesh->locate(fine_mesh.vertex(v)));
    return out;
}

double error_l2(const FeFunction& u, const ScalarField& exact) {
    const Mesh& mesh = *u.mesh;
    const QuadratureRule& q = quadrature_degree5();
    double acc = 0.0;
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const double vol = mesh.tet_volume(t);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const Vec3 x = physical_point(mesh, conn, q.points[k]);
            double uh = 0.0;
            for (int a = 0; a < 4; ++a)
                uh += q.points[k][static_cast<std::size_t>(a)] * u.coeffs[static_cast<std::size_t>(conn[a])];
            const double d = uh - exact(x);
            acc += vol * q.weights[k] * d * d;
        }
    }
    return std::sqrt(acc);
}

double error_h1(const FeFunction& u, const ScalarField& exact, const VectorField& exact_grad) {
    const Mesh& mesh = *u.mesh;
    const QuadratureRule& q = quadrature_degree5();
    double acc_l2 = 0.0, acc_semi = 0.0;
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const auto& g = mesh.gradients(t);
        const double vol = mesh.tet_volume(t);
        Vec3 grad_uh = {0, 0, 0};
        for (int a = 0; a < 4; ++a) {
            const double c = u.coeffs[static_cast<std::size_t>(conn[a])];
            for (int d = 0; d < 3; ++d) grad_uh[d] += c * g[a][d];
        }
        for (std::size_t k = 0; k < q.size(); ++k) {
            const Vec3 x = physical_point(mesh, conn, q.points[k]);
            double uh = 0.0;
            for (int a = 0; a < 4; ++a)
                uh += q.points[k][static_cast<std::size_t>(a)] * u.coeffs[static_cast<std::size_t>(conn[a])];
            const double d0 = uh - exact(x);
            acc_l2 += vol * q.weights[k] * d0 * d0;
            const Vec3 ge = exact_grad(x);
            double gd = 0.0;
            for (int d = 0; d < 3; ++d) {
                const double dd = grad_uh[d] - ge[d];
                gd += dd * dd;
            }
            acc_semi += vol * q.weights[k] * gd;
        }
    }
    return std::sqrt(acc_l2 + acc_semi);
}

double fe_l2_norm(const Mesh& mesh, std::span<const double> coeffs, RegionValue weight) {
    double acc = 0.0;
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const double w = weight.at(mesh.region_marker(t)) * mesh.tet_volume(t) / 20.0;
        double sum = 0.0, sq = 0.0;
        for (int a = 0; a < 4; ++a) {
            const double c = coeffs[static_cast<std::size_t>(conn[a])];
            sum += c;
            sq += c * c;
        }
        acc += w * (sum * sum + sq); // c^T M_T c with M_T = vol/20 (1 + delta)
    }
    return std::sqrt(std::max(acc, 0.0));
}

double h1_semi_norm(const Mesh& mesh, std::span<const double> coeffs, RegionValue weight) {
    double acc = 0.0;
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& conn = mesh.tet(t);
        const auto& g = mesh.gradients(t);
        Vec3 gu = {0, 0, 0};
        for (int a = 0; a < 4; ++a) {
            const double c = coeffs[static_cast<std::size_t>(conn[a])];
            for (int d = 0; d < 3; ++d) gu[d] += c * g[a][d];
        }
        acc += weight.at(mesh.region_marker(t)) * mesh.tet_volume(t) *
               (gu[0] * gu[0] + gu[1] * gu[1] + gu[2] * gu[2]);
    }
    return std::sqrt(std::max(acc, 0.0));
}

double fe_h1_norm(const Mesh& mesh, std::span<const double> coeffs, RegionValue weight) {
    const double l2 = fe_l2_norm(mesh, coeffs, weight);
    const double semi = h1_semi_norm(mesh, coeffs, weight);
    return std::sqrt(l2 * l2 + semi * semi);
}

std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("subtract: size mismatch");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

} // namespace pnp
