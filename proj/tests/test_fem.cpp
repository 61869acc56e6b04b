#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fem.hpp"
#include "krylov.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"

using namespace pnp;

namespace {

constexpr double kPi = std::numbers::pi;

double sin3(const Vec3& x) {
    return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
}

// dense stiffness assembled through the oracle gradients, entry by entry
oracles::Dense dense_stiffness(const Mesh& m, double coeff) {
    oracles::Dense D(m.vertex_count());
    for (int t = 0; t < m.tet_count(); ++t) {
        const auto& c = m.tet(t);
        const auto g = oracles::tet_gradients(m.vertex(c[0]), m.vertex(c[1]), m.vertex(c[2]),
                                              m.vertex(c[3]));
        const double vol = std::abs(oracles::tet_signed_volume(m.vertex(c[0]), m.vertex(c[1]),
                                                               m.vertex(c[2]), m.vertex(c[3])));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double dot = 0.0;
                for (int d = 0; d < 3; ++d)
                    dot += g[static_cast<std::size_t>(a)][d] * g[static_cast<std::size_t>(b)][d];
                D.at(c[a], c[b]) += coeff * vol * dot;
            }
    }
    return D;
}

} // namespace

TEST_CASE("quadrature rules integrate barycentric monomials exactly") {
    const double vol = 1.0 / 6.0; // reference tet
    const auto check_rule = [&](const QuadratureRule& rule) {
        for (int a = 0; a + 0 <= rule.degree; ++a)
            for (int b = 0; a + b <= rule.degree; ++b)
                for (int c = 0; a + b + c <= rule.degree; ++c)
                    for (int d = 0; a + b + c + d <= rule.degree; ++d) {
                        double q = 0.0;
                        for (std::size_t k = 0; k < rule.size(); ++k) {
                            const auto& lam = rule.points[k];
                            q += rule.weights[k] * std::pow(lam[0], a) * std::pow(lam[1], b) *
                                 std::pow(lam[2], c) * std::pow(lam[3], d);
                        }
                        q *= vol;
                        const double exact = oracles::barycentric_monomial_integral(vol, a, b, c, d);
                        CHECK(std::abs(q - exact) <= 1e-14);
                    }
    };
    check_rule(quadrature_degree2());
    check_rule(quadrature_degree5());
}

TEST_CASE("stiffness rows sum to zero for constant coefficients") {
    for (int level : {1, 2}) {
        const Mesh m = Mesh::unit_box(level);
        const CsrMatrix A = assemble_stiffness(m, 1.0);
        A.validate();
        for (int r = 0; r < A.n_rows; ++r) {
            double s = 0.0;
            for (int k = A.row_ptr[static_cast<std::size_t>(r)]; k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
                s += A.values[static_cast<std::size_t>(k)];
            CHECK(std::abs(s) <= 1e-12);
        }
    }
}

TEST_CASE("level-0 stiffness equals the dense element-loop oracle") {
    const Mesh m = Mesh::unit_box(0);
    const CsrMatrix A = assemble_stiffness(m, 1.0);
    const oracles::Dense D = dense_stiffness(m, 1.0);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            CHECK(A.at(i, j) == doctest::Approx(D.at(i, j)).epsilon(1e-13));
}

TEST_CASE("stiffness is linear in the coefficient") {
    const Mesh m = Mesh::unit_box(1);
    const CsrMatrix A1 = assemble_stiffness(m, 1.0);
    const CsrMatrix A2 = assemble_stiffness(m, 2.0);
    REQUIRE(A1.nnz() == A2.nnz());
    for (std::size_t k = 0; k < A1.values.size(); ++k)
        CHECK(A2.values[k] == doctest::Approx(2.0 * A1.values[k]).epsilon(1e-15));
}

TEST_CASE("stiffness is exactly symmetric and positive semidefinite") {
    const Mesh m = Mesh::unit_box(2);
    const CsrMatrix A = assemble_stiffness(m, RegionValue(1.0, 3.0));
    for (int r = 0; r < A.n_rows; ++r)
        for (int k = A.row_ptr[static_cast<std::size_t>(r)]; k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const int c = A.col_idx[static_cast<std::size_t>(k)];
            CHECK(A.values[static_cast<std::size_t>(k)] == A.at(c, r)); // bitwise pairs
        }
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(A.n_rows));
        for (double& v : x) v = dist(rng);
        const std::vector<double> Ax = A.multiply(x);
        double q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) q += x[i] * Ax[i];
        CHECK(q >= -1e-12);
    }
}

TEST_CASE("mass matrix integrates the unit function to the domain volume") {
    const Mesh m = Mesh::unit_box(2);
    const CsrMatrix M = assemble_mass(m, 1.0);
    double total = 0.0;
    for (double v : M.values) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mass matrix vanishes where the region weight is zero") {
    const Mesh m = Mesh::unit_box(1);
    const CsrMatrix M = assemble_mass(m, 0.0);
    for (double v : M.values) CHECK(v == 0.0);

    // split mesh: lambda-weighting keeps only the solvent half
    const Mesh split = Mesh::unit_box(1, [](const Vec3& bc) {
        return bc[0] < 0.5 ? kRegionSolute : kRegionSolvent;
    });
    const CsrMatrix Ms = assemble_mass(split, lambda_weight());
    double total = 0.0;
    for (double v : Ms.values) total += v;
    CHECK(total == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("level-0 mass entries match the closed-form per-tet oracle") {
    const Mesh m = Mesh::unit_box(0);
    const CsrMatrix M = assemble_mass(m, 1.0);
    oracles::Dense D(8);
    for (int t = 0; t < m.tet_count(); ++t) {
        const auto& c = m.tet(t);
        const double vol = std::abs(oracles::tet_signed_volume(m.vertex(c[0]), m.vertex(c[1]),
                                                               m.vertex(c[2]), m.vertex(c[3])));
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) D.at(c[a], c[b]) += vol / 20.0 * (a == b ? 2.0 : 1.0);
    }
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(M.at(i, j) == doctest::Approx(D.at(i, j)).epsilon(1e-14));
}

TEST_CASE("drift form vanishes for constant potential or zero scale") {
    const Mesh m = Mesh::unit_box(1);
    const FeFunction phi_const = interpolate(m, [](const Vec3&) { return 3.7; });
    const CsrMatrix B = assemble_drift(m, phi_const, 1.0);
    for (double v : B.values) CHECK(std::abs(v) <= 1e-13);

    const FeFunction phi_x = interpolate(m, [](const Vec3& x) { return x[0]; });
    const CsrMatrix B0 = assemble_drift(m, phi_x, 0.0);
    for (double v : B0.values) CHECK(v == 0.0);

    const Mesh other = Mesh::unit_box(2);
    CHECK_THROWS_AS(assemble_drift(other, phi_x, 1.0), std::invalid_argument);
}

TEST_CASE("drift action matches the per-tet oracle on the unit cell") {
    const Mesh m = Mesh::unit_box(0);
    const FeFunction phi = interpolate(m, [](const Vec3& x) { return x[0]; });
    const FeFunction p_one = interpolate(m, [](const Vec3&) { return 1.0; });
    const CsrMatrix B = assemble_drift(m, phi, 1.0);
    const std::vector<double> Bp = B.multiply(p_one.coeffs);

    // b1(p, phi, v_k) with p = 1: integral of grad(phi) . grad(lambda_k) per tet
    std::vector<double> oracle(8, 0.0);
    for (int t = 0; t < m.tet_count(); ++t) {
        const auto& c = m.tet(t);
        const auto g = oracles::tet_gradients(m.vertex(c[0]), m.vertex(c[1]), m.vertex(c[2]),
                                              m.vertex(c[3]));
        const double vol = std::abs(oracles::tet_signed_volume(m.vertex(c[0]), m.vertex(c[1]),
                                                               m.vertex(c[2]), m.vertex(c[3])));
        Vec3 gphi = {0, 0, 0};
        for (int a = 0; a < 4; ++a)
            for (int d = 0; d < 3; ++d)
                gphi[d] += phi.coeffs[static_cast<std::size_t>(c[a])] * g[static_cast<std::size_t>(a)][d];
        for (int a = 0; a < 4; ++a) {
            double dot = 0.0;
            for (int d = 0; d < 3; ++d) dot += gphi[d] * g[static_cast<std::size_t>(a)][d];
            oracle[static_cast<std::size_t>(c[a])] += vol * dot;
        }
    }
    for (int k = 0; k < 8; ++k)
        CHECK(std::abs(Bp[static_cast<std::size_t>(k)] - oracle[static_cast<std::size_t>(k)]) <= 1e-13);
}

TEST_CASE("load vector of f = 0 and f = 1") {
    const Mesh m = Mesh::unit_box(1);
    const std::vector<double> zero = assemble_load(m, [](const Vec3&) { return 0.0; });
    for (double v : zero) CHECK(v == 0.0);
    const std::vector<double> one = assemble_load(m, [](const Vec3&) { return 1.0; });
    double total = 0.0;
    for (double v : one) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10)); // partition of unity
}

TEST_CASE("trigonometric load matches a higher-order quadrature oracle") {
    const Mesh m = Mesh::unit_box(2);
    const std::vector<double> b = assemble_load(m, sin3);
    std::vector<double> oracle(static_cast<std::size_t>(m.vertex_count()), 0.0);
    for (int t = 0; t < m.tet_count(); ++t) {
        const auto& c = m.tet(t);
        const std::array<Vec3, 4> verts = {m.vertex(c[0]), m.vertex(c[1]), m.vertex(c[2]),
                                           m.vertex(c[3])};
        const std::array<double, 4> e = oracles::duffy_load(verts, sin3);
        for (int a = 0; a < 4; ++a) oracle[static_cast<std::size_t>(c[a])] += e[static_cast<std::size_t>(a)];
    }
    for (int v = 0; v < m.vertex_count(); ++v)
        CHECK(std::abs(b[static_cast<std::size_t>(v)] - oracle[static_cast<std::size_t>(v)]) <= 1e-6);
}

TEST_CASE("point sources reduce to scaled basis vectors") {
    const Mesh m = Mesh::unit_box(2);
    // charge exactly at an interior vertex
    const int v = m.tet(100)[3];
    REQUIRE(!m.is_boundary_vertex(v));
    const PointCharge at_vertex{2.5, m.vertex(v)};
    const std::vector<double> b = assemble_point_sources(m, std::array{at_vertex});
    for (int i = 0; i < m.vertex_count(); ++i)
        CHECK(b[static_cast<std::size_t>(i)] == doctest::Approx(i == v ? 2.5 : 0.0).epsilon(1e-12));

    // charge at a tet barycenter spreads evenly over its four vertices
    Vec3 bc = {0, 0, 0};
    const auto& conn = m.tet(57);
    for (int a = 0; a < 4; ++a)
        for (int d = 0; d < 3; ++d) bc[d] += 0.25 * m.vertex(conn[a])[d];
    const std::vector<double> b2 = assemble_point_sources(m, std::array{PointCharge{1.0, bc}});
    for (int a = 0; a < 4; ++a)
        CHECK(b2[static_cast<std::size_t>(conn[a])] == doctest::Approx(0.25).epsilon(1e-12));

    // two charges superpose
    const std::vector<double> b3 =
        assemble_point_sources(m, std::array{at_vertex, PointCharge{1.0, bc}});
    for (int i = 0; i < m.vertex_count(); ++i)
        CHECK(b3[static_cast<std::size_t>(i)] ==
              doctest::Approx(b[static_cast<std::size_t>(i)] + b2[static_cast<std::size_t>(i)]).epsilon(1e-12));

    CHECK_THROWS_AS(assemble_point_sources(m, std::array{PointCharge{1.0, {2.0, 0.5, 0.5}}}),
                    std::domain_error);
}

TEST_CASE("dirichlet elimination with every vertex constrained returns the data") {
    const Mesh m = Mesh::unit_box(0); // all 8 vertices are boundary
    CsrMatrix A = assemble_stiffness(m, 1.0);
    std::vector<double> b(8, 0.0);
    const std::vector<int> boundary = m.boundary_vertices();
    std::vector<double> g(8);
    for (int i = 0; i < 8; ++i) g[static_cast<std::size_t>(i)] = 0.5 * i - 1.0;
    apply_dirichlet(A, b, boundary, g);
    for (int i = 0; i < 8; ++i) {
        CHECK(b[static_cast<std::size_t>(i)] == g[static_cast<std::size_t>(i)]);
        for (int j = 0; j < 8; ++j) CHECK(A.at(i, j) == (i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("zero dirichlet data leaves the interior rows untouched") {
    const Mesh m = Mesh::unit_box(1);
    CsrMatrix A = assemble_stiffness(m, 1.0);
    const CsrMatrix A0 = A;
    std::vector<double> b = assemble_load(m, sin3);
    const std::vector<double> b0 = b;
    apply_dirichlet(A, b, m.boundary_vertices(), 0.0);
    for (int r = 0; r < A.n_rows; ++r) {
        if (m.is_boundary_vertex(r)) continue;
        CHECK(b[static_cast<std::size_t>(r)] == b0[static_cast<std::size_t>(r)]);
        for (int k = A.row_ptr[static_cast<std::size_t>(r)]; k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const int c = A.col_idx[static_cast<std::size_t>(k)];
            if (!m.is_boundary_vertex(c))
                CHECK(A.values[static_cast<std::size_t>(k)] == A0.at(r, c));
        }
    }
}

TEST_CASE("level-1 poisson solve matches the dense LU oracle") {
    const Mesh m = Mesh::unit_box(1);
    CsrMatrix A = assemble_stiffness(m, 1.0);
    std::vector<double> b = assemble_load(m, [](const Vec3&) { return 1.0; });
    apply_dirichlet(A, b, m.boundary_vertices(), 0.0);
    auto [x, rep] = pnp::solve_cg(A, b, 1e-13, 1000);
    REQUIRE(rep.converged);
    const std::vector<double> x_lu = oracles::lu_solve(oracles::to_dense(A), b);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - x_lu[i]) <= 1e-10);
}

TEST_CASE("transfer between equal meshes is the identity on coefficients") {
    const Mesh m = Mesh::unit_box(2);
    const FeFunction u = interpolate(m, sin3);
    const FeFunction v = transfer(u, m);
    CHECK(v.coeffs == u.coeffs);
}

TEST_CASE("transfer reproduces affine functions exactly") {
    const Mesh coarse = Mesh::unit_box(1);
    const Mesh fine = Mesh::unit_box(3);
    const auto affine = [](const Vec3& x) { return 0.75 * x[0] - 1.25 * x[1] + 2.0 * x[2] + 0.5; };
    const FeFunction uc = interpolate(coarse, affine);
    const FeFunction uf = transfer(uc, fine);
    const FeFunction exact = interpolate(fine, affine);
    for (std::size_t i = 0; i < uf.coeffs.size(); ++i)
        CHECK(std::abs(uf.coeffs[i] - exact.coeffs[i]) <= 1e-13);
}

TEST_CASE("transfer equals direct coarse evaluation at every fine vertex") {
    const Mesh coarse = Mesh::unit_box(1);
    const Mesh fine = Mesh::unit_box(3);
    const FeFunction uc = interpolate(coarse, [](const Vec3& x) { return std::sin(kPi * x[0]); });
    const FeFunction uf = transfer(uc, fine);
    // independent evaluation: test-side gradients and barycentric weights
    for (int v = 0; v < fine.vertex_count(); ++v) {
        const Vec3 x = fine.vertex(v);
        const int n = coarse.cells_per_axis();
        std::array<int, 3> cell;
        for (int d = 0; d < 3; ++d)
            cell[static_cast<std::size_t>(d)] = std::min(static_cast<int>(std::floor(x[d] * n)), n - 1);
        const int cidx = cell[0] + n * (cell[1] + n * cell[2]);
        double value = 0.0;
        bool found = false;
        for (int lt = 0; lt < 6 && !found; ++lt) {
            const auto& c = coarse.tet(6 * cidx + lt);
            const auto g = oracles::tet_gradients(coarse.vertex(c[0]), coarse.vertex(c[1]),
                                                  coarse.vertex(c[2]), coarse.vertex(c[3]));
            std::array<double, 4> lam{};
            for (int a = 0; a < 4; ++a) {
                lam[static_cast<std::size_t>(a)] = (a == 0) ? 1.0 : 0.0;
                for (int d = 0; d < 3; ++d)
                    lam[static_cast<std::size_t>(a)] +=
                        g[static_cast<std::size_t>(a)][d] * (x[d] - coarse.vertex(c[0])[d]);
            }
            if (lam[0] >= -1e-12 && lam[1] >= -1e-12 && lam[2] >= -1e-12 && lam[3] >= -1e-12) {
                found = true;
                for (int a = 0; a < 4; ++a)
                    value += lam[static_cast<std::size_t>(a)] * uc.coeffs[static_cast<std::size_t>(c[a])];
            }
        }
        REQUIRE(found);
        CHECK(std::abs(uf.coeffs[static_cast<std::size_t>(v)] - value) <= 1e-13);
    }
}

TEST_CASE("nestedness: a coarse function and its fine transfer agree everywhere") {
    const Mesh coarse = Mesh::unit_box(1);
    const Mesh fine = Mesh::unit_box(2);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FeFunction uc(coarse);
    for (double& c : uc.coeffs) c = dist(rng);
    const FeFunction uf = transfer(uc, fine);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 x = {std::uniform_real_distribution<double>(0, 1)(rng),
                        std::uniform_real_distribution<double>(0, 1)(rng),
                        std::uniform_real_distribution<double>(0, 1)(rng)};
        CHECK(std::abs(uc(x) - uf(x)) <= 1e-13);
    }
}

TEST_CASE("transfer preserves a zero boundary trace") {
    const Mesh coarse = Mesh::unit_box(2);
    const Mesh fine = Mesh::unit_box(4);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FeFunction uc(coarse);
    for (int v = 0; v < coarse.vertex_count(); ++v)
        uc.coeffs[static_cast<std::size_t>(v)] = coarse.is_boundary_vertex(v) ? 0.0 : dist(rng);
    const FeFunction uf = transfer(uc, fine);
    for (int v = 0; v < fine.vertex_count(); ++v)
        if (fine.is_boundary_vertex(v))
            CHECK(std::abs(uf.coeffs[static_cast<std::size_t>(v)]) <= 1e-13);
}

TEST_CASE("transfer rejects a source mesh finer than the target") {
    const Mesh coarse = Mesh::unit_box(1);
    const Mesh fine = Mesh::unit_box(2);
    const FeFunction uf = interpolate(fine, sin3);
    CHECK_THROWS_AS(transfer(uf, coarse), std::invalid_argument);
}

TEST_CASE("error norms vanish when the exact field is the function itself") {
    const Mesh m = Mesh::unit_box(2);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FeFunction u(m);
    for (double& c : u.coeffs) c = dist(rng);
    const ScalarField self = [&u](const Vec3& x) { return u(x); };
    const VectorField self_grad = [&u, &m](const Vec3& x) {
        const auto loc = m.locate(x);
        const auto& conn = m.tet(loc.tet);
        const auto& g = m.gradients(loc.tet);
        Vec3 gu = {0, 0, 0};
        for (int a = 0; a < 4; ++a)
            for (int d = 0; d < 3; ++d)
                gu[d] += u.coeffs[static_cast<std::size_t>(conn[a])] * g[static_cast<std::size_t>(a)][d];
        return gu;
    };
    CHECK(error_l2(u, self) <= 1e-13);
    CHECK(error_h1(u, self, self_grad) <= 1e-13);
}

TEST_CASE("l2 error of zero against the sine product is the closed-form norm") {
    const Mesh m = Mesh::unit_box(2);
    const FeFunction zero(m);
    // ||phi||_0 = (1/2)^{3/2} since each sin^2 factor integrates to 1/2
    CHECK(error_l2(zero, sin3) == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-4));
}

TEST_CASE("interpolant H1 error decays at first order") {
    const ScalarField f = sin3;
    const VectorField g = [](const Vec3& x) {
        return Vec3{kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]),
                    kPi * std::sin(kPi * x[0]) * std::cos(kPi * x[1]) * std::sin(kPi * x[2]),
                    kPi * std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::cos(kPi * x[2])};
    };
    const Mesh m2 = Mesh::unit_box(2);
    const Mesh m3 = Mesh::unit_box(3);
    const double e2 = error_h1(interpolate(m2, f), f, g);
    const double e3 = error_h1(interpolate(m3, f), f, g);
    const double order = std::log2(e2 / e3);
    CHECK(order >= 0.85);
    CHECK(order <= 1.15);
}

TEST_CASE("discrete norms match the quadrature-based errors") {
    const Mesh m = Mesh::unit_box(2);
    const FeFunction u = interpolate(m, sin3);
    // fe_l2_norm of the coefficients == L2 error against the zero field
    const double n1 = fe_l2_norm(m, u.coeffs);
    const double n2 = error_l2(u, [](const Vec3&) { return 0.0; });
    CHECK(n1 == doctest::Approx(n2).epsilon(1e-12));
    const double h1 = fe_h1_norm(m, u.coeffs);
    const double semi = h1_semi_norm(m, u.coeffs);
    CHECK(h1 == doctest::Approx(std::sqrt(n1 * n1 + semi * semi)).epsilon(1e-13));
}

TEST_CASE("converged poisson solve is Galerkin-orthogonal to random test functions") {
    const Mesh m = Mesh::unit_box(2);
    const PnpCoefficients coeffs = [] {
        PnpCoefficients c;
        c.n_species = 2;
        c.diffusion = {RegionValue(1.0), RegionValue(1.0)};
        c.charge = {1.0, -1.0};
        c.bulk = {0.0, 0.0};
        return c;
    }();
    const std::vector<PointCharge> charges = {{1.0, {0.3, 0.45, 0.55}}, {-0.5, {0.7, 0.2, 0.6}}};
    const std::vector<double> f_hat = assemble_point_sources(m, charges);
    const CsrMatrix K = assemble_stiffness(m, coeffs.eps);
    const CsrMatrix M = assemble_mass(m, lambda_weight());
    const FeFunction p1 = interpolate(m, [](const Vec3& x) { return x[0] * (1 - x[0]); });
    const FeFunction p2 = interpolate(m, [](const Vec3& x) { return std::sin(kPi * x[1]); });

    std::vector<double> b = f_hat;
    const std::vector<double> mp1 = M.multiply(p1.coeffs);
    const std::vector<double> mp2 = M.multiply(p2.coeffs);
    for (std::size_t i = 0; i < b.size(); ++i)
        b[i] -= coeffs.b2_sign * (coeffs.charge[0] * mp1[i] + coeffs.charge[1] * mp2[i]);
    CsrMatrix A = K;
    apply_dirichlet(A, b, m.boundary_vertices(), 0.0);
    auto [phi, rep] = pnp::solve_cg(A, b, 1e-10, 10 * m.vertex_count());
    REQUIRE(rep.converged);

    // residual of the un-eliminated weak form, tested against interior w_h
    std::vector<double> r = K.multiply(phi);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += coeffs.b2_sign * (coeffs.charge[0] * mp1[i] + coeffs.charge[1] * mp2[i]) - f_hat[i];
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> w(static_cast<std::size_t>(m.vertex_count()), 0.0);
        double norm = 0.0;
        for (int v = 0; v < m.vertex_count(); ++v) {
            if (m.is_boundary_vertex(v)) continue;
            w[static_cast<std::size_t>(v)] = dist(rng);
            norm += w[static_cast<std::size_t>(v)] * w[static_cast<std::size_t>(v)];
        }
        norm = std::sqrt(norm);
        double dot = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * r[i];
        CHECK(std::abs(dot / norm) <= 1e-8);
    }
}

TEST_CASE("coefficient validation rejects bad physical data") {
    PnpCoefficients c;
    c.n_species = 2;
    c.diffusion = {RegionValue(1.0), RegionValue(1.0)};
    c.charge = {1.0, -1.0};
    c.bulk = {0.0, 0.0};
    CHECK_NOTHROW(c.validate());
    PnpCoefficients bad = c;
    bad.diffusion[0] = RegionValue(-1.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.eps = RegionValue(0.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.bulk.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.b2_sign = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
