#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "csr.hpp"
#include "oracles.hpp"

using pnp::CsrMatrix;
using pnp::Triplet;

TEST_CASE("from_triplets sums duplicates and keeps columns sorted") {
    const Triplet ts[] = {{1, 2, 1.0}, {0, 0, 2.0}, {1, 2, 0.5}, {1, 0, -1.0}, {2, 1, 3.0}};
    const CsrMatrix A = CsrMatrix::from_triplets(3, 3, ts);
    A.validate();
    CHECK(A.nnz() == 4);
    CHECK(A.at(1, 2) == 1.5);
    CHECK(A.at(0, 0) == 2.0);
    CHECK(A.at(1, 0) == -1.0);
    CHECK(A.at(2, 1) == 3.0);
    CHECK(A.at(2, 2) == 0.0);
    CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, std::array{Triplet{2, 0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("spmv on identity and zero matrices") {
    const CsrMatrix I = CsrMatrix::identity(4);
    const std::vector<double> x = {1.0, -2.0, 0.25, 7.0};
    CHECK(I.multiply(x) == x);

    const CsrMatrix Z = CsrMatrix::zero(4, 4);
    for (double v : Z.multiply(x)) CHECK(v == 0.0);
}

TEST_CASE("spmv matches the dense oracle") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Triplet> ts;
    oracles::Dense D(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double v = dist(rng);
            D.at(i, j) = v;
            ts.push_back({i, j, v});
        }
    const CsrMatrix A = CsrMatrix::from_triplets(3, 3, ts);
    const std::vector<double> x = {dist(rng), dist(rng), dist(rng)};
    const std::vector<double> y = A.multiply(x);
    for (int i = 0; i < 3; ++i) {
        double yi = 0.0;
        for (int j = 0; j < 3; ++j) yi += D.at(i, j) * x[static_cast<std::size_t>(j)];
        CHECK(y[static_cast<std::size_t>(i)] == doctest::Approx(yi).epsilon(1e-14));
    }
    CHECK_THROWS_AS(A.multiply(std::vector<double>(2)), std::invalid_argument);
}

TEST_CASE("add_same_pattern requires identical structure") {
    const Triplet a[] = {{0, 0, 1.0}, {1, 1, 2.0}};
    const Triplet b[] = {{0, 0, 1.0}, {1, 0, 2.0}};
    CsrMatrix A = CsrMatrix::from_triplets(2, 2, a);
    const CsrMatrix B = CsrMatrix::from_triplets(2, 2, b);
    CHECK_THROWS_AS(A.add_same_pattern(B), std::invalid_argument);
    CsrMatrix A2 = CsrMatrix::from_triplets(2, 2, a);
    A.add_same_pattern(A2, 2.0);
    CHECK(A.at(0, 0) == 3.0);
    CHECK(A.at(1, 1) == 6.0);
}

TEST_CASE("matrix market export round-trips through a text parse") {
    const Triplet ts[] = {{0, 0, 1.5}, {0, 2, -2.25}, {1, 1, 3.0}, {2, 0, 0.125}};
    const CsrMatrix A = CsrMatrix::from_triplets(3, 3, ts);
    const std::string path = "test_csr_out.mtx";
    pnp::write_matrix_market(A, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real general");
    int rows = 0, cols = 0;
    std::size_t nnz = 0;
    in >> rows >> cols >> nnz;
    CHECK(rows == 3);
    CHECK(cols == 3);
    CHECK(nnz == A.nnz());
    for (std::size_t k = 0; k < nnz; ++k) {
        int i = 0, j = 0;
        double v = 0.0;
        in >> i >> j >> v;
        CHECK(A.at(i - 1, j - 1) == v);
    }
    std::remove(path.c_str());
}
