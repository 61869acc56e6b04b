#include "csr.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "errors.hpp"

namespace pnp {

CsrMatrix CsrMatrix::zero(int rows, int cols) {
    CsrMatrix A;
    A.n_rows = rows;
    A.n_cols = cols;
    A.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
    return A;
}

CsrMatrix CsrMatrix::identity(int n) {
    CsrMatrix A;
    A.n_rows = A.n_cols = n;
    A.row_ptr.resize(static_cast<std::size_t>(n) + 1);
    A.col_idx.resize(static_cast<std::size_t>(n));
    A.values.assign(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i <= n; ++i) A.row_ptr[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n; ++i) A.col_idx[static_cast<std::size_t>(i)] = i;
    return A;
}

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::span<const Triplet> triplets) {
    std::vector<std::size_t> order(triplets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (triplets[a].row != triplets[b].row) return triplets[a].row < triplets[b].row;
        return triplets[a].col < triplets[b].col;
    });

    CsrMatrix A;
    A.n_rows = rows;
    A.n_cols = cols;
    A.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
    int prev_row = -1, prev_col = -1;
    for (std::size_t oi : order) {
        const Triplet& t = triplets[oi];
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("triplet index out of range");
        if (t.row == prev_row && t.col == prev_col) {
            A.values.back() += t.value;
        } else {
            A.col_idx.push_back(t.col);
            A.values.push_back(t.value);
            A.row_ptr[static_cast<std::size_t>(t.row) + 1] += 1;
            prev_row = t.row;
            prev_col = t.col;
        }
    }
    for (int r = 0; r < rows; ++r) A.row_ptr[static_cast<std::size_t>(r) + 1] += A.row_ptr[static_cast<std::size_t>(r)];
    return A;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_cols || static_cast<int>(y.size()) != n_rows)
        throw std::invalid_argument("spmv dimension mismatch");
    for (int r = 0; r < n_rows; ++r) {
        double acc = 0.0;
        for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
            acc += values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])];
        y[static_cast<std::size_t>(r)] = acc;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_rows));
    multiply(x, y);
    return y;
}

const double* CsrMatrix::find(int row, int col) const {
    const int lo = row_ptr[static_cast<std::size_t>(row)];
    const int hi = row_ptr[static_cast<std::size_t>(row) + 1];
    const int* first = col_idx.data() + lo;
    const int* last = col_idx.data() + hi;
    const int* it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return nullptr;
    return values.data() + (it - col_idx.data());
}

double* CsrMatrix::find(int row, int col) {
    return const_cast<double*>(static_cast<const CsrMatrix*>(this)->find(row, col));
}

double CsrMatrix::at(int row, int col) const {
    const double* p = find(row, col);
    return p ? *p : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_rows), 0.0);
    for (int r = 0; r < n_rows && r < n_cols; ++r) d[static_cast<std::size_t>(r)] = at(r, r);
    return d;
}

void CsrMatrix::add_same_pattern(const CsrMatrix& other, double scale) {
    if (other.n_rows != n_rows || other.n_cols != n_cols || other.row_ptr != row_ptr ||
        other.col_idx != col_idx)
        throw std::invalid_argument("add_same_pattern: sparsity patterns differ");
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += scale * other.values[k];
}

void CsrMatrix::validate() const {
    if (static_cast<int>(row_ptr.size()) != n_rows + 1)
        throw std::logic_error("csr: row_ptr size");
    if (row_ptr.front() != 0 || row_ptr.back() != static_cast<int>(values.size()) ||
        col_idx.size() != values.size())
        throw std::logic_error("csr: array sizes inconsistent");
    for (int r = 0; r < n_rows; ++r) {
        if (row_ptr[static_cast<std::size_t>(r) + 1] < row_ptr[static_cast<std::size_t>(r)])
            throw std::logic_error("csr: row_ptr decreasing");
        for (int k = row_ptr[static_cast<std::size_t>(r)]; k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
            const int c = col_idx[static_cast<std::size_t>(k)];
            if (c < 0 || c >= n_cols) throw std::logic_error("csr: column out of range");
            if (k > row_ptr[static_cast<std::size_t>(r)] && col_idx[static_cast<std::size_t>(k) - 1] >= c)
                throw std::logic_error("csr: columns not strictly increasing");
        }
    }
}

void write_matrix_market(const CsrMatrix& A, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(f, "%d %d %zu\n", A.n_rows, A.n_cols, A.nnz());
    for (int r = 0; r < A.n_rows; ++r)
        for (int k = A.row_ptr[static_cast<std::size_t>(r)]; k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
            std::fprintf(f, "%d %d %.17g\n", r + 1, A.col_idx[static_cast<std::size_t>(k)] + 1,
                         A.values[static_cast<std::size_t>(k)]);
    if (std::fclose(f) != 0) throw IoError("error closing " + path);
}

} // namespace pnp
