#pragma once

#include <span>
#include <string>
#include <vector>

namespace pnp {

struct Triplet {
    int row;
    int col;
    double value;
};

// Compressed sparse row matrix, double precision. Column indices are strictly
// increasing within each row and no explicit duplicates are stored.
struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<int> row_ptr;   // size n_rows + 1, nondecreasing
    std::vector<int> col_idx;   // size nnz
    std::vector<double> values; // size nnz

    static CsrMatrix zero(int rows, int cols);
    static CsrMatrix identity(int n);
    // Sums duplicate entries; accumulation order is the triplet order within
    // each (row, col) group, so assembly stays deterministic.
    static CsrMatrix from_triplets(int rows, int cols, std::span<const Triplet> triplets);

    std::size_t nnz() const { return values.size(); }

    // y = A x, serial row-major accumulation. Throws on dimension mismatch.
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    // Entry lookup by binary search; 0 if not stored.
    double at(int row, int col) const;
    // Pointer to stored entry value, or nullptr.
    double* find(int row, int col);
    const double* find(int row, int col) const;

    std::vector<double> diagonal() const;

    // Adds other into this; requires an identical sparsity pattern.
    void add_same_pattern(const CsrMatrix& other, double scale = 1.0);

    // Structural invariant check (used by tests and after construction paths).
    void validate() const;
};

// MatrixMarket coordinate format export (1-based, general real).
void write_matrix_market(const CsrMatrix& A, const std::string& path);

} // namespace pnp
