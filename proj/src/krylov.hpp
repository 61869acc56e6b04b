#pragma once

#include <span>
#include <utility>
#include <vector>

#include "csr.hpp"

namespace pnp {

enum class Precond { none, jacobi };

struct SolverReport {
    int iterations = 0;
    double final_relative_residual = 0.0;
    bool converged = false;
    bool breakdown = false;
    // 2-norm of the recurrence residual after each iteration (diagnostics).
    std::vector<double> residual_history;
};

// Conjugate gradients for symmetric positive definite systems, zero initial
// guess. Stops when ||b - A x||_2 / ||b||_2 <= tol. Zero-curvature breakdown
// is reported through the flags, not thrown.
std::pair<std::vector<double>, SolverReport>
solve_cg(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter,
         Precond precond = Precond::jacobi);

// BiCGStab for general nonsingular systems, zero initial guess. A breakdown
// triggers one restart with a perturbed shadow residual before the solve is
// reported as failed.
std::pair<std::vector<double>, SolverReport>
solve_bicgstab(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter,
               Precond precond = Precond::jacobi);

} // namespace pnp
