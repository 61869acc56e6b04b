#include "krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace pnp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> jacobi_inverse_diagonal(const CsrMatrix& A, Precond precond) {
    std::vector<double> inv(static_cast<std::size_t>(A.n_rows), 1.0);
    if (precond != Precond::jacobi) return inv;
    const std::vector<double> d = A.diagonal();
    for (std::size_t i = 0; i < inv.size(); ++i)
        inv[i] = (std::abs(d[i]) > 1e-300) ? 1.0 / d[i] : 1.0;
    return inv;
}

double true_relative_residual(const CsrMatrix& A, std::span<const double> b,
                              std::span<const double> x, double norm_b) {
    std::vector<double> r(b.size());
    A.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r) / norm_b;
}

} // namespace

std::pair<std::vector<double>, SolverReport>
solve_cg(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter, Precond precond) {
    if (A.n_rows != A.n_cols) throw std::invalid_argument("cg: matrix must be square");
    if (static_cast<int>(b.size()) != A.n_rows) throw std::invalid_argument("cg: rhs size mismatch");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("cg: tol must lie in (0,1)");

    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0);
    SolverReport rep;

    const double norm_b = norm2(b);
    if (norm_b == 0.0) {
        rep.converged = true;
        return {std::move(x), rep};
    }

    const std::vector<double> inv_diag = jacobi_inverse_diagonal(A, precond);
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), Ap(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);

    for (int it = 1; it <= max_iter; ++it) {
        A.multiply(p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) { // zero or negative curvature: not SPD (or exact convergence)
            rep.breakdown = true;
            rep.iterations = it - 1;
            break;
        }
        const double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        const double rn = norm2(r);
        rep.residual_history.push_back(rn);
        rep.iterations = it;
        if (rn / norm_b <= tol) break;
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    rep.final_relative_residual = true_relative_residual(A, b, x, norm_b);
    rep.converged = rep.final_relative_residual <= tol;
    return {std::move(x), rep};
}

std::pair<std::vector<double>, SolverReport>
solve_bicgstab(const CsrMatrix& A, std::span<const double> b, double tol, int max_iter,
               Precond precond) {
    if (A.n_rows != A.n_cols) throw std::invalid_argument("bicgstab: matrix must be square");
    if (static_cast<int>(b.size()) != A.n_rows)
        throw std::invalid_argument("bicgstab: rhs size mismatch");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("bicgstab: tol must lie in (0,1)");

    const std::size_t n = b.size();
    std::vector<double> x(n, 0.0);
    SolverReport rep;

    const double norm_b = norm2(b);
    if (norm_b == 0.0) {
        rep.converged = true;
        return {std::move(x), rep};
    }

    const std::vector<double> inv_diag = jacobi_inverse_diagonal(A, precond);
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> r_shadow = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), y(n), z(n), s(n), t(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    double norm_r = norm_b, norm_shadow = norm_b;
    bool restarted = false;
    // breakdown thresholds are relative to the current vector scales
    const double eps = 1e-14;

    auto restart = [&]() {
        A.multiply(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        // deterministic perturbation so the new shadow vector is not
        // orthogonal to the Krylov space that caused the breakdown
        for (std::size_t i = 0; i < n; ++i)
            r_shadow[i] = r[i] * (1.0 + 1e-8 * static_cast<double>((i % 13) + 1));
        norm_r = norm2(r);
        norm_shadow = norm2(r_shadow);
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        rho = alpha = omega = 1.0;
    };

    for (int it = 1; it <= max_iter; ++it) {
        const double rho_new = dot(r_shadow, r);
        if (std::abs(rho_new) < eps * norm_shadow * norm_r || omega == 0.0) {
            if (!restarted) {
                restarted = true;
                rep.iterations = it;
                restart();
                continue;
            }
            rep.breakdown = true;
            rep.iterations = it;
            break;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        for (std::size_t i = 0; i < n; ++i) y[i] = inv_diag[i] * p[i];
        A.multiply(y, v);
        const double rsv = dot(r_shadow, v);
        if (std::abs(rsv) < eps * norm_shadow * norm2(v)) {
            if (!restarted) {
                restarted = true;
                rep.iterations = it;
                restart();
                continue;
            }
            rep.breakdown = true;
            rep.iterations = it;
            break;
        }
        alpha = rho_new / rsv;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        const double ns = norm2(s);
        if (ns / norm_b <= tol) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
            rep.residual_history.push_back(ns);
            rep.iterations = it;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * s[i];
        A.multiply(z, t);
        const double tt = dot(t, t);
        if (!(tt > 0.0)) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
            if (!restarted) {
                restarted = true;
                rep.iterations = it;
                restart();
                continue;
            }
            rep.breakdown = true;
            rep.iterations = it;
            break;
        }
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        norm_r = norm2(r);
        rep.residual_history.push_back(norm_r);
        rep.iterations = it;
        if (norm_r / norm_b <= tol) break;
    }

    rep.final_relative_residual = true_relative_residual(A, b, x, norm_b);
    rep.converged = rep.final_relative_residual <= tol;
    return {std::move(x), rep};
}

} // namespace pnp
