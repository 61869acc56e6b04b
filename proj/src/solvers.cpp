#include "solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "errors.hpp"
#include "krylov.hpp"

namespace pnp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double vec_norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// ||b - A x|| / ||b||; absolute when b = 0.
double relative_residual(const CsrMatrix& A, std::span<const double> b, std::span<const double> x) {
    std::vector<double> r = A.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double nb = vec_norm2(b);
    const double nr = vec_norm2(r);
    return nb > 0.0 ? nr / nb : nr;
}

// Assembled operators and load vectors of the discrete system on one mesh.
struct DiscreteProblem {
    const Mesh& mesh;
    const PnpCoefficients& coeffs;
    const GummelConfig& cfg;
    std::vector<int> boundary;
    CsrMatrix stiffness_phi;           // a2 operator (eps-weighted)
    CsrMatrix mass_lambda;             // lambda-weighted mass for the coupling term
    std::vector<CsrMatrix> stiffness_p; // a1 operators (D^i-weighted)
    std::vector<double> load_poisson;
    std::vector<std::vector<double>> load_species;

    DiscreteProblem(const Mesh& m, const PnpCoefficients& c, const RhsBundle& rhs,
                    const GummelConfig& config)
        : mesh(m), coeffs(c), cfg(config), boundary(m.boundary_vertices()) {
        stiffness_phi = assemble_stiffness(mesh, coeffs.eps);
        mass_lambda = assemble_mass(mesh, lambda_weight());
        stiffness_p.reserve(static_cast<std::size_t>(coeffs.n_species));
        for (int i = 0; i < coeffs.n_species; ++i)
            stiffness_p.push_back(assemble_stiffness(mesh, coeffs.diffusion[static_cast<std::size_t>(i)]));

        const std::size_t n = static_cast<std::size_t>(mesh.vertex_count());
        if (rhs.use_point_charges)
            load_poisson = assemble_point_sources(mesh, coeffs.fixed_charges);
        else if (rhs.poisson_load)
            load_poisson = assemble_load(mesh, rhs.poisson_load);
        else
            load_poisson.assign(n, 0.0);
        load_species.resize(static_cast<std::size_t>(coeffs.n_species));
        for (int i = 0; i < coeffs.n_species; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            if (si < rhs.species_loads.size() && rhs.species_loads[si])
                load_species[si] = assemble_load(mesh, rhs.species_loads[si]);
            else
                load_species[si].assign(n, 0.0);
        }
    }

    int max_linear_iters() const { return cfg.linear_iter_factor * mesh.vertex_count(); }

    // rhs of the potential equation with the coupling term moved right:
    // b = f - s sum_i q^i M_lambda p^i
    std::vector<double> poisson_rhs(const std::vector<FeFunction>& p) const {
        std::vector<double> b = load_poisson;
        for (int i = 0; i < coeffs.n_species; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            const std::vector<double> mp = mass_lambda.multiply(p[si].coeffs);
            const double w = coeffs.b2_sign * coeffs.charge[si];
            for (std::size_t k = 0; k < b.size(); ++k) b[k] -= w * mp[k];
        }
        return b;
    }

    // Dirichlet-eliminated potential system for given concentrations.
    std::pair<CsrMatrix, std::vector<double>> poisson_system(const std::vector<FeFunction>& p) const {
        CsrMatrix A = stiffness_phi;
        std::vector<double> b = poisson_rhs(p);
        apply_dirichlet(A, b, boundary, 0.0);
        return {std::move(A), std::move(b)};
    }

    std::pair<FeFunction, SolverReport> solve_poisson(const std::vector<FeFunction>& p) const {
        auto [A, b] = poisson_system(p);
        auto [x, rep] = solve_cg(A, b, cfg.linear_tol, max_linear_iters());
        if (!rep.converged)
            throw SolverError("potential solve did not converge (residual " +
                              std::to_string(rep.final_relative_residual) + ")");
        if (!cfg.dump_matrix_path.empty()) write_matrix_market(A, cfg.dump_matrix_path);
        // constrained entries carry their data exactly, not to solver tolerance
        for (int k : boundary) x[static_cast<std::size_t>(k)] = 0.0;
        return {FeFunction(mesh, std::move(x)), rep};
    }

    // Dirichlet-eliminated species system for a given potential.
    std::pair<CsrMatrix, std::vector<double>> species_system(int i, const FeFunction& phi) const {
        const std::size_t si = static_cast<std::size_t>(i);
        const RegionValue d = coeffs.diffusion[si];
        const double bq = coeffs.beta * coeffs.charge[si];
        CsrMatrix A = stiffness_p[si];
        A.add_same_pattern(assemble_drift(mesh, phi, RegionValue(d.solute * bq, d.solvent * bq)));
        std::vector<double> b = load_species[si];
        apply_dirichlet(A, b, boundary, coeffs.bulk[si]);
        return {std::move(A), std::move(b)};
    }

    std::pair<FeFunction, SolverReport> solve_species(int i, const FeFunction& phi) const {
        auto [A, b] = species_system(i, phi);
        auto [x, rep] = solve_bicgstab(A, b, cfg.linear_tol, max_linear_iters());
        if (!rep.converged)
            throw SolverError("species " + std::to_string(i + 1) +
                              " solve did not converge (residual " +
                              std::to_string(rep.final_relative_residual) + ")");
        for (int k : boundary) x[static_cast<std::size_t>(k)] = coeffs.bulk[static_cast<std::size_t>(i)];
        return {FeFunction(mesh, std::move(x)), rep};
    }
};

double update_norm(const Mesh& mesh, const GummelConfig& cfg, std::span<const double> a,
                   std::span<const double> b) {
    const std::vector<double> d = subtract(a, b);
    return cfg.norm_kind == UpdateNorm::fe_l2 ? fe_l2_norm(mesh, d) : vec_norm2(d);
}

double min_coefficient(const std::vector<FeFunction>& p) {
    double m = 0.0;
    bool first = true;
    for (const FeFunction& f : p)
        for (double v : f.coeffs) {
            if (first || v < m) m = v;
            first = false;
        }
    return m;
}

PnpState initial_state(const Mesh& mesh, const PnpCoefficients& coeffs, const GummelConfig& cfg) {
    PnpState s;
    s.phi = FeFunction(mesh);
    s.p.reserve(static_cast<std::size_t>(coeffs.n_species));
    for (int i = 0; i < coeffs.n_species; ++i) {
        FeFunction f(mesh);
        if (cfg.initial == InitStrategy::bulk_constant)
            std::fill(f.coeffs.begin(), f.coeffs.end(), coeffs.bulk[static_cast<std::size_t>(i)]);
        s.p.push_back(std::move(f));
    }
    return s;
}

std::vector<FeFunction> transfer_all(const std::vector<FeFunction>& fns, const Mesh& fine) {
    std::vector<FeFunction> out;
    out.reserve(fns.size());
    for (const FeFunction& f : fns) out.push_back(transfer(f, fine));
    return out;
}

} // namespace

void GummelConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
    if (max_outer < 1) throw std::invalid_argument("config: max_outer must be at least 1");
    if (!(damping > 0.0 && damping <= 1.0))
        throw std::invalid_argument("config: damping must lie in (0,1]");
    if (!(linear_tol > 0.0 && linear_tol < 1.0))
        throw std::invalid_argument("config: linear_tol must lie in (0,1)");
    if (linear_iter_factor < 1) throw std::invalid_argument("config: linear_iter_factor < 1");
}

std::pair<PnpState, RunMetrics> gummel_solve(const Mesh& mesh, const PnpCoefficients& coeffs,
                                             const RhsBundle& rhs, const GummelConfig& cfg) {
    coeffs.validate();
    cfg.validate();
    const auto t0 = Clock::now();
    const DiscreteProblem prob(mesh, coeffs, rhs, cfg);

    PnpState state = initial_state(mesh, coeffs, cfg);
    RunMetrics metrics;
    std::vector<FeFunction> p_frozen = state.p; // concentrations the potential was solved with

    for (int m = 0; m < cfg.max_outer; ++m) {
        p_frozen = state.p;
        auto [phi_new, rep_phi] = prob.solve_poisson(state.p);
        metrics.poisson_solves += 1;
        metrics.poisson_iterations += rep_phi.iterations;
        const double upd = update_norm(mesh, cfg, phi_new.coeffs, state.phi.coeffs);
        state.phi = std::move(phi_new);

        for (int i = 0; i < coeffs.n_species; ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            auto [p_new, rep_p] = prob.solve_species(i, state.phi);
            metrics.np_solves += 1;
            metrics.np_iterations += rep_p.iterations;
            if (cfg.damping < 1.0) {
                for (std::size_t k = 0; k < p_new.coeffs.size(); ++k)
                    p_new.coeffs[k] = cfg.damping * p_new.coeffs[k] +
                                      (1.0 - cfg.damping) * state.p[si].coeffs[k];
            }
            state.p[si] = std::move(p_new);
        }

        metrics.outer_iterations = m + 1;
        metrics.final_update_norm = upd;
        if (upd < cfg.tol) {
            metrics.converged = true;
            break;
        }
    }

    // residuals of the linear systems solved in the final sweep
    {
        auto [A, b] = prob.poisson_system(p_frozen);
        metrics.poisson_residual = relative_residual(A, b, state.phi.coeffs);
        double worst = 0.0;
        for (int i = 0; i < coeffs.n_species; ++i) {
            auto [Ai, bi] = prob.species_system(i, state.phi);
            worst = std::max(worst, relative_residual(Ai, bi, state.p[static_cast<std::size_t>(i)].coeffs));
        }
        metrics.np_residual = worst;
    }
    metrics.min_concentration = min_coefficient(state.p);
    metrics.wall_time_seconds = seconds_since(t0);
    return {std::move(state), metrics};
}

std::pair<PnpState, RunMetrics> two_grid_step2(int variant, const PnpState& coarse_state,
                                               const Mesh& fine_mesh, const PnpCoefficients& coeffs,
                                               const RhsBundle& rhs, const GummelConfig& cfg) {
    if (variant < 1 || variant > 3) throw std::invalid_argument("two_grid_step2: variant must be 1..3");
    coeffs.validate();
    cfg.validate();
    const auto t0 = Clock::now();
    const DiscreteProblem prob(fine_mesh, coeffs, rhs, cfg);

    // coarse data enters the fine forms only through these transfers
    const FeFunction phi_coarse = transfer(coarse_state.phi, fine_mesh);
    const std::vector<FeFunction> p_coarse = transfer_all(coarse_state.p, fine_mesh);

    PnpState state;
    RunMetrics metrics;
    state.p.resize(static_cast<std::size_t>(coeffs.n_species));

    auto record_phi = [&](std::pair<FeFunction, SolverReport> r) {
        state.phi = std::move(r.first);
        metrics.poisson_solves += 1;
        metrics.poisson_iterations += r.second.iterations;
    };
    auto record_p = [&](int i, std::pair<FeFunction, SolverReport> r) {
        state.p[static_cast<std::size_t>(i)] = std::move(r.first);
        metrics.np_solves += 1;
        metrics.np_iterations += r.second.iterations;
    };

    if (variant == 1) {
        record_phi(prob.solve_poisson(p_coarse));
        for (int i = 0; i < coeffs.n_species; ++i) record_p(i, prob.solve_species(i, state.phi));
    } else if (variant == 2) {
        if (cfg.parallel_step2) {
            auto phi_task = std::async(std::launch::async, [&] { return prob.solve_poisson(p_coarse); });
            std::vector<std::future<std::pair<FeFunction, SolverReport>>> p_tasks;
            p_tasks.reserve(static_cast<std::size_t>(coeffs.n_species));
            for (int i = 0; i < coeffs.n_species; ++i)
                p_tasks.push_back(std::async(std::launch::async,
                                             [&, i] { return prob.solve_species(i, phi_coarse); }));
            for (int i = 0; i < coeffs.n_species; ++i) record_p(i, p_tasks[static_cast<std::size_t>(i)].get());
            record_phi(phi_task.get());
        } else {
            for (int i = 0; i < coeffs.n_species; ++i) record_p(i, prob.solve_species(i, phi_coarse));
            record_phi(prob.solve_poisson(p_coarse));
        }
    } else {
        for (int i = 0; i < coeffs.n_species; ++i) record_p(i, prob.solve_species(i, phi_coarse));
        record_phi(prob.solve_poisson(state.p));
    }

    // every step-2 system is solved exactly once; report its residuals
    {
        const std::vector<FeFunction>& p_for_poisson = (variant == 3) ? state.p : p_coarse;
        auto [A, b] = prob.poisson_system(p_for_poisson);
        metrics.poisson_residual = relative_residual(A, b, state.phi.coeffs);
        const FeFunction& phi_for_species = (variant == 1) ? state.phi : phi_coarse;
        double worst = 0.0;
        for (int i = 0; i < coeffs.n_species; ++i) {
            auto [Ai, bi] = prob.species_system(i, phi_for_species);
            worst = std::max(worst, relative_residual(Ai, bi, state.p[static_cast<std::size_t>(i)].coeffs));
        }
        metrics.np_residual = worst;
    }
    metrics.outer_iterations = 0;
    metrics.converged = true;
    metrics.min_concentration = min_coefficient(state.p);
    metrics.wall_time_seconds = seconds_since(t0);
    return {std::move(state), metrics};
}

TwoGridRun two_grid_run(int variant, const Mesh& coarse, const Mesh& fine,
                        const PnpCoefficients& coeffs, const RhsBundle& rhs,
                        const GummelConfig& cfg) {
    if (coarse.level() > fine.level())
        throw std::invalid_argument("two_grid: coarse level exceeds fine level");
    TwoGridRun run;
    auto [coarse_state, coarse_metrics] = gummel_solve(coarse, coeffs, rhs, cfg);
    auto [fine_state, fine_metrics] = two_grid_step2(variant, coarse_state, fine, coeffs, rhs, cfg);
    run.coarse_state = std::move(coarse_state);
    run.fine_state = std::move(fine_state);
    run.metrics = fine_metrics;
    run.metrics.outer_iterations = coarse_metrics.outer_iterations;
    run.metrics.converged = coarse_metrics.converged;
    run.metrics.final_update_norm = coarse_metrics.final_update_norm;
    run.metrics.poisson_solves += coarse_metrics.poisson_solves;
    run.metrics.np_solves += coarse_metrics.np_solves;
    run.metrics.poisson_iterations += coarse_metrics.poisson_iterations;
    run.metrics.np_iterations += coarse_metrics.np_iterations;
    run.metrics.wall_time_seconds = coarse_metrics.wall_time_seconds + fine_metrics.wall_time_seconds;
    return run;
}

std::pair<PnpState, RunMetrics> two_grid_1(const Mesh& coarse, const Mesh& fine,
                                           const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                           const GummelConfig& cfg) {
    TwoGridRun run = two_grid_run(1, coarse, fine, coeffs, rhs, cfg);
    return {std::move(run.fine_state), run.metrics};
}

std::pair<PnpState, RunMetrics> two_grid_2(const Mesh& coarse, const Mesh& fine,
                                           const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                           const GummelConfig& cfg) {
    TwoGridRun run = two_grid_run(2, coarse, fine, coeffs, rhs, cfg);
    return {std::move(run.fine_state), run.metrics};
}

std::pair<PnpState, RunMetrics> two_grid_3(const Mesh& coarse, const Mesh& fine,
                                           const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                           const GummelConfig& cfg) {
    TwoGridRun run = two_grid_run(3, coarse, fine, coeffs, rhs, cfg);
    return {std::move(run.fine_state), run.metrics};
}

std::pair<PnpState, RunMetrics> solve(Algorithm alg, const Mesh* coarse, const Mesh& fine,
                                      const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                      const GummelConfig& cfg) {
    if (alg == Algorithm::gummel) return gummel_solve(fine, coeffs, rhs, cfg);
    if (coarse == nullptr) throw std::invalid_argument("two-grid solve requires a coarse mesh");
    const int variant = alg == Algorithm::tg1 ? 1 : (alg == Algorithm::tg2 ? 2 : 3);
    TwoGridRun run = two_grid_run(variant, *coarse, fine, coeffs, rhs, cfg);
    return {std::move(run.fine_state), run.metrics};
}

std::vector<TheoremBound> verify_theorem_bounds(const PnpState& fem_state, const PnpState& tg_state,
                                                const PnpState& coarse_state, int variant) {
    if (variant < 1 || variant > 3) throw std::invalid_argument("verify_theorem_bounds: variant must be 1..3");
    const Mesh* mesh = fem_state.mesh();
    if (mesh == nullptr || tg_state.mesh() != mesh)
        throw std::invalid_argument("verify_theorem_bounds: states must share the fine mesh");
    if (fem_state.p.size() != tg_state.p.size() || fem_state.p.size() != coarse_state.p.size())
        throw std::invalid_argument("verify_theorem_bounds: species counts differ");

    const RegionValue solvent = lambda_weight();
    const FeFunction phi_coarse = transfer(coarse_state.phi, *mesh);
    const std::vector<FeFunction> p_coarse = transfer_all(coarse_state.p, *mesh);

    // sum_i || p_fem^i - p_coarse^i ||_{0, solvent}
    double p_gap = 0.0;
    for (std::size_t i = 0; i < fem_state.p.size(); ++i)
        p_gap += fe_l2_norm(*mesh, subtract(fem_state.p[i].coeffs, p_coarse[i].coeffs), solvent);
    // | phi_fem - phi_coarse |_{1, solvent}
    const double phi_gap = h1_semi_norm(*mesh, subtract(fem_state.phi.coeffs, phi_coarse.coeffs), solvent);

    auto make = [](std::string name, double lhs, double rhs) {
        TheoremBound b;
        b.name = std::move(name);
        b.lhs = lhs;
        b.rhs = rhs;
        b.exact = (lhs == 0.0);
        b.constant = (rhs > 0.0) ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        return b;
    };

    const std::string tag = "tg" + std::to_string(variant);
    const double lhs_phi = h1_semi_norm(*mesh, subtract(fem_state.phi.coeffs, tg_state.phi.coeffs));
    double lhs_p = 0.0;
    for (std::size_t i = 0; i < fem_state.p.size(); ++i)
        lhs_p = std::max(lhs_p,
                         h1_semi_norm(*mesh, subtract(fem_state.p[i].coeffs, tg_state.p[i].coeffs), solvent));

    std::vector<TheoremBound> out;
    out.push_back(make(tag + "-potential", lhs_phi, p_gap));
    out.push_back(make(tag + "-concentration", lhs_p, variant == 1 ? p_gap : phi_gap));
    return out;
}

CoupledResiduals coupled_residuals(const PnpState& state, const PnpCoefficients& coeffs,
                                   const RhsBundle& rhs) {
    const Mesh& mesh = *state.mesh();
    GummelConfig cfg; // assembly only; solver settings unused
    const DiscreteProblem prob(mesh, coeffs, rhs, cfg);
    CoupledResiduals res;
    auto [A, b] = prob.poisson_system(state.p);
    res.poisson = relative_residual(A, b, state.phi.coeffs);
    for (int i = 0; i < coeffs.n_species; ++i) {
        auto [Ai, bi] = prob.species_system(i, state.phi);
        res.species.push_back(relative_residual(Ai, bi, state.p[static_cast<std::size_t>(i)].coeffs));
    }
    return res;
}

} // namespace pnp
