#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fem.hpp"

namespace pnp {

enum class Algorithm { gummel, tg1, tg2, tg3 };

enum class UpdateNorm { fe_l2, coefficient };
enum class InitStrategy { bulk_constant, zero };

struct GummelConfig {
    double tol = 1e-5;       // stopping tolerance on the potential update norm
    int max_outer = 200;
    double damping = 1.0;    // under-relaxation on concentrations, 1 = off
    UpdateNorm norm_kind = UpdateNorm::fe_l2;
    InitStrategy initial = InitStrategy::bulk_constant;
    double linear_tol = 1e-10;
    int linear_iter_factor = 10; // inner max_iter = factor * n_dofs
    bool parallel_step2 = false; // fully decoupled fine solves may run concurrently
    std::string dump_matrix_path; // optional MatrixMarket dump of the last Poisson system

    void validate() const;
};

struct RunMetrics {
    int outer_iterations = 0;
    bool converged = false;
    int poisson_solves = 0;
    int np_solves = 0;
    long poisson_iterations = 0;
    long np_iterations = 0;
    double wall_time_seconds = 0.0;
    double final_update_norm = 0.0;
    // Relative residuals of the linear systems solved in the final sweep.
    double poisson_residual = 0.0;
    double np_residual = 0.0;
    // Smallest concentration coefficient (negative undershoots are recorded,
    // never clipped).
    double min_concentration = 0.0;
};

// Potential plus one concentration per species, all on one mesh.
struct PnpState {
    FeFunction phi;
    std::vector<FeFunction> p;

    const Mesh* mesh() const { return phi.mesh; }
};

// Fixed-point decoupling loop: each sweep solves the Poisson equation with the
// frozen concentrations, then every species equation with the fresh potential.
// Stops when the potential update norm drops below cfg.tol; a run that hits
// max_outer is returned with converged = false. Inner solver failure throws
// SolverError.
std::pair<PnpState, RunMetrics> gummel_solve(const Mesh& mesh, const PnpCoefficients& coeffs,
                                             const RhsBundle& rhs, const GummelConfig& cfg);

// Fine-grid half of the two-grid algorithms: coarse data is transferred once
// at entry, then each variant performs single decoupled solves.
//   1: Poisson with coarse concentrations, then species with the new potential;
//   2: species with the coarse potential and Poisson with the coarse
//      concentrations (independent; may run concurrently);
//   3: species with the coarse potential, then Poisson with the new
//      concentrations.
std::pair<PnpState, RunMetrics> two_grid_step2(int variant, const PnpState& coarse_state,
                                               const Mesh& fine_mesh, const PnpCoefficients& coeffs,
                                               const RhsBundle& rhs, const GummelConfig& cfg);

struct TwoGridRun {
    PnpState fine_state;
    PnpState coarse_state;
    RunMetrics metrics;
};

// Coarse Gummel solve followed by two_grid_step2.
TwoGridRun two_grid_run(int variant, const Mesh& coarse, const Mesh& fine,
                        const PnpCoefficients& coeffs, const RhsBundle& rhs,
                        const GummelConfig& cfg);

std::pair<PnpState, RunMetrics> two_grid_1(const Mesh& coarse, const Mesh& fine,
                                           const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                           const GummelConfig& cfg);
std::pair<PnpState, RunMetrics> two_grid_2(const Mesh& coarse, const Mesh& fine,
                                           const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                           const GummelConfig& cfg);
std::pair<PnpState, RunMetrics> two_grid_3(const Mesh& coarse, const Mesh& fine,
                                           const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                           const GummelConfig& cfg);

std::pair<PnpState, RunMetrics> solve(Algorithm alg, const Mesh* coarse, const Mesh& fine,
                                      const PnpCoefficients& coeffs, const RhsBundle& rhs,
                                      const GummelConfig& cfg);

// One a-priori error bound evaluated on concrete solutions: lhs <= C * rhs
// with the implied constant C = lhs / rhs.
struct TheoremBound {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 0.0;
    bool exact = false; // lhs is exactly zero
};

// Evaluates both sides of the two-grid error bounds for the given algorithm
// variant: the potential bound |phi_fem - phi_tg|_1 <= C sum_i ||p_fem^i -
// p_coarse^i||_0 and the concentration bound |p_fem^i - p_tg^i|_1 <= C * rhs,
// where rhs is the concentration gap (variant 1) or the potential gap
// |phi_fem - phi_coarse|_1 (variants 2, 3). All states must live on the fine
// mesh except coarse_state, which is transferred here.
std::vector<TheoremBound> verify_theorem_bounds(const PnpState& fem_state, const PnpState& tg_state,
                                                const PnpState& coarse_state, int variant);

// Relative residuals of the coupled discrete system evaluated at a state
// (potential equation with the state's own concentrations and vice versa).
// For a converged fixed point these are bounded by the outer tolerance scale.
struct CoupledResiduals {
    double poisson = 0.0;
    std::vector<double> species;
};
CoupledResiduals coupled_residuals(const PnpState& state, const PnpCoefficients& coeffs,
                                   const RhsBundle& rhs);

} // namespace pnp
