#include "pnp/pnp.h"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "errors.hpp"
#include "fem.hpp"
#include "manufactured.hpp"
#include "mesh.hpp"
#include "solvers.hpp"
#include "vtk.hpp"

// Handle definitions. States share mesh ownership so every handle can be
// destroyed independently and in any order.
struct pnp_mesh {
    std::shared_ptr<const pnp::Mesh> mesh;
};

struct pnp_case {
    pnp::PnpCoefficients coefficients;
    pnp::RhsBundle rhs;
    bool manufactured = false;
};

struct pnp_state {
    std::shared_ptr<const pnp::Mesh> mesh;
    pnp::PnpState state;
    bool manufactured = false;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
pnp_status guard(Fn&& fn) {
    try {
        fn();
        return PNP_OK;
    } catch (const pnp::CapacityError& e) {
        set_error(e.what());
        return PNP_ERR_CAPACITY;
    } catch (const pnp::SolverError& e) {
        set_error(e.what());
        return PNP_ERR_SOLVER_FAILURE;
    } catch (const pnp::IoError& e) {
        set_error(e.what());
        return PNP_ERR_IO;
    } catch (const std::domain_error& e) {
        set_error(e.what());
        return PNP_ERR_DOMAIN;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return PNP_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return PNP_ERR_INTERNAL;
    }
}

pnp::GummelConfig to_config(const pnp_solve_options* opt) {
    pnp::GummelConfig cfg;
    if (opt == nullptr) return cfg;
    cfg.tol = opt->tol;
    cfg.max_outer = opt->max_outer;
    cfg.damping = opt->damping;
    cfg.norm_kind = opt->coefficient_norm ? pnp::UpdateNorm::coefficient : pnp::UpdateNorm::fe_l2;
    cfg.linear_tol = opt->linear_tol;
    cfg.parallel_step2 = opt->parallel_step2 != 0;
    if (opt->dump_matrix_path != nullptr) cfg.dump_matrix_path = opt->dump_matrix_path;
    return cfg;
}

void fill_metrics(const pnp::RunMetrics& m, pnp_run_metrics* out) {
    if (out == nullptr) return;
    out->outer_iterations = m.outer_iterations;
    out->converged = m.converged ? 1 : 0;
    out->poisson_solves = m.poisson_solves;
    out->np_solves = m.np_solves;
    out->poisson_iterations = m.poisson_iterations;
    out->np_iterations = m.np_iterations;
    out->wall_time_seconds = m.wall_time_seconds;
    out->final_update_norm = m.final_update_norm;
    out->poisson_residual = m.poisson_residual;
    out->np_residual = m.np_residual;
    out->min_concentration = m.min_concentration;
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// key = value problem description; '#' starts a comment. Unknown keys are
// rejected so typos do not silently fall back to defaults.
pnp_case parse_case_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pnp::IoError("cannot open config file " + path);

    pnp_case c;
    c.manufactured = false;
    pnp::PnpCoefficients& k = c.coefficients;
    k.n_species = 2;
    k.diffusion.assign(2, pnp::RegionValue(1.0));
    k.charge = {1.0, -1.0};
    k.bulk = {0.0, 0.0};

    auto resize_species = [&](int n) {
        require(n >= 1 && n <= 16, "config: n_species out of range [1,16]");
        k.n_species = n;
        k.diffusion.resize(static_cast<std::size_t>(n), pnp::RegionValue(1.0));
        k.charge.resize(static_cast<std::size_t>(n), 0.0);
        k.bulk.resize(static_cast<std::size_t>(n), 0.0);
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        std::istringstream vs(value);
        auto bad = [&]() {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad value for " + key);
        };
        auto read_double = [&]() {
            double d = 0;
            if (!(vs >> d)) bad();
            return d;
        };

        if (key == "n_species") {
            int n = 0;
            if (!(vs >> n)) bad();
            resize_species(n);
        } else if (key == "beta") {
            k.beta = read_double();
        } else if (key == "eps") {
            k.eps = pnp::RegionValue(read_double());
        } else if (key == "eps_solute") {
            k.eps.solute = read_double();
        } else if (key == "eps_solvent") {
            k.eps.solvent = read_double();
        } else if (key == "b2_sign") {
            k.b2_sign = read_double();
        } else if (key == "charge") {
            pnp::PointCharge q;
            if (!(vs >> q.magnitude >> q.location[0] >> q.location[1] >> q.location[2])) bad();
            k.fixed_charges.push_back(q);
        } else if (key.size() > 1 && (key[0] == 'd' || key[0] == 'q') && std::isdigit(key[1])) {
            const int idx = std::stoi(key.substr(1));
            require(idx >= 1 && idx <= k.n_species, "config: species index out of range");
            if (key[0] == 'd')
                k.diffusion[static_cast<std::size_t>(idx - 1)] = pnp::RegionValue(read_double());
            else
                k.charge[static_cast<std::size_t>(idx - 1)] = read_double();
        } else if (key.rfind("bulk", 0) == 0 && key.size() > 4) {
            const int idx = std::stoi(key.substr(4));
            require(idx >= 1 && idx <= k.n_species, "config: species index out of range");
            k.bulk[static_cast<std::size_t>(idx - 1)] = read_double();
        } else {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    k.validate();
    c.rhs.use_point_charges = true;
    return c;
}

} // namespace

extern "C" {

const char* pnp_last_error(void) { return g_last_error.c_str(); }

const char* pnp_status_name(pnp_status status) {
    switch (status) {
        case PNP_OK: return "ok";
        case PNP_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PNP_ERR_CAPACITY: return "capacity limit";
        case PNP_ERR_DOMAIN: return "outside domain";
        case PNP_ERR_SOLVER_FAILURE: return "solver failure";
        case PNP_ERR_IO: return "io error";
        case PNP_ERR_UNSUPPORTED: return "unsupported";
        case PNP_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

pnp_status pnp_mesh_create_box(int level, pnp_mesh** out) {
    return guard([&] {
        require(out != nullptr, "out must not be NULL");
        auto m = std::make_shared<pnp::Mesh>(pnp::Mesh::unit_box(level));
        *out = new pnp_mesh{std::move(m)};
    });
}

void pnp_mesh_destroy(pnp_mesh* mesh) { delete mesh; }

int pnp_mesh_level(const pnp_mesh* mesh) { return mesh ? mesh->mesh->level() : -1; }
double pnp_mesh_h(const pnp_mesh* mesh) { return mesh ? mesh->mesh->h() : 0.0; }
int pnp_mesh_vertex_count(const pnp_mesh* mesh) { return mesh ? mesh->mesh->vertex_count() : 0; }
int pnp_mesh_tet_count(const pnp_mesh* mesh) { return mesh ? mesh->mesh->tet_count() : 0; }

pnp_status pnp_mesh_write_vtk(const pnp_mesh* mesh, const char* path) {
    return guard([&] {
        require(mesh != nullptr && path != nullptr, "mesh and path must not be NULL");
        pnp::write_vtk(*mesh->mesh, path);
    });
}

pnp_status pnp_case_create_manufactured(pnp_case** out) {
    return guard([&] {
        require(out != nullptr, "out must not be NULL");
        const pnp::ManufacturedCase mc = pnp::manufactured_case();
        auto* c = new pnp_case;
        c->coefficients = mc.coefficients;
        c->rhs = mc.rhs();
        c->manufactured = true;
        *out = c;
    });
}

pnp_status pnp_case_create_from_config(const char* path, pnp_case** out) {
    return guard([&] {
        require(out != nullptr && path != nullptr, "path and out must not be NULL");
        *out = new pnp_case(parse_case_config(path));
    });
}

void pnp_case_destroy(pnp_case* c) { delete c; }

int pnp_case_species_count(const pnp_case* c) { return c ? c->coefficients.n_species : 0; }
int pnp_case_is_manufactured(const pnp_case* c) { return (c && c->manufactured) ? 1 : 0; }

void pnp_solve_options_init(pnp_solve_options* opt) {
    if (opt == nullptr) return;
    opt->tol = 1e-5;
    opt->max_outer = 200;
    opt->damping = 1.0;
    opt->coefficient_norm = 0;
    opt->linear_tol = 1e-10;
    opt->parallel_step2 = 0;
    opt->dump_matrix_path = nullptr;
}

pnp_status pnp_solve(pnp_algorithm algorithm, const pnp_mesh* coarse, const pnp_mesh* fine,
                     const pnp_case* problem, const pnp_solve_options* options,
                     pnp_state** out_state, pnp_run_metrics* out_metrics) {
    return guard([&] {
        require(fine != nullptr && problem != nullptr && out_state != nullptr,
                "fine mesh, case and out_state must not be NULL");
        require(algorithm >= PNP_ALG_GUMMEL && algorithm <= PNP_ALG_TG3, "unknown algorithm");
        require(algorithm == PNP_ALG_GUMMEL || coarse != nullptr,
                "two-grid algorithms need a coarse mesh");
        const pnp::GummelConfig cfg = to_config(options);
        const pnp::Algorithm alg = static_cast<pnp::Algorithm>(algorithm);
        auto [st, metrics] =
            pnp::solve(alg, coarse ? coarse->mesh.get() : nullptr, *fine->mesh,
                       problem->coefficients, problem->rhs, cfg);
        auto* s = new pnp_state;
        s->mesh = fine->mesh;
        s->state = std::move(st);
        s->manufactured = problem->manufactured;
        *out_state = s;
        fill_metrics(metrics, out_metrics);
    });
}

void pnp_state_destroy(pnp_state* state) { delete state; }

int pnp_state_species_count(const pnp_state* state) {
    return state ? static_cast<int>(state->state.p.size()) : 0;
}

pnp_status pnp_state_field(const pnp_state* state, int field, const double** out_data,
                           int* out_len) {
    return guard([&] {
        require(state != nullptr && out_data != nullptr && out_len != nullptr,
                "state and out pointers must not be NULL");
        const int ns = static_cast<int>(state->state.p.size());
        require(field >= 0 && field <= ns, "field index out of range");
        const std::vector<double>& c =
            field == 0 ? state->state.phi.coeffs : state->state.p[static_cast<std::size_t>(field - 1)].coeffs;
        *out_data = c.data();
        *out_len = static_cast<int>(c.size());
    });
}

pnp_status pnp_state_errors(const pnp_state* state, double* out_l2, double* out_h1) {
    return guard([&] {
        require(state != nullptr && out_l2 != nullptr && out_h1 != nullptr,
                "state and out pointers must not be NULL");
        if (!state->manufactured)
            throw std::invalid_argument("errors are only defined for the manufactured case");
        const pnp::ManufacturedCase mc = pnp::manufactured_case();
        for (int f = 0; f < 3; ++f) {
            const pnp::FeFunction& u =
                f == 0 ? state->state.phi : state->state.p[static_cast<std::size_t>(f - 1)];
            out_l2[f] = pnp::error_l2(u, mc.exact(f));
            out_h1[f] = pnp::error_h1(u, mc.exact(f), mc.grad(f));
        }
    });
}

pnp_status pnp_state_write_vtk(const pnp_state* state, const char* path) {
    return guard([&] {
        require(state != nullptr && path != nullptr, "state and path must not be NULL");
        std::vector<std::pair<std::string, std::span<const double>>> fields;
        fields.emplace_back("phi", state->state.phi.coeffs);
        for (std::size_t i = 0; i < state->state.p.size(); ++i)
            fields.emplace_back("p" + std::to_string(i + 1), state->state.p[i].coeffs);
        pnp::write_vtk(*state->mesh, path, fields);
    });
}

pnp_status pnp_verify_bounds(const pnp_mesh* coarse, const pnp_mesh* fine, const pnp_case* problem,
                             const pnp_solve_options* options, pnp_bound_entry* entries,
                             int* out_count) {
    return guard([&] {
        require(coarse != nullptr && fine != nullptr && problem != nullptr && entries != nullptr &&
                    out_count != nullptr,
                "all arguments must not be NULL");
        const pnp::GummelConfig cfg = to_config(options);
        auto [fem_state, fem_metrics] =
            pnp::gummel_solve(*fine->mesh, problem->coefficients, problem->rhs, cfg);
        auto [coarse_state, coarse_metrics] =
            pnp::gummel_solve(*coarse->mesh, problem->coefficients, problem->rhs, cfg);
        int count = 0;
        for (int variant = 1; variant <= 2; ++variant) {
            auto [tg_state, tg_metrics] = pnp::two_grid_step2(variant, coarse_state, *fine->mesh,
                                                              problem->coefficients, problem->rhs, cfg);
            for (const pnp::TheoremBound& b :
                 pnp::verify_theorem_bounds(fem_state, tg_state, coarse_state, variant)) {
                pnp_bound_entry& e = entries[count++];
                std::snprintf(e.name, sizeof(e.name), "%s", b.name.c_str());
                e.lhs = b.lhs;
                e.rhs = b.rhs;
                e.constant = b.constant;
                e.exact = b.exact ? 1 : 0;
            }
        }
        *out_count = count;
    });
}

} // extern "C"
