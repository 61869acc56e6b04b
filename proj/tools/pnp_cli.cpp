// Command-line driver for the PNP two-grid solver. Talks to the solver
// exclusively through the shared library's C interface.
#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnp/pnp.h"
#include "report_util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

struct MeshHandle {
    pnp_mesh* m = nullptr;
    ~MeshHandle() { pnp_mesh_destroy(m); }
};
struct CaseHandle {
    pnp_case* c = nullptr;
    ~CaseHandle() { pnp_case_destroy(c); }
};
struct StateHandle {
    pnp_state* s = nullptr;
    ~StateHandle() { pnp_state_destroy(s); }
};

struct CommonOptions {
    double tol = 1e-5;
    int max_outer = 200;
    double damping = 1.0;
    bool coefficient_norm = false;
    bool parallel_step2 = false;
    std::string dump_matrix;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--tol", tol, "outer stopping tolerance on the potential update");
        cmd->add_option("--max-outer", max_outer, "outer iteration cap");
        cmd->add_option("--damping", damping, "concentration under-relaxation factor in (0,1]");
        cmd->add_flag("--coefficient-norm", coefficient_norm,
                      "use the plain coefficient norm for the stopping test");
        cmd->add_flag("--parallel-step2", parallel_step2,
                      "run the fully decoupled fine-grid solves concurrently (tg2)");
        cmd->add_option("--dump-matrix", dump_matrix,
                        "MatrixMarket dump of the last assembled Poisson system");
    }

    pnp_solve_options to_options() const {
        pnp_solve_options o;
        pnp_solve_options_init(&o);
        o.tol = tol;
        o.max_outer = max_outer;
        o.damping = damping;
        o.coefficient_norm = coefficient_norm ? 1 : 0;
        o.parallel_step2 = parallel_step2 ? 1 : 0;
        o.dump_matrix_path = dump_matrix.empty() ? nullptr : dump_matrix.c_str();
        return o;
    }
};

const std::map<std::string, pnp_algorithm> kAlgorithms = {
    {"fem-gummel", PNP_ALG_GUMMEL},
    {"tg1", PNP_ALG_TG1},
    {"tg2", PNP_ALG_TG2},
    {"tg3", PNP_ALG_TG3},
};

int fail(pnp_status st, const char* what) {
    std::fprintf(stderr, "error: %s: %s (%s)\n", what, pnp_last_error(), pnp_status_name(st));
    return st == PNP_ERR_INVALID_ARGUMENT || st == PNP_ERR_IO ? kExitUsage : kExitNoConvergence;
}

bool make_case(const std::string& spec, CaseHandle& out, int& exit_code) {
    const pnp_status st = spec == "manufactured" ? pnp_case_create_manufactured(&out.c)
                                                 : pnp_case_create_from_config(spec.c_str(), &out.c);
    if (st != PNP_OK) {
        exit_code = fail(st, "case setup");
        return false;
    }
    return true;
}

// Writes `text` to the path, or to stdout when the path is empty.
bool write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return true;
    }
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        std::fprintf(stderr, "error: cannot open %s for writing\n", path.c_str());
        return false;
    }
    std::fputs(text.c_str(), f);
    std::fclose(f);
    return true;
}

const char* field_name(int f) { return f == 0 ? "phi" : (f == 1 ? "p1" : "p2"); }

std::string metrics_text(const pnp_run_metrics& m) {
    std::string s;
    s += "outer iterations: " + std::to_string(m.outer_iterations) +
         (m.converged ? " (converged)" : " (NOT converged)") + "\n";
    s += "linear solves: " + std::to_string(m.poisson_solves) + " poisson (" +
         std::to_string(m.poisson_iterations) + " iters), " + std::to_string(m.np_solves) +
         " species (" + std::to_string(m.np_iterations) + " iters)\n";
    s += "final update norm: " + pnpcli::sci3(m.final_update_norm) + "\n";
    s += "solved-system residuals: poisson " + pnpcli::sci3(m.poisson_residual) + ", species " +
         pnpcli::sci3(m.np_residual) + "\n";
    s += "min concentration: " + pnpcli::sci3(m.min_concentration) + "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "wall time: %.3f s\n", m.wall_time_seconds);
    s += buf;
    return s;
}

struct SolveArgs {
    std::string alg = "fem-gummel";
    int fine_level = -1;
    int coarse_level = -1;
    std::string case_spec = "manufactured";
    std::string format = "table";
    std::string out_path;
    CommonOptions common;
};

int run_solve(const SolveArgs& a) {
    const pnp_algorithm alg = kAlgorithms.at(a.alg);
    const bool two_grid = alg != PNP_ALG_GUMMEL;
    if (two_grid && a.coarse_level < 0) {
        std::fprintf(stderr, "error: %s requires --coarse-level\n", a.alg.c_str());
        return kExitUsage;
    }

    MeshHandle fine, coarse;
    pnp_status st = pnp_mesh_create_box(a.fine_level, &fine.m);
    if (st != PNP_OK) return fail(st, "fine mesh");
    if (two_grid) {
        st = pnp_mesh_create_box(a.coarse_level, &coarse.m);
        if (st != PNP_OK) return fail(st, "coarse mesh");
    }
    CaseHandle problem;
    int code = kExitOk;
    if (!make_case(a.case_spec, problem, code)) return code;

    const pnp_solve_options opts = a.common.to_options();
    StateHandle state;
    pnp_run_metrics metrics{};
    st = pnp_solve(alg, two_grid ? coarse.m : nullptr, fine.m, problem.c, &opts, &state.s, &metrics);
    if (st != PNP_OK) return fail(st, "solve");

    const bool manufactured = pnp_case_is_manufactured(problem.c) != 0;
    double l2[3] = {0, 0, 0}, h1[3] = {0, 0, 0};
    if (manufactured) {
        st = pnp_state_errors(state.s, l2, h1);
        if (st != PNP_OK) return fail(st, "error evaluation");
    }

    if (a.format == "vtk") {
        const std::string path = a.out_path.empty() ? "solution.vtk" : a.out_path;
        st = pnp_state_write_vtk(state.s, path.c_str());
        if (st != PNP_OK) return fail(st, "vtk export");
        std::fprintf(stderr, "wrote %s\n", path.c_str());
        std::fputs(metrics_text(metrics).c_str(), stdout);
    } else if (a.format == "csv") {
        if (!manufactured) {
            std::fprintf(stderr, "error: csv output needs the manufactured case (no exact solution)\n");
            return kExitUsage;
        }
        std::string text = std::string(pnpcli::kCsvHeader) + "\n";
        const std::string H = two_grid ? pnpcli::num(1.0 / (1 << a.coarse_level)) : "";
        const std::string h = pnpcli::num(1.0 / (1 << a.fine_level));
        for (int f = 0; f < 3; ++f) {
            text += pnpcli::csv_row(a.alg, H, h, field_name(f), "L2", l2[f], "") + "\n";
            text += pnpcli::csv_row(a.alg, H, h, field_name(f), "H1", h1[f], "") + "\n";
        }
        if (!write_output(a.out_path, text)) return kExitUsage;
    } else {
        std::string text = "algorithm: " + a.alg + "\n";
        if (two_grid) text += "coarse mesh: H = " + pnpcli::h_string(a.coarse_level) + "\n";
        text += "fine mesh: h = " + pnpcli::h_string(a.fine_level) + " (" +
                std::to_string(pnp_mesh_vertex_count(fine.m)) + " vertices, " +
                std::to_string(pnp_mesh_tet_count(fine.m)) + " tets)\n";
        if (manufactured) {
            text += "field        L2          H1\n";
            for (int f = 0; f < 3; ++f) {
                char row[96];
                std::snprintf(row, sizeof row, "%-10s %-11s %-11s\n", field_name(f),
                              pnpcli::sci3(l2[f]).c_str(), pnpcli::sci3(h1[f]).c_str());
                text += row;
            }
        }
        text += metrics_text(metrics);
        if (!write_output(a.out_path, text)) return kExitUsage;
    }
    return metrics.converged ? kExitOk : kExitNoConvergence;
}

struct ConvergenceArgs {
    std::string alg = "fem-gummel";
    std::vector<int> levels;
    std::string pairing = "h=H2";
    int coarse_level = -1;
    std::string case_spec = "manufactured";
    std::string format = "table";
    std::string out_path;
    CommonOptions common;
};

std::optional<int> coarse_for(const ConvergenceArgs& a, int fine_level) {
    if (kAlgorithms.at(a.alg) == PNP_ALG_GUMMEL) return std::nullopt;
    if (a.pairing == "h=H") return fine_level;
    if (a.pairing == "fixed-H") return a.coarse_level;
    return fine_level / 2; // h = H^2 on dyadic levels
}

int run_convergence(const ConvergenceArgs& a) {
    if (a.levels.size() < 2) {
        std::fprintf(stderr, "error: need at least two levels\n");
        return kExitUsage;
    }
    if (!std::is_sorted(a.levels.begin(), a.levels.end()) ||
        std::adjacent_find(a.levels.begin(), a.levels.end()) != a.levels.end()) {
        std::fprintf(stderr, "error: levels must be strictly ascending\n");
        return kExitUsage;
    }
    const bool two_grid = kAlgorithms.at(a.alg) != PNP_ALG_GUMMEL;
    if (two_grid && a.pairing == "fixed-H" && a.coarse_level < 0) {
        std::fprintf(stderr, "error: fixed-H pairing requires --coarse-level\n");
        return kExitUsage;
    }
    if (two_grid && a.pairing == "h=H2")
        for (int lv : a.levels)
            if (lv % 2 != 0) {
                std::fprintf(stderr, "error: h=H2 pairing needs even fine levels (h=2^-L, H=2^-L/2)\n");
                return kExitUsage;
            }
    if (a.case_spec != "manufactured") {
        std::fprintf(stderr, "error: convergence study needs the manufactured case\n");
        return kExitUsage;
    }

    CaseHandle problem;
    int code = kExitOk;
    if (!make_case(a.case_spec, problem, code)) return code;
    const pnp_solve_options opts = a.common.to_options();

    struct Row {
        int level;
        std::optional<int> coarse;
        double l2[3], h1[3];
    };
    std::vector<Row> rows;
    bool all_converged = true;
    for (int lv : a.levels) {
        Row r;
        r.level = lv;
        r.coarse = coarse_for(a, lv);
        MeshHandle fine, coarse;
        pnp_status st = pnp_mesh_create_box(lv, &fine.m);
        if (st != PNP_OK) return fail(st, "fine mesh");
        if (r.coarse) {
            st = pnp_mesh_create_box(*r.coarse, &coarse.m);
            if (st != PNP_OK) return fail(st, "coarse mesh");
        }
        StateHandle state;
        pnp_run_metrics metrics{};
        st = pnp_solve(kAlgorithms.at(a.alg), r.coarse ? coarse.m : nullptr, fine.m, problem.c,
                       &opts, &state.s, &metrics);
        if (st != PNP_OK) return fail(st, "solve");
        all_converged = all_converged && metrics.converged;
        st = pnp_state_errors(state.s, r.l2, r.h1);
        if (st != PNP_OK) return fail(st, "error evaluation");
        rows.push_back(r);
    }

    // per-interval observed orders, attached to the finer row
    auto order_at = [&](std::size_t i, int field, bool h1norm) -> std::optional<double> {
        if (i == 0) return std::nullopt;
        const double hc = 1.0 / (1 << rows[i - 1].level);
        const double hf = 1.0 / (1 << rows[i].level);
        const double ec = h1norm ? rows[i - 1].h1[field] : rows[i - 1].l2[field];
        const double ef = h1norm ? rows[i].h1[field] : rows[i].l2[field];
        return pnpcli::observed_order(ec, ef, hc, hf);
    };

    std::string text;
    if (a.format == "csv") {
        text += std::string(pnpcli::kCsvHeader) + "\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            const std::string H = r.coarse ? pnpcli::num(1.0 / (1 << *r.coarse)) : "";
            const std::string h = pnpcli::num(1.0 / (1 << r.level));
            for (int f = 0; f < 3; ++f)
                for (int n = 0; n < 2; ++n) {
                    const bool h1norm = n == 1;
                    const auto ord = order_at(i, f, h1norm);
                    text += pnpcli::csv_row(a.alg, H, h, field_name(f), h1norm ? "H1" : "L2",
                                            h1norm ? r.h1[f] : r.l2[f],
                                            ord ? pnpcli::num(*ord) : "") +
                            "\n";
                }
        }
    } else {
        text += "algorithm: " + a.alg + (two_grid ? "  (pairing " + a.pairing + ")" : "") + "\n";
        text += "h        H        field  L2          order   H1          order\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            for (int f = 0; f < 3; ++f) {
                const auto o2 = order_at(i, f, false);
                const auto o1 = order_at(i, f, true);
                char row[160];
                std::snprintf(row, sizeof row, "%-8s %-8s %-6s %-11s %-7s %-11s %-7s\n",
                              pnpcli::h_string(r.level).c_str(),
                              r.coarse ? pnpcli::h_string(*r.coarse).c_str() : "-", field_name(f),
                              pnpcli::sci3(r.l2[f]).c_str(),
                              o2 ? pnpcli::num(*o2).substr(0, 5).c_str() : "-",
                              pnpcli::sci3(r.h1[f]).c_str(),
                              o1 ? pnpcli::num(*o1).substr(0, 5).c_str() : "-");
                text += row;
            }
        }
    }

    // verdict on the potential field: H1 orders ~1, L2 orders ~2
    bool h1_ok = true, l2_ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double oh1 = *order_at(i, 0, true);
        const double ol2 = *order_at(i, 0, false);
        h1_ok = h1_ok && oh1 >= 0.85 && oh1 <= 1.15;
        l2_ok = l2_ok && ol2 >= 1.8 && ol2 <= 2.2;
    }
    if (a.format != "csv") {
        text += std::string("potential H1 orders in [0.85,1.15]: ") + (h1_ok ? "PASS" : "FAIL") + "\n";
        text += std::string("potential L2 orders in [1.8,2.2]: ") + (l2_ok ? "PASS" : "FAIL") + "\n";
    }
    if (!write_output(a.out_path, text)) return kExitUsage;
    return all_converged ? kExitOk : kExitNoConvergence;
}

struct VerifyArgs {
    std::string pairs = "1:2,2:4";
    std::string case_spec = "manufactured";
    CommonOptions common;
};

int run_verify(const VerifyArgs& a) {
    std::vector<std::pair<int, int>> pairs;
    {
        std::string s = a.pairs;
        std::size_t pos = 0;
        while (pos < s.size()) {
            const std::size_t comma = s.find(',', pos);
            const std::string item = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
            const std::size_t colon = item.find(':');
            if (colon == std::string::npos) {
                std::fprintf(stderr, "error: bad pair '%s' (expected H-level:h-level)\n", item.c_str());
                return kExitUsage;
            }
            try {
                pairs.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: bad pair '%s'\n", item.c_str());
                return kExitUsage;
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    if (pairs.empty()) {
        std::fprintf(stderr, "error: no level pairs given\n");
        return kExitUsage;
    }

    CaseHandle problem;
    int code = kExitOk;
    if (!make_case(a.case_spec, problem, code)) return code;
    const pnp_solve_options opts = a.common.to_options();

    // constants below this are indistinguishable from solver noise
    constexpr double kExactThreshold = 1e-6;
    std::map<std::string, std::vector<double>> sequences;
    std::printf("pair       bound                 lhs          rhs          C\n");
    for (const auto& [cl, fl] : pairs) {
        MeshHandle coarse, fine;
        pnp_status st = pnp_mesh_create_box(cl, &coarse.m);
        if (st != PNP_OK) return fail(st, "coarse mesh");
        st = pnp_mesh_create_box(fl, &fine.m);
        if (st != PNP_OK) return fail(st, "fine mesh");
        pnp_bound_entry entries[4];
        int count = 0;
        st = pnp_verify_bounds(coarse.m, fine.m, problem.c, &opts, entries, &count);
        if (st != PNP_OK) return fail(st, "bound verification");
        for (int i = 0; i < count; ++i) {
            const pnp_bound_entry& e = entries[i];
            const bool exact = e.exact || e.lhs < kExactThreshold;
            std::printf("%4s:%-4s  %-20s  %-11s  %-11s  %s\n", pnpcli::h_string(cl).c_str(),
                        pnpcli::h_string(fl).c_str(), e.name, pnpcli::sci3(e.lhs).c_str(),
                        pnpcli::sci3(e.rhs).c_str(),
                        exact ? "exact" : pnpcli::num(e.constant).c_str());
            if (!exact) sequences[e.name].push_back(e.constant);
        }
    }

    bool all_bounded = true;
    for (const auto& [name, cs] : sequences) {
        const double lo = *std::min_element(cs.begin(), cs.end());
        const double hi = *std::max_element(cs.begin(), cs.end());
        const double ratio = lo > 0.0 ? hi / lo : 1.0;
        const bool ok = ratio < 5.0;
        all_bounded = all_bounded && ok;
        std::printf("%-20s  C in [%s, %s], max/min = %.3g: %s\n", name.c_str(),
                    pnpcli::sci3(lo).c_str(), pnpcli::sci3(hi).c_str(), ratio, ok ? "bounded" : "UNBOUNDED");
    }
    return all_bounded ? kExitOk : kExitNoConvergence;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite element solver for the steady-state Poisson-Nernst-Planck system on the "
                 "unit box: coupled Gummel iteration plus three two-grid decoupling algorithms"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve_cmd = app.add_subcommand("solve", "run one algorithm and report errors/metrics");
    solve_cmd->add_option("--alg", solve_args.alg, "fem-gummel | tg1 | tg2 | tg3")
        ->check(CLI::IsMember({"fem-gummel", "tg1", "tg2", "tg3"}));
    solve_cmd->add_option("--fine-level", solve_args.fine_level, "fine mesh level (h = 2^-L)")
        ->required();
    solve_cmd->add_option("--coarse-level", solve_args.coarse_level,
                          "coarse mesh level (two-grid only)");
    solve_cmd->add_option("--case", solve_args.case_spec, "manufactured | path to key=value config");
    solve_cmd->add_option("--format", solve_args.format, "table | csv | vtk")
        ->check(CLI::IsMember({"table", "csv", "vtk"}));
    solve_cmd->add_option("--out", solve_args.out_path, "output path (default: stdout / solution.vtk)");
    solve_args.common.add_flags(solve_cmd);

    ConvergenceArgs conv_args;
    CLI::App* conv_cmd = app.add_subcommand("convergence", "error table across mesh levels");
    conv_cmd->add_option("--alg", conv_args.alg, "fem-gummel | tg1 | tg2 | tg3")
        ->check(CLI::IsMember({"fem-gummel", "tg1", "tg2", "tg3"}));
    conv_cmd->add_option("--levels", conv_args.levels, "ascending fine levels, e.g. 2,3,4")
        ->required()
        ->delimiter(',');
    conv_cmd->add_option("--pairing", conv_args.pairing, "h=H2 | h=H | fixed-H (two-grid)")
        ->check(CLI::IsMember({"h=H2", "h=H", "fixed-H"}));
    conv_cmd->add_option("--coarse-level", conv_args.coarse_level, "coarse level for fixed-H");
    conv_cmd->add_option("--case", conv_args.case_spec, "manufactured");
    conv_cmd->add_option("--format", conv_args.format, "table | csv")
        ->check(CLI::IsMember({"table", "csv"}));
    conv_cmd->add_option("--out", conv_args.out_path, "output path (default: stdout)");
    conv_args.common.add_flags(conv_cmd);

    VerifyArgs verify_args;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "evaluate the two-grid error bounds across level pairs");
    verify_cmd->add_option("--pairs", verify_args.pairs, "H-level:h-level list, e.g. 1:2,2:4");
    verify_cmd->add_option("--case", verify_args.case_spec, "manufactured | config path");
    verify_args.common.add_flags(verify_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(solve_args);
        if (conv_cmd->parsed()) return run_convergence(conv_args);
        if (verify_cmd->parsed()) return run_verify(verify_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNoConvergence;
    }
    return kExitUsage;
}
