/* Public C interface of the PNP two-grid finite element solver.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return pnp_status; on failure pnp_last_error() carries a
 * human-readable message for the calling thread. */
#ifndef PNP_H
#define PNP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PNP_API __declspec(dllexport)
#else
#define PNP_API __attribute__((visibility("default")))
#endif

typedef enum pnp_status {
    PNP_OK = 0,
    PNP_ERR_INVALID_ARGUMENT = 1,
    PNP_ERR_CAPACITY = 2,         /* resource guard hit (mesh level too high) */
    PNP_ERR_DOMAIN = 3,           /* point or charge outside the domain */
    PNP_ERR_SOLVER_FAILURE = 4,   /* inner linear solver failed */
    PNP_ERR_IO = 5,
    PNP_ERR_UNSUPPORTED = 6,      /* operation not defined for this object */
    PNP_ERR_INTERNAL = 7
} pnp_status;

typedef enum pnp_algorithm {
    PNP_ALG_GUMMEL = 0, /* coupled fixed-point iteration on one mesh */
    PNP_ALG_TG1 = 1,    /* coarse solve, then fine Poisson -> fine species */
    PNP_ALG_TG2 = 2,    /* coarse solve, then independent fine solves */
    PNP_ALG_TG3 = 3     /* coarse solve, then fine species -> fine Poisson */
} pnp_algorithm;

typedef struct pnp_mesh pnp_mesh;
typedef struct pnp_case pnp_case;
typedef struct pnp_state pnp_state;

/* Message describing the most recent failure on this thread. */
PNP_API const char* pnp_last_error(void);
PNP_API const char* pnp_status_name(pnp_status status);

/* --- meshes --------------------------------------------------------------- */

/* Structured tetrahedral mesh of [0,1]^3 with mesh size 2^-level. */
PNP_API pnp_status pnp_mesh_create_box(int level, pnp_mesh** out);
PNP_API void pnp_mesh_destroy(pnp_mesh* mesh);
PNP_API int pnp_mesh_level(const pnp_mesh* mesh);
PNP_API double pnp_mesh_h(const pnp_mesh* mesh);
PNP_API int pnp_mesh_vertex_count(const pnp_mesh* mesh);
PNP_API int pnp_mesh_tet_count(const pnp_mesh* mesh);
/* Legacy ASCII VTK export of the bare mesh. */
PNP_API pnp_status pnp_mesh_write_vtk(const pnp_mesh* mesh, const char* path);

/* --- problem cases --------------------------------------------------------- */

/* Built-in smooth reference problem with known exact solution. */
PNP_API pnp_status pnp_case_create_manufactured(pnp_case** out);
/* Key=value config file: species data, dielectric, beta, bulk values and
 * point charges. The right-hand side is the point-charge functional. */
PNP_API pnp_status pnp_case_create_from_config(const char* path, pnp_case** out);
PNP_API void pnp_case_destroy(pnp_case* c);
PNP_API int pnp_case_species_count(const pnp_case* c);
PNP_API int pnp_case_is_manufactured(const pnp_case* c);

/* --- solving ---------------------------------------------------------------- */

typedef struct pnp_solve_options {
    double tol;              /* outer stopping tolerance, default 1e-5 */
    int max_outer;           /* default 200 */
    double damping;          /* concentration under-relaxation in (0,1], default 1 */
    int coefficient_norm;    /* 0: FE L2 update norm (default), 1: coefficient norm */
    double linear_tol;       /* Krylov relative tolerance, default 1e-10 */
    int parallel_step2;      /* run the fully decoupled fine solves concurrently */
    const char* dump_matrix_path; /* MatrixMarket dump of the last Poisson system, or NULL */
} pnp_solve_options;

PNP_API void pnp_solve_options_init(pnp_solve_options* opt);

typedef struct pnp_run_metrics {
    int outer_iterations;
    int converged;
    int poisson_solves;
    int np_solves;
    long poisson_iterations;
    long np_iterations;
    double wall_time_seconds;
    double final_update_norm;
    double poisson_residual; /* final solved-system relative residuals */
    double np_residual;
    double min_concentration;
} pnp_run_metrics;

/* Runs one algorithm. `coarse` must be NULL for PNP_ALG_GUMMEL and non-NULL
 * (with coarse level <= fine level) otherwise. A run that stops at max_outer
 * returns PNP_OK with metrics->converged = 0. */
PNP_API pnp_status pnp_solve(pnp_algorithm algorithm, const pnp_mesh* coarse, const pnp_mesh* fine,
                             const pnp_case* problem, const pnp_solve_options* options,
                             pnp_state** out_state, pnp_run_metrics* out_metrics);

/* --- states ------------------------------------------------------------------ */

PNP_API void pnp_state_destroy(pnp_state* state);
PNP_API int pnp_state_species_count(const pnp_state* state);
/* field 0 is the potential, fields 1..n the concentrations. The pointer stays
 * valid until the state is destroyed. */
PNP_API pnp_status pnp_state_field(const pnp_state* state, int field, const double** out_data,
                                   int* out_len);
/* L2 and H1 errors against the exact manufactured fields, length 3 each
 * (potential, species 1, species 2). Fails for config-file cases. */
PNP_API pnp_status pnp_state_errors(const pnp_state* state, double* out_l2, double* out_h1);
/* VTK export of all solution fields on the state's mesh. */
PNP_API pnp_status pnp_state_write_vtk(const pnp_state* state, const char* path);

/* --- two-grid error bounds ----------------------------------------------------- */

typedef struct pnp_bound_entry {
    char name[32]; /* "tg1-potential", "tg1-concentration", ... */
    double lhs;
    double rhs;
    double constant;
    int exact; /* lhs is exactly zero */
} pnp_bound_entry;

/* Runs the fine-grid Gummel reference plus the two-grid variants 1 and 2 on
 * one (coarse, fine) pair and evaluates both sides of the a-priori error
 * bounds. `entries` must have room for 4 results. */
PNP_API pnp_status pnp_verify_bounds(const pnp_mesh* coarse, const pnp_mesh* fine,
                                     const pnp_case* problem, const pnp_solve_options* options,
                                     pnp_bound_entry* entries, int* out_count);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PNP_H */
