/* asparent C API: parent-Hamiltonian construction and adiabatic
 * state-preparation analysis behind opaque handles and status codes.
 *
 * Every function returning asp_status leaves a human-readable message for the
 * calling thread in asp_last_error() on failure. Handles returned through
 * out-parameters are owned by the caller and released with the matching
 * *_free function. All functions tolerate NULL out-parameters they document
 * as optional; required arguments are checked and reported as
 * ASP_ERR_INVALID_ARGUMENT.
 */
#ifndef ASPARENT_ASPARENT_H
#define ASPARENT_ASPARENT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asp_status {
  ASP_OK = 0,
  ASP_ERR_INVALID_ARGUMENT = 1,
  ASP_ERR_PARSE = 2,
  ASP_ERR_IO = 3,
  ASP_ERR_DIMENSION_MISMATCH = 4,
  ASP_ERR_DENSE_LIMIT = 5,
  ASP_ERR_EMPTY_KERNEL = 6,
  ASP_ERR_UNKNOWN_NAME = 7,
  ASP_ERR_NUMERIC = 8,
  ASP_ERR_INTERNAL = 9
} asp_status;

const char* asp_version(void);
const char* asp_status_name(asp_status status);

/* Message describing the most recent failure on this thread. */
const char* asp_last_error(void);

/* Frees strings returned through char** out-parameters. */
void asp_string_free(char* text);

/* ---- Hamiltonians ------------------------------------------------------ */

typedef struct asp_hamiltonian asp_hamiltonian;

/* format: "pauli-text", "json", or NULL/"auto" (by file extension). */
asp_status asp_hamiltonian_load(const char* path, const char* format,
                                asp_hamiltonian** out);
asp_status asp_hamiltonian_save(const asp_hamiltonian* hamiltonian,
                                const char* path, const char* format);
asp_status asp_hamiltonian_parse_text(const char* text, asp_hamiltonian** out);

/* Bundled analytic systems. `initial` (baseline Hamiltonian) and `info_json`
 * (name, description, trial specs, orbital energies) are optional. */
asp_status asp_builtin_system(const char* name, asp_hamiltonian** target,
                              asp_hamiltonian** initial, char** info_json);

asp_status asp_hamiltonian_from_fock(const double* orbital_energies,
                                     size_t count, asp_hamiltonian** out);

int asp_hamiltonian_num_qubits(const asp_hamiltonian* hamiltonian);
size_t asp_hamiltonian_num_terms(const asp_hamiltonian* hamiltonian);
double asp_hamiltonian_identity_offset(const asp_hamiltonian* hamiltonian);
void asp_hamiltonian_free(asp_hamiltonian* hamiltonian);

/* ---- States ------------------------------------------------------------ */

typedef struct asp_state asp_state;

asp_status asp_state_basis(const char* bits, asp_state** out);
asp_status asp_state_superposition(const char* const* bits, const double* amplitudes,
                                   size_t count, asp_state** out);

/* Builds a state from a StateSpec JSON document; `hamiltonian` is required
 * for kind "krylov" and ignored otherwise. dim_used/ritz_energy are optional
 * Krylov outputs. */
asp_status asp_state_from_spec_json(const char* spec_json,
                                    const asp_hamiltonian* hamiltonian,
                                    asp_state** out, int* dim_used,
                                    double* ritz_energy);

asp_status asp_state_ground(const asp_hamiltonian* hamiltonian, asp_state** out,
                            double* energy);
asp_status asp_state_krylov(const asp_hamiltonian* hamiltonian,
                            const asp_state* reference, int dimension,
                            double overlap_threshold, asp_state** out,
                            int* dim_used, double* ritz_energy);

asp_status asp_state_expectation(const asp_hamiltonian* hamiltonian,
                                 const asp_state* state, double* out);
asp_status asp_state_fidelity(const asp_state* a, const asp_state* b, double* out);
int asp_state_num_qubits(const asp_state* state);
void asp_state_free(asp_state* state);

/* ---- Covariance -------------------------------------------------------- */

typedef struct asp_covariance asp_covariance;

/* S is the target's non-identity Pauli set. */
asp_status asp_covariance_build(const asp_hamiltonian* source,
                                const asp_state* psi, asp_covariance** out);
asp_status asp_covariance_sample(const asp_hamiltonian* source,
                                 const asp_state* psi, long long shots,
                                 uint64_t seed, asp_covariance** out);
asp_status asp_covariance_save(const asp_covariance* covariance, const char* path);
asp_status asp_covariance_load(const char* path, asp_covariance** out);

size_t asp_covariance_size(const asp_covariance* covariance);
/* Ascending eigenvalues of A; `buffer` must hold asp_covariance_size values. */
asp_status asp_covariance_eigenvalues(const asp_covariance* covariance,
                                      double* buffer);
void asp_covariance_free(asp_covariance* covariance);

/* ---- Parent construction ----------------------------------------------- */

typedef struct asp_parent asp_parent;

typedef struct asp_parent_options {
  double delta;              /* kernel threshold */
  double rho;                /* commuting-pair penalty */
  double c_magnitude_min;    /* initialization scan, both signs */
  double c_magnitude_max;
  int c_points_per_sign;
  int max_iterations;
  double gradient_tolerance;
} asp_parent_options;

void asp_parent_options_default(asp_parent_options* options);

/* Kernel extraction, initialization, reduced-cost optimization, folding. */
asp_status asp_parent_build(const asp_covariance* covariance,
                            const asp_hamiltonian* target,
                            const asp_parent_options* options, asp_parent** out);

asp_status asp_parent_hamiltonian(const asp_parent* parent, asp_hamiltonian** out);
double asp_parent_lambda(const asp_parent* parent);
double asp_parent_cost(const asp_parent* parent);
int asp_parent_kernel_dim(const asp_parent* parent);
/* alpha has asp_covariance_size entries. */
asp_status asp_parent_alpha(const asp_parent* parent, double* buffer, size_t size);
/* Writes <prefix>.txt (pauli-text) and <prefix>.json (alpha, lambda,
 * cost_value, kernel eigenvalues, optimizer report). */
asp_status asp_parent_save(const asp_parent* parent, const char* prefix);
void asp_parent_free(asp_parent* parent);

/* ---- Adiabatic diagnostics and evolution -------------------------------- */

typedef struct asp_diagnostics asp_diagnostics;

asp_status asp_diagnostics_compute(const asp_hamiltonian* h_initial,
                                   const asp_hamiltonian* h_target,
                                   int grid_points, asp_diagnostics** out);

asp_status asp_diagnostics_t_est(const asp_diagnostics* diagnostics, double* t_est,
                                 int* finite);
asp_status asp_diagnostics_min_gap(const asp_diagnostics* diagnostics, double* gap,
                                   double* at_s);
asp_status asp_diagnostics_jordan_bound(const asp_diagnostics* diagnostics,
                                        double t_asp, double* bound);
/* (s, lambda_0..lambda_k, gap) rows with k+1 = levels columns. */
asp_status asp_diagnostics_save_csv(const asp_diagnostics* diagnostics,
                                    const char* path, int levels);
void asp_diagnostics_free(asp_diagnostics* diagnostics);

/* mode: "exact-factor" or "pauli-split". */
asp_status asp_trotter_evolve(const asp_hamiltonian* h_initial,
                              const asp_hamiltonian* h_target,
                              const asp_state* initial, double time,
                              long long steps, const char* mode, asp_state** out);

/* ---- Shot-noise study --------------------------------------------------- */

asp_status asp_noise_study(const asp_hamiltonian* source, const asp_state* psi,
                           long long shots, uint64_t seed, double delta,
                           char** report_json);

/* ---- Pipeline ----------------------------------------------------------- */

/* Runs the full pipeline from a RunConfig JSON document; writes artifacts
 * under the configured output directory. summary_json is optional. */
asp_status asp_pipeline_run(const char* config_json, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* ASPARENT_ASPARENT_H */
