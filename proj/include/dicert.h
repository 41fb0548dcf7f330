/* dicert: device-independent randomness certification from Bell statistics.
 *
 * C interface of the shared library. All functions return DC_OK on success
 * or an error code; dc_error_message() describes the most recent failure in
 * the calling thread. Objects returned through out-parameters are owned by
 * the caller and released with the matching *_free function.
 */

#ifndef DICERT_H
#define DICERT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dc_status {
  DC_OK = 0,
  DC_ERR_INVALID_ARGUMENT = 1,
  DC_ERR_PARSE = 2,
  DC_ERR_SOLVER = 3,
  DC_ERR_INFEASIBLE = 4,
  DC_ERR_IO = 5,
  DC_ERR_NUMERIC = 6,
  DC_ERR_UNKNOWN = 7
} dc_status;

const char* dc_version(void);

/* Message for the last error raised in this thread; empty string if none. */
const char* dc_error_message(void);

void dc_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Configuration-driven runs (the CLI is a thin wrapper around these).  */

/* JSON text of a complete default configuration. */
dc_status dc_default_config(char** json_out);

/* Executes the sweep described by the JSON configuration. exit_code follows
 * the CLI convention: 0 success, 2 configuration error, 3 solver failure,
 * 4 infeasible statistics. csv_out receives the result table; log_out the
 * diagnostics. When export_dir is non-NULL the SDP instances are written in
 * sparse SDPA format instead of being solved. */
dc_status dc_run_config(const char* config_json, const char* export_dir,
                        int* exit_code, char** csv_out, char** log_out);

/* ------------------------------------------------------------------ */
/* Conditional probability tables.                                     */

typedef struct dc_distribution dc_distribution;

/* format: "csv" or "json". */
dc_status dc_distribution_load(const char* path, const char* format,
                               dc_distribution** out);

/* p is indexed as p[((a*ob + b)*nx + x)*ny + y]; oa/ob outcomes, nx/ny
 * settings. */
dc_status dc_distribution_from_table(int oa, int ob, int nx, int ny,
                                     const double* p, dc_distribution** out);

dc_status dc_distribution_entry(const dc_distribution* d, int a, int b, int x,
                                int y, double* out);

dc_status dc_distribution_is_nonsignalling(const dc_distribution* d, double tol,
                                           int* nonsignalling,
                                           double* max_violation);

/* Euclidean projection onto the non-signalling affine set; l1_perturbation
 * receives ||input - projected||_1. */
dc_status dc_distribution_project_nonsignalling(const dc_distribution* d,
                                                dc_distribution** projected,
                                                double* l1_perturbation);

void dc_distribution_free(dc_distribution* d);

/* ------------------------------------------------------------------ */
/* Direct single-point tasks. functional is one of "chsh", "cglmp3",    */
/* "i3322". key_y < 0 selects the one-sided quantity.                   */

/* NPA upper bound on the quantum value of a built-in Bell functional. */
dc_status dc_max_bell(const char* functional, int level, double* value);

/* Lower bound on the conditional von Neumann entropy (bits) subject to
 * functional >= threshold, with an r-node logarithmic integration grid on
 * [t_min, 1]. per_node != 0 solves one subproblem per node. */
dc_status dc_entropy_bound(const char* functional, double threshold, int nodes,
                           double t_min, int level, int per_node, int key_x,
                           int key_y, int workers, double* value,
                           int* matrix_size);

/* Min-entropy -log2(p_guess) (bits) subject to functional >= threshold. */
dc_status dc_min_entropy(const char* functional, double threshold, int level,
                         int key_x, int key_y, double* value);

#ifdef __cplusplus
}
#endif

#endif /* DICERT_H */
