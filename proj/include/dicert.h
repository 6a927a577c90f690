/* C interface to the randomness-certification library.
 *
 * All functions that can fail return a dicert_status; on failure the
 * human-readable message is available from dicert_last_error() on the
 * context used for the call. Strings returned through out-parameters are
 * heap-allocated and must be released with dicert_string_free().
 */
#ifndef DICERT_H
#define DICERT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dicert_status {
  DICERT_OK = 0,
  DICERT_ERR_INVALID_ARGUMENT = 1,
  DICERT_ERR_RUNTIME = 2,
  DICERT_ERR_NUMERICAL = 3
} dicert_status;

/* Opaque context; owns the last-error message. Not thread-safe: use one
 * context per thread. */
typedef struct dicert_ctx dicert_ctx;

dicert_ctx* dicert_ctx_new(void);
void dicert_ctx_free(dicert_ctx* ctx);

/* Message from the most recent failing call on this context ("" if none).
 * The pointer stays valid until the next call on the same context. */
const char* dicert_last_error(const dicert_ctx* ctx);

const char* dicert_version(void);

void dicert_string_free(char* s);

/* Run a pipeline command ("simulate", "ingest", "certify", "reproduce",
 * "sdp_solve") with a JSON config; *out_json receives the JSON result. */
dicert_status dicert_run_json(dicert_ctx* ctx, const char* command,
                              const char* config_json, char** out_json);

/* Parse "0.45", "pi/24", "3*pi/4" into a double. */
dicert_status dicert_parse_real(dicert_ctx* ctx, const char* text, double* out);

/* Bell families: "mod_chsh", "i_delta", "j_gamma". The parameter is ignored
 * for mod_chsh. */
dicert_status dicert_tsirelson_bound(dicert_ctx* ctx, const char* family,
                                     double parameter, double* out);
dicert_status dicert_classical_bound(dicert_ctx* ctx, const char* family,
                                     double parameter, double* out);

/* Quantum upper bound on the Bell expression from the moment-matrix
 * relaxation at the given level. */
dicert_status dicert_bell_quantum_bound(dicert_ctx* ctx, const char* family,
                                        double parameter, int level,
                                        double* out);

/* Certified min-entropy (bits) of the outcome pair at settings (0,0) given
 * a Bell value of at least bell_value. */
dicert_status dicert_min_entropy(dicert_ctx* ctx, const char* family,
                                 double parameter, double bell_value,
                                 int level, double* out_bits);

/* Certified von Neumann entropy lower bound (bits) with an m-node
 * quadrature. */
dicert_status dicert_von_neumann(dicert_ctx* ctx, const char* family,
                                 double parameter, double bell_value, int m,
                                 int level, double* out_bits);

/* Gauss-Radau rule on [0,1] with the endpoint fixed at 1; nodes and weights
 * must each have room for m doubles. */
dicert_status dicert_gauss_radau(dicert_ctx* ctx, int m, double* nodes,
                                 double* weights);

#ifdef __cplusplus
}
#endif

#endif /* DICERT_H */
