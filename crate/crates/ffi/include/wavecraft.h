#ifndef WAVECRAFT_H
#define WAVECRAFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_INVALID_ARGUMENT = 2,
  WC_STATUS_NUMERICAL = 3,
  WC_STATUS_NULL_STATE = 4,
  WC_STATUS_BUFFER_TOO_SMALL = 5,
  WC_STATUS_PANIC = 6,
} WcStatus;

// Uniform quadrature grid.
typedef struct WcGrid WcGrid;

// Teleportation step with a fixed resource and grid.
typedef struct WcTeleporter WcTeleporter;

// Wave function on a grid, possibly unnormalized.
typedef struct WcWave WcWave;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated).
// Returns the message length without the terminator, or 0 when there is none;
// a result ≥ `len` means the message was truncated.
uintptr_t wc_last_error_message(char *buf, uintptr_t len);

enum WcStatus wc_grid_new(uintptr_t n_points, double extent, struct WcGrid **out);

void wc_grid_free(struct WcGrid *grid);

enum WcStatus wc_grid_len(const struct WcGrid *grid, uintptr_t *out);

// Builds a state from a JSON descriptor such as `{"kind":"squeezed","r":-1.0}`.
enum WcStatus wc_state_from_json(const struct WcGrid *grid, const char *json, struct WcWave **out);

// Wraps caller-supplied amplitudes (separate real and imaginary arrays of the grid length).
enum WcStatus wc_wave_from_amplitudes(const struct WcGrid *grid,
                                      const double *re,
                                      const double *im,
                                      uintptr_t len,
                                      struct WcWave **out);

void wc_wave_free(struct WcWave *wave);

// Squared norm Σ|ψ_i|²·dx.
enum WcStatus wc_wave_norm_sq(const struct WcWave *wave, double *out);

// Copies amplitudes into `re`/`im`, each of capacity `len` ≥ grid length.
enum WcStatus wc_wave_amplitudes(const struct WcWave *wave, double *re, double *im, uintptr_t len);

enum WcStatus wc_fidelity(const struct WcWave *a, const struct WcWave *b, double *out);

enum WcStatus wc_teleporter_new(const struct WcGrid *grid,
                                double r_tele,
                                uint32_t k,
                                uint32_t l,
                                struct WcTeleporter **out);

void wc_teleporter_free(struct WcTeleporter *t);

// One conditional step at outcome (m_x, m_p). The output is unnormalized; its
// squared norm is the heralding weight.
enum WcStatus wc_teleport_step(const struct WcTeleporter *t,
                               const struct WcWave *input,
                               double m_x,
                               double m_p,
                               struct WcWave **out);

// Runs a TOML experiment config without writing files and returns the run
// summary as a JSON string, released with [`wc_string_free`].
enum WcStatus wc_run_experiment(const char *config_toml, char **summary_json);

void wc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVECRAFT_H */
