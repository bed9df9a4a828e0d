#ifndef KLEINSIM_H
#define KLEINSIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KsStatus {
  KS_STATUS_OK = 0,
  KS_STATUS_NULL_POINTER = 1,
  KS_STATUS_INVALID_ARGUMENT = 2,
  KS_STATUS_CONFIG = 3,
  KS_STATUS_RUNTIME = 4,
  KS_STATUS_IO = 5,
  // The requested value does not exist for this run.
  KS_STATUS_UNAVAILABLE = 6,
  KS_STATUS_BUFFER_TOO_SMALL = 7,
  KS_STATUS_PANIC = 8,
} KsStatus;

// Which tunneling estimate to read from a report.
typedef enum KsEstimate {
  // Negative-branch population of the final frame.
  KS_ESTIMATE_BRANCH = 0,
  // Weight beyond the classical turning point.
  KS_ESTIMATE_POSITION = 1,
  // Negative-branch probability of the energy filter.
  KS_ESTIMATE_FILTER = 2,
  // Landau-Zener prediction.
  KS_ESTIMATE_ANALYTIC = 3,
} KsEstimate;

// Opaque scenario configuration.
typedef struct KsConfig KsConfig;

// Opaque result of a run.
typedef struct KsReport KsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *ks_last_error(void);

// Library version as a static NUL-terminated string.
const char *ks_version(void);

// Loads a config file, or a shipped config by name.
//
// # Safety
// `spec` must be a NUL-terminated string and `out_config` a valid pointer.
enum KsStatus ks_config_load(const char *spec, struct KsConfig **out_config);

// Parses config text.
//
// # Safety
// `source` must be a NUL-terminated string and `out_config` a valid pointer.
enum KsStatus ks_config_parse(const char *source, struct KsConfig **out_config);

// Switches the engine ("dirac", "ion-ideal" or "ion-corrected"). The config
// is left unchanged on failure.
//
// # Safety
// `config` must come from this library and `engine` be NUL-terminated.
enum KsStatus ks_config_set_engine(struct KsConfig *config, const char *engine);

// Writes the 64-character hex config hash plus NUL into `buf`.
//
// # Safety
// `buf` must hold at least `len` bytes.
enum KsStatus ks_config_hash(const struct KsConfig *config, char *buf, size_t len);

// # Safety
// `config` must come from this library or be null; it is invalid afterwards.
void ks_config_free(struct KsConfig *config);

// Runs a scenario.
//
// # Safety
// `config` must come from this library and `out_report` be a valid pointer.
enum KsStatus ks_run(const struct KsConfig *config, struct KsReport **out_report);

// # Safety
// `report` must come from this library or be null; it is invalid afterwards.
void ks_report_free(struct KsReport *report);

// Number of recorded frames, 0 for a null handle.
//
// # Safety
// `report` must come from this library or be null.
size_t ks_report_frame_count(const struct KsReport *report);

// Number of grid points per density, 0 for a null handle.
//
// # Safety
// `report` must come from this library or be null.
size_t ks_report_grid_len(const struct KsReport *report);

// Time of a frame in μs.
//
// # Safety
// `report` must come from this library and `time_us` be a valid pointer.
enum KsStatus ks_report_frame_time(const struct KsReport *report, size_t frame, double *time_us);

// Mean position of a frame in units of Δ.
//
// # Safety
// `report` must come from this library and `mean_x` be a valid pointer.
enum KsStatus ks_report_mean_x(const struct KsReport *report, size_t frame, double *mean_x);

// Copies the grid positions (Δ) into `buf`, which must hold
// `ks_report_grid_len` values.
//
// # Safety
// `buf` must hold at least `len` doubles.
enum KsStatus ks_report_positions(const struct KsReport *report, double *buf, size_t len);

// Copies the density of a frame into `buf`, which must hold
// `ks_report_grid_len` values.
//
// # Safety
// `buf` must hold at least `len` doubles.
enum KsStatus ks_report_density(const struct KsReport *report,
                                size_t frame,
                                double *buf,
                                size_t len);

// Reads one tunneling estimate; `kind` is a `KsEstimate` value. Returns
// `Unavailable` when the run could not produce it (for example the branch
// estimate before the parts separate).
//
// # Safety
// `report` must come from this library and `value` be a valid pointer.
enum KsStatus ks_report_tunneling(const struct KsReport *report, uint32_t kind, double *value);

// Writes summary.json into `dir`.
//
// # Safety
// `report` must come from this library and `dir` be NUL-terminated.
enum KsStatus ks_report_write_summary(const struct KsReport *report, const char *dir);

// Writes one file per frame plus an index into `dir`; `format` is "csv" or
// "ndjson".
//
// # Safety
// `report` must come from this library; `dir` and `format` be NUL-terminated.
enum KsStatus ks_report_emit_frames(const struct KsReport *report,
                                    const char *dir,
                                    const char *format);

// Landau-Zener tunneling of the linear-slope settings at the given second
// drive strength (kHz).
//
// # Safety
// `value` must be a valid pointer.
enum KsStatus ks_analytic_tunneling(double omega_tilde2_khz, double *value);

// Γ = (mc²)² / (2 c g).
//
// # Safety
// `gamma` must be a valid pointer.
enum KsStatus ks_klein_gamma(double mc2, double c, double g, double *gamma);

// e^(−2πΓ).
//
// # Safety
// `probability` must be a valid pointer.
enum KsStatus ks_tunnel_prob_analytic(double gamma, double *probability);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KLEINSIM_H */
