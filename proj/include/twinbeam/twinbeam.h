/*
 * Copyright 2026 The twinbeam Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libtwinbeam.
 *
 * Every call returns a tb_status. On failure the message of the last error
 * raised on the calling thread is available from tb_last_error(). Objects
 * are opaque handles owned by the caller and released with the matching
 * tb_*_free function; free functions accept NULL. Handles are immutable
 * after creation, so concurrent reads from several threads are safe.
 *
 * Covariance matrices are 4x4 row-major arrays over (X_a, P_a, X_b, P_b),
 * vacuum variance 1/2 per quadrature.
 */

#ifndef TWINBEAM_TWINBEAM_H_
#define TWINBEAM_TWINBEAM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TWINBEAM_BUILDING_LIBRARY)
#define TB_API __attribute__((visibility("default")))
#else
#define TB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tb_status {
  TB_OK = 0,
  TB_ERR_INVALID_ARGUMENT = 1,
  TB_ERR_CAPACITY = 2,
  TB_ERR_VALIDATION = 3,
  TB_ERR_PRECONDITION = 4,
  TB_ERR_DOMAIN = 5,
  TB_ERR_TRUNCATION = 6,
  TB_ERR_PARSE = 7,
  TB_ERR_CONVERGENCE = 8,
  TB_ERR_IO = 9,
  TB_ERR_BUFFER_TOO_SMALL = 10,
  TB_ERR_INTERNAL = 99
} tb_status;

TB_API const char* tb_status_string(tb_status status);
/* Message of the most recent failure on this thread ("" if none). */
TB_API const char* tb_last_error(void);
TB_API const char* tb_version(void);

/* ---- Fock engine ------------------------------------------------------ */

typedef struct tb_state tb_state;

typedef enum tb_polarization { TB_POL_H = 0, TB_POL_V = 1 } tb_polarization;
typedef enum tb_port {
  TB_PORT_A = 0,
  TB_PORT_B = 1,
  TB_PORT_C = 2,
  TB_PORT_D = 3
} tb_port;
typedef enum tb_splitter_convention {
  TB_SPLITTER_SYMMETRIC_I = 0,
  TB_SPLITTER_ROTATION = 1
} tb_splitter_convention;

typedef struct tb_mode_label {
  tb_polarization polarization;
  int frequency_tag;
  tb_port port;
} tb_mode_label;

/* labels may be NULL when count == 2 (degenerate H modes on ports a, b). */
TB_API tb_status tb_state_make_fock(const int* occupations,
                                    const tb_mode_label* labels, size_t count,
                                    int cutoff, tb_state** out);
/* rho: dim x dim row-major real and imaginary parts (imag may be NULL). */
TB_API tb_status tb_state_make_twin_mixture(const double* rho_re,
                                            const double* rho_im, size_t dim,
                                            int cutoff, tb_state** out);
/* leakage and truncation_warning may be NULL. */
TB_API tb_status tb_state_make_coherent_pair(double alpha_a_re,
                                             double alpha_a_im,
                                             double alpha_b_re,
                                             double alpha_b_im, int cutoff,
                                             tb_state** out, double* leakage,
                                             int* truncation_warning);
/* Mixes ports a and b onto c and d. */
TB_API tb_status tb_state_apply_beam_splitter(const tb_state* state,
                                              double mixing_angle,
                                              tb_splitter_convention convention,
                                              tb_state** out);
TB_API tb_status tb_state_apply_waveplate(const tb_state* state, double theta,
                                          tb_state** out);
TB_API tb_status tb_state_norm(const tb_state* state, double* out);
TB_API tb_status tb_state_mode_count(const tb_state* state, size_t* out);
/* Distribution of n_c - n_d. On TB_ERR_BUFFER_TOO_SMALL *count holds the
 * required capacity. values/probabilities may be NULL with capacity 0. */
TB_API tb_status tb_state_number_difference(const tb_state* state, tb_port c,
                                            tb_port d, int* values,
                                            double* probabilities,
                                            size_t capacity, size_t* count,
                                            double* mean, double* variance);
TB_API tb_status tb_state_coincidence(const tb_state* state, tb_port c,
                                      tb_port d, double* out);
TB_API void tb_state_free(tb_state* state);

/* ---- Quadrature model ------------------------------------------------- */

typedef struct tb_quadrature_state {
  double mean_a_re, mean_a_im;
  double mean_b_re, mean_b_im;
  double cov[16];
} tb_quadrature_state;

TB_API tb_status tb_vacuum_covariance(double cov[16]);
TB_API tb_status tb_twin_beam_covariance(double squeeze_r, double cov[16]);
TB_API tb_status tb_quadrature_is_physical(const double cov[16], int* out);
TB_API tb_status tb_quadrature_difference_stds(const tb_quadrature_state* s,
                                               double* dx_minus,
                                               double* dp_minus);
TB_API tb_status tb_quadrature_number_difference_std(
    const tb_quadrature_state* s, double theta, int generalized, double* out);
TB_API tb_status tb_quadrature_cross_check(double alpha_re, double alpha_im,
                                           const double cov[16], int cutoff,
                                           double theta, double* linearized,
                                           double* exact,
                                           double* relative_error,
                                           double* leakage);

/* ---- OPO spectra ------------------------------------------------------ */

typedef struct tb_model_params {
  double s0_dbm;
  double xi;
  double delta_hz;
} tb_model_params;

typedef struct tb_opo_params {
  double transmission;
  double loss;
  double fsr_hz;
  double s0_dbm;
} tb_opo_params;

typedef enum tb_spectrum_kind {
  TB_SPECTRUM_INTENSITY = 0,
  TB_SPECTRUM_PHASE = 1,
  TB_SPECTRUM_FLAT = 2
} tb_spectrum_kind;

TB_API tb_status tb_opo_derive(const tb_opo_params* params,
                               tb_model_params* out);
TB_API tb_status tb_intensity_diff_spectrum(double u, double xi, double* out);
TB_API tb_status tb_phase_diff_spectrum(double u, double xi, double* out);
TB_API tb_status tb_distinguishable_phase_spectrum(double u, double* out);
TB_API tb_status tb_uncertainty_product(double u, double xi, double* out);
TB_API tb_status tb_opo_covariance(double u, double xi, double cov[16]);
/* Evaluates the model at nu (Hz); dBm when as_dbm != 0, else relative. */
TB_API tb_status tb_spectrum_eval(const tb_model_params* params,
                                  tb_spectrum_kind kind, const double* nu_hz,
                                  size_t count, int as_dbm, double* values);
/* CSV with columns frequency_hz,value,unit_tag. */
TB_API tb_status tb_spectrum_write_csv(const tb_model_params* params,
                                       tb_spectrum_kind kind,
                                       const double* nu_hz, size_t count,
                                       int as_dbm, const char* path);

/* ---- Traces and fitting ----------------------------------------------- */

typedef struct tb_trace tb_trace;
typedef struct tb_fit tb_fit;

typedef struct tb_band {
  double lo_hz;
  double hi_hz;
} tb_band;

typedef enum tb_weighting { TB_WEIGHT_DB = 0, TB_WEIGHT_LINEAR = 1 } tb_weighting;

typedef struct tb_fit_config {
  tb_band fit_window;
  const tb_band* exclusions;
  size_t exclusion_count;
  int has_initial_guess;
  tb_model_params initial_guess;
  tb_weighting weighting;
  int max_iterations;
  double convergence_tol;
  double initial_damping;
  double damping_factor;
} tb_fit_config;

typedef enum tb_export_format {
  TB_EXPORT_TEXT = 0,
  TB_EXPORT_JSON = 1
} tb_export_format;

typedef struct tb_squeezing_report {
  int has_raw;
  double raw_db;
  int has_corrected;
  double corrected_db;
  int complete_correlation;
  int corrected_complete_correlation;
  double bandwidth_hz;
  size_t dropped_points;
} tb_squeezing_report;

TB_API tb_status tb_linear_grid(double lo_hz, double hi_hz, double step_hz,
                                double* out, size_t capacity, size_t* count);

TB_API tb_status tb_trace_load_file(const char* path, tb_trace** out);
TB_API tb_status tb_trace_load_buffer(const char* data, size_t length,
                                      tb_trace** out);
TB_API tb_status tb_trace_from_arrays(const double* frequency_hz,
                                      const double* power_dbm, size_t count,
                                      double rbw_hz, tb_trace** out);
/* Model trace in dBm plus Gaussian noise of noise_db rms; deterministic
 * for a given seed on every platform. */
TB_API tb_status tb_trace_synth(const tb_model_params* params,
                                tb_spectrum_kind kind, const double* grid_hz,
                                size_t count, double noise_db, uint64_t seed,
                                double rbw_hz, tb_trace** out);
TB_API tb_status tb_trace_size(const tb_trace* trace, size_t* out);
/* Copies min(capacity, size) samples; either array may be NULL. */
TB_API tb_status tb_trace_samples(const tb_trace* trace, double* frequency_hz,
                                  double* power_dbm, size_t capacity);
TB_API tb_status tb_trace_write_file(const tb_trace* trace, const char* path);
TB_API tb_status tb_trace_subtract_floor(const tb_trace* trace,
                                         const tb_trace* floor, tb_trace** out,
                                         size_t* dropped);
TB_API void tb_trace_free(tb_trace* trace);

/* Window from 2 MHz and a 3.8-4.0 MHz exclusion; the exclusion array lives
 * in static storage. */
TB_API void tb_fit_config_analyzer_defaults(tb_fit_config* config);
/* On TB_ERR_CONVERGENCE, *out still receives the last iterate. */
TB_API tb_status tb_fit_intensity(const tb_trace* trace,
                                  const tb_fit_config* config, tb_fit** out);
TB_API tb_status tb_fit_params(const tb_fit* fit, tb_model_params* params,
                               double* rms_residual_db, size_t* points_used);
TB_API tb_status tb_fit_stderr(const tb_fit* fit, double* s0_dbm, double* xi,
                               double* delta_hz);
TB_API tb_status tb_fit_warning_count(const tb_fit* fit, size_t* out);
/* Writes a NUL-terminated string. *needed receives the size including the
 * terminator; TB_ERR_BUFFER_TOO_SMALL when capacity is insufficient. */
TB_API tb_status tb_fit_export(const tb_fit* fit, tb_export_format format,
                               char* buffer, size_t capacity, size_t* needed);
TB_API tb_status tb_fit_predict_phase(const tb_fit* fit, const double* nu_hz,
                                      size_t count, double* values_dbm);
/* floor may be NULL. */
TB_API tb_status tb_fit_report_squeezing(const tb_trace* trace,
                                         const tb_fit* fit,
                                         const tb_trace* floor,
                                         tb_squeezing_report* out);
TB_API void tb_fit_free(tb_fit* fit);

#ifdef __cplusplus
}
#endif

#endif /* TWINBEAM_TWINBEAM_H_ */
