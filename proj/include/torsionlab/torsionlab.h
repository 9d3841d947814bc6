#ifndef TORSIONLAB_H
#define TORSIONLAB_H

/* C interface of libtorsionlab. Every call returns a tl_status; on failure the
   message is available from tl_last_error() on the same thread. Handles are
   opaque and must be released with the matching *_free function. Strings
   returned through out-parameters are owned by the handle they came from
   (or are static) and must not be freed. */

#include <stddef.h>

#if defined(_WIN32)
#define TL_API __declspec(dllexport)
#else
#define TL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_DOMAIN_ERROR = 1,
  TL_NON_CONVERGENCE = 2,
  TL_TRUNCATION_FAILURE = 3,
  TL_UNSUPPORTED = 4,
  TL_EXPANSION_INSUFFICIENT = 5,
  TL_DIVERGENCE_SUSPECTED = 6,
  TL_FIT_ILL_CONDITIONED = 7,
  TL_TAIL_UNBOUNDED = 8,
  TL_DEGENERATE = 9,
  TL_INVALID_ARGUMENT = 10,
  TL_IO_ERROR = 11,
  TL_INTERNAL_ERROR = 99
} tl_status;

typedef enum tl_circle_rep { TL_REP_SPECTRAL = 0, TL_REP_IMAGES = 1, TL_REP_AUTO = 2 } tl_circle_rep;
typedef enum tl_h3_mode { TL_H3_CLOSED_FORM = 0, TL_H3_BISMUT = 1 } tl_h3_mode;
typedef enum tl_decay_kind {
  TL_DECAY_EXPONENTIAL = 0,
  TL_DECAY_POLYNOMIAL = 1,
  TL_DECAY_UNKNOWN = 2
} tl_decay_kind;
typedef enum tl_growth_kind {
  TL_GROWTH_POLYNOMIAL = 0,
  TL_GROWTH_EXPONENTIAL = 1,
  TL_GROWTH_NONE = 2
} tl_growth_kind;

typedef struct tl_model tl_model;
typedef struct tl_report tl_report;
typedef struct tl_samples tl_samples;
typedef struct tl_selftest tl_selftest;

typedef struct tl_quadrature {
  double rel_tol;
  double abs_tol;
  int max_subdivisions;
} tl_quadrature;

typedef struct tl_result {
  double small_re, small_im;
  double large_re, large_im;
  double minus_two_log_T_re, minus_two_log_T_im;
  double log_T_re, log_T_im;
  double T_re, T_im;
  double err_small;
  double err_large;
  double split;
} tl_result;

typedef struct tl_decay_fit {
  int kind; /* tl_decay_kind */
  double param; /* rate or alpha */
  double residual;
  double residual_polynomial;
  double residual_exponential;
  double t_lo, t_hi;
} tl_decay_fit;

TL_API const char* tl_version(void);
TL_API const char* tl_status_name(tl_status status);
TL_API const char* tl_last_error(void);
/* Nonzero for failures of the numerics rather than of the input. */
TL_API int tl_status_is_numerical(tl_status status);
TL_API void tl_quadrature_default(tl_quadrature* out);

/* models */
TL_API tl_status tl_model_real_line(double R, double theta, double g, tl_model** out);
TL_API tl_status tl_model_circle(double R, double theta, double rot, int rep, tl_model** out);
TL_API tl_status tl_model_circle_untwisted(double R, int rep, tl_model** out);
TL_API tl_status tl_model_hyperbolic3(double x, int mode, tl_model** out);
TL_API tl_status tl_model_product(const tl_model* left, const tl_model* right, double chi_left,
                                  double chi_right, tl_model** out);
/* im may be NULL (real trace). Expansion terms are t^{exponents[k]} with
   complex coefficients; coeff_im may be NULL. */
TL_API tl_status tl_model_sampled(size_t n, const double* t, const double* re, const double* im,
                                  size_t n_terms, const double* exponents, const double* coeff_re,
                                  const double* coeff_im, double valid_beyond, int decay_kind,
                                  double decay_param, tl_model** out);
TL_API void tl_model_free(tl_model* model);
TL_API const char* tl_model_name(const tl_model* model);

/* traces */
TL_API tl_status tl_curly_T(const tl_model* model, double t, double* re, double* im);
TL_API tl_status tl_heat_trace_p(const tl_model* model, int p, double t, double* re, double* im);
TL_API tl_status tl_decay_hint(const tl_model* model, int* kind, double* param);
TL_API tl_status tl_chi_g(const tl_model* model, double* out);

/* regularization; quad may be NULL for the defaults */
TL_API tl_status tl_torsion(const tl_model* model, double split, const tl_quadrature* quad,
                            tl_result* out);
TL_API tl_status tl_torsion_sigma(const tl_model* model, double sigma, double split,
                                  const tl_quadrature* quad, double* log_T_re, double* log_T_im);
TL_API tl_status tl_sigma_extrapolate(const tl_model* model, size_t n, const double* u_grid,
                                      int degree, double split, const tl_quadrature* quad,
                                      double* log_T_re, double* log_T_im);
TL_API tl_status tl_split_invariance(const tl_model* model, size_t n, const double* splits,
                                     const tl_quadrature* quad, double* max_deviation);

/* closed forms; *found = 0 when the model has none. formula is static. */
TL_API tl_status tl_oracle(const tl_model* model, int* found, double* T_re, double* T_im,
                           const char** formula);
TL_API tl_status tl_bismut_calibration(double* measure_factor, double* sign, double* residual);

/* decay and growth */
TL_API tl_status tl_ns_fit(size_t n, const double* t, const double* abs_values, tl_decay_fit* out);
TL_API tl_status tl_ns_fit_model(const tl_model* model, double t_lo, double t_hi, int n,
                                 tl_decay_fit* out);
/* model_kind TL_GROWTH_NONE uses the bins alone. */
TL_API tl_status tl_f3(size_t n_bins, const double* bins, int model_kind, double b, double scale,
                       double a, double t, double* out);
/* custom_bound = 0 uses the default t^{(b+1)/2} or t^{1/2} e^{b^2 t/4a}. */
TL_API tl_status tl_f3_bound_check(int model_kind, double b, double a, size_t n,
                                   const double* t_grid, int custom_bound, double bound_power,
                                   double bound_rate, double* sup_ratio, double* tail_slope,
                                   int* pass);
TL_API tl_status tl_metric_condition(const tl_decay_fit* f1, int model_kind, double b, double a,
                                     double* alpha, int* holds);

/* CSV input */
TL_API tl_status tl_samples_read_csv(const char* path, tl_samples** out);
TL_API size_t tl_samples_size(const tl_samples* samples);
TL_API tl_status tl_samples_get(const tl_samples* samples, size_t i, double* t, double* re,
                                double* im);
TL_API void tl_samples_free(tl_samples* samples);
/* Histogram values are returned through a samples handle (t = bin index). */
TL_API tl_status tl_histogram_read_csv(const char* path, tl_samples** out);

/* checks */
TL_API tl_status tl_check_gbc(const tl_model* model, size_t n, const double* t_grid,
                              tl_report** out);
TL_API tl_status tl_check_even_dim(const tl_model* left, const tl_model* right, double chi_left,
                                   double chi_right, tl_report** out);
TL_API tl_status tl_check_product(const tl_model* left, const tl_model* right, double chi_left,
                                  double chi_right, tl_report** out);
TL_API tl_status tl_check_decomposition(double R, double theta, double sigma, tl_report** out);
TL_API tl_status tl_check_rescale(const tl_model* model, size_t n, const double* c_values,
                                  tl_report** out);
TL_API tl_status tl_check_split(const tl_model* model, size_t n, const double* splits,
                                tl_report** out);
TL_API const char* tl_report_name(const tl_report* report);
TL_API double tl_report_max_deviation(const tl_report* report);
TL_API double tl_report_tolerance(const tl_report* report);
TL_API int tl_report_pass(const tl_report* report);
TL_API size_t tl_report_detail_count(const tl_report* report);
TL_API tl_status tl_report_detail(const tl_report* report, size_t i, const char** input,
                                  double* observed_re, double* observed_im, double* expected_re,
                                  double* expected_im);
TL_API size_t tl_report_evidence_count(const tl_report* report);
TL_API tl_status tl_report_evidence(const tl_report* report, size_t i, const char** key,
                                    const char** value);
TL_API void tl_report_free(tl_report* report);

/* acceptance suite */
TL_API tl_status tl_selftest_run(tl_selftest** out);
TL_API size_t tl_selftest_count(const tl_selftest* st);
TL_API tl_status tl_selftest_item(const tl_selftest* st, size_t i, int* id, const char** name,
                                  int* pass, const char** detail);
TL_API void tl_selftest_free(tl_selftest* st);

#ifdef __cplusplus
}
#endif

#endif
