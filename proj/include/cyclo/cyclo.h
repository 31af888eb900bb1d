/* Filtered method-of-moments estimation for cyclic long-memory processes.
 *
 * All functions return a cyclo_status. On failure the message of the most
 * recent error on the calling thread is available from cyclo_last_error().
 * Handles are opaque; each *_create has a matching *_destroy. Strings
 * returned through char** are owned by the caller and released with
 * cyclo_string_free. Handles are immutable after creation and may be shared
 * across threads. */
#ifndef CYCLO_CYCLO_H
#define CYCLO_CYCLO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CYCLO_API __declspec(dllexport)
#else
#define CYCLO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CYCLO_OK = 0,
    CYCLO_ERR_DOMAIN = 1,
    CYCLO_ERR_CONFIG = 2,
    CYCLO_ERR_NUMERICAL = 3,
    CYCLO_ERR_COVERAGE = 4,
    CYCLO_ERR_SINGULARITY = 5,
    CYCLO_ERR_NULL = 6,
    CYCLO_ERR_INTERNAL = 7
} cyclo_status;

typedef struct cyclo_filter cyclo_filter;
typedef struct cyclo_model cyclo_model;
typedef struct cyclo_scheme cyclo_scheme;
typedef struct cyclo_series cyclo_series;
typedef struct cyclo_mc_report cyclo_mc_report;

CYCLO_API const char* cyclo_version(void);
CYCLO_API const char* cyclo_last_error(void);
CYCLO_API const char* cyclo_status_name(cyclo_status status);
CYCLO_API void cyclo_string_free(char* s);

typedef void (*cyclo_warning_fn)(const char* message, void* user);
/* NULL restores the default handler, which writes to stderr. */
CYCLO_API void cyclo_set_warning_handler(cyclo_warning_fn fn, void* user);

/* ---- filters ---- */

typedef struct {
    double support_lo;
    double support_hi;
    double L0;
    double L2;
    int has_time_form;
    int time_form_approximate;
    double time_radius;
} cyclo_filter_info;

/* name: "shannon", "meyer" or "mexican_hat" (sigma used by the latter). */
CYCLO_API cyclo_status cyclo_filter_create(const char* name, double sigma, cyclo_filter** out);
/* psi_hat sampled at ascending eta >= 0, linearly interpolated, zero outside. */
CYCLO_API cyclo_status cyclo_filter_create_tabulated(const char* name, const double* eta, const double* values,
                                                     size_t n, cyclo_filter** out);
CYCLO_API void cyclo_filter_destroy(cyclo_filter* filter);
CYCLO_API cyclo_status cyclo_filter_get_info(const cyclo_filter* filter, cyclo_filter_info* out);
CYCLO_API cyclo_status cyclo_filter_name(const cyclo_filter* filter, const char** out);
CYCLO_API cyclo_status cyclo_filter_psi_hat(const cyclo_filter* filter, double eta, double* out);
CYCLO_API cyclo_status cyclo_filter_psi_time(const cyclo_filter* filter, double t, double* out);
CYCLO_API cyclo_status cyclo_filter_moment(const cyclo_filter* filter, int power, int use_simpson, double* out);
CYCLO_API cyclo_status cyclo_filter_quartic(const cyclo_filter* filter, int use_simpson, double* out);
CYCLO_API cyclo_status cyclo_filter_effective_support(const cyclo_filter* filter, double tol, double* b_eff,
                                                      double* a_eff);
CYCLO_API cyclo_status cyclo_periodized_energy(const cyclo_filter* filter, double eta, double c, double* out);
CYCLO_API cyclo_status cyclo_i_of_c(const cyclo_filter* filter, double c, double* out);
CYCLO_API cyclo_status cyclo_i_of_c_quadrature(const cyclo_filter* filter, double c, double* out);
CYCLO_API cyclo_status cyclo_shannon_i_closed(double c, double* out);
/* JSON object with support, moments, reference constants and I(c) for each c. */
CYCLO_API cyclo_status cyclo_filter_info_json(const cyclo_filter* filter, const double* c_values, size_t n_c,
                                              char** json);

/* ---- spectral model ---- */

typedef double (*cyclo_taper_fn)(double lambda, void* user);

CYCLO_API cyclo_status cyclo_model_create(double s0, double alpha, cyclo_model** out);
/* `taper` must stay callable for the lifetime of the model; `name` identifies it in caches. */
CYCLO_API cyclo_status cyclo_model_create_with_taper(double s0, double alpha, cyclo_taper_fn taper, void* user,
                                                     const char* name, cyclo_model** out);
/* s0 = arccos(u), alpha = d. */
CYCLO_API cyclo_status cyclo_model_from_gegenbauer(double u, double d, double sigma_eps, cyclo_model** out);
CYCLO_API void cyclo_model_destroy(cyclo_model* model);
CYCLO_API cyclo_status cyclo_model_params(const cyclo_model* model, double* s0, double* alpha);
CYCLO_API cyclo_status cyclo_default_taper(double lambda, double* out);
CYCLO_API cyclo_status cyclo_spectral_density(const cyclo_model* model, double lambda, double* out);
CYCLO_API cyclo_status cyclo_spectral_mass(const cyclo_model* model, double lo, double hi, double* out);
CYCLO_API cyclo_status cyclo_i_zeta(const cyclo_model* model, const cyclo_filter* filter, double zeta, double x,
                                    double* out);
CYCLO_API cyclo_status cyclo_coefficient_covariance(const cyclo_model* model, const cyclo_filter* filter, double a,
                                                    double lag_distance, double* out);
CYCLO_API cyclo_status cyclo_coefficient_variance_direct(const cyclo_model* model, const cyclo_filter* filter,
                                                         double a, double* out);
CYCLO_API cyclo_status cyclo_quadratic_variance(const cyclo_model* model, const cyclo_filter* filter, double a,
                                                double gamma, int64_t m, double* out);

/* ---- level schemes ---- */

enum { CYCLO_SCALE_GEOMETRIC = 0, CYCLO_SCALE_LINEAR = 1, CYCLO_SCALE_EXPLICIT = 2 };
enum { CYCLO_SHIFT_PROPORTIONAL = 0, CYCLO_SHIFT_CONSTANT = 1 };
enum { CYCLO_COUNT_CONSTANT = 0, CYCLO_COUNT_POWER = 1, CYCLO_COUNT_EXPLICIT = 2 };

typedef struct {
    int scale_kind;
    double base;            /* geometric: a_j = base^j */
    double step;            /* linear: a_j = step * j */
    const double* a_list;   /* explicit: a_j = a_list[j - 1] */
    size_t a_count;
    int shift_kind;
    double c;               /* proportional: gamma_j = a_j / c */
    double gamma;           /* constant: gamma_j = gamma */
    int count_kind;
    int64_t m;              /* constant: m_j = m */
    double m_coef;          /* power: m_j = floor(m_coef * a_j^m_power) */
    double m_power;
    const int64_t* m_list;  /* explicit: m_j = m_list[j - 1] */
    size_t m_count;
    int64_t M_cap;          /* <= 0: uncapped */
} cyclo_scheme_spec;

/* Geometric base 2, gamma_j = a_j, m_j = 4096, M_cap = 2^22. */
CYCLO_API void cyclo_scheme_spec_default(cyclo_scheme_spec* spec);
CYCLO_API cyclo_status cyclo_scheme_create(const cyclo_scheme_spec* spec, cyclo_scheme** out);
CYCLO_API void cyclo_scheme_destroy(cyclo_scheme* scheme);
CYCLO_API cyclo_status cyclo_scheme_level(const cyclo_scheme* scheme, int j, double* a, double* gamma, int64_t* m);
CYCLO_API cyclo_status cyclo_scheme_c(const cyclo_scheme* scheme, double* c);
CYCLO_API cyclo_status cyclo_compute_M(const cyclo_scheme* scheme, int j, int64_t* M, double* uncapped, int* capped);
CYCLO_API cyclo_status cyclo_validate_scheme_json(const cyclo_scheme* scheme, const cyclo_filter* filter, int j_lo,
                                                  int j_hi, char** json);

/* ---- series and simulation ---- */

CYCLO_API cyclo_status cyclo_series_create(double t0, double dt, const double* values, size_t n, cyclo_series** out);
CYCLO_API void cyclo_series_destroy(cyclo_series* series);
CYCLO_API cyclo_status cyclo_series_info(const cyclo_series* series, double* t0, double* dt, size_t* n);
CYCLO_API cyclo_status cyclo_series_values(const cyclo_series* series, const double** values);

CYCLO_API cyclo_status cyclo_gegenbauer_coeffs(double u, double d, int N, double* out /* N + 1 */);
CYCLO_API cyclo_status cyclo_gegenbauer_coeff_explicit(double u, double d, int n, double* out, double* cancellation);
CYCLO_API cyclo_status cyclo_simulate_gegenbauer(double u, double d, double sigma_eps, size_t len, uint64_t seed,
                                                 uint64_t replicate, int truncation_N, cyclo_series** out);
CYCLO_API cyclo_status cyclo_simulate_spectral(const cyclo_model* model, double t0, double dt, size_t n, double band,
                                               int bins, uint64_t seed, uint64_t replicate, cyclo_series** out);
/* Writes m coefficients drawn from the exact Toeplitz Gaussian law. */
CYCLO_API cyclo_status cyclo_simulate_coefficients_exact(const cyclo_model* model, const cyclo_filter* filter,
                                                         double a, double gamma, int64_t m, uint64_t seed,
                                                         uint64_t replicate, uint64_t stream, double* out);

/* ---- transform ---- */

/* Writes `count` coefficients delta_j1..delta_j,count; *a_out, *gamma_out may be NULL. */
CYCLO_API cyclo_status cyclo_filter_coefficients(const cyclo_series* series, const cyclo_filter* filter,
                                                 const cyclo_scheme* scheme, int j, int64_t count, double* out,
                                                 double* a_out, double* gamma_out);

/* ---- estimation ---- */

typedef struct {
    double delta_bar;
    double delta_incr;
    double y1, y2;
    double eps;
    double t1, t2;
    int truncation_active;
    int truncation_degenerate;
    double s0_hat, alpha_hat;
    double V[4]; /* row-major; NaN when undefined */
    int64_t m, M;
} cyclo_estimate;

typedef struct {
    double L0, L2, I_c;
    double V1;
    double V[4];          /* closed form, row-major */
    double V_sandwich[4]; /* delta-method product */
    double rho;
    double jacobian[4];
} cyclo_asymptotics;

CYCLO_API cyclo_status cyclo_mean_square_stat(const double* values, size_t n, double* out);
CYCLO_API cyclo_status cyclo_increment_stat(double dbar_j1, double dbar_j2, double a_j1, double a_j2, double* out);
CYCLO_API cyclo_status cyclo_normalized_stats(double dbar, double dincr, const cyclo_filter* filter, int64_t m,
                                              double increment_weight /* <= 0: m */, const cyclo_model* truth,
                                              double* s1, double* s2);
CYCLO_API cyclo_status cyclo_phi(double s0, double alpha, double* y1, double* y2);
CYCLO_API cyclo_status cyclo_phi_inverse(double y1, double y2, double* s0, double* alpha);
CYCLO_API cyclo_status cyclo_lambert_w0(double y, double* out);
CYCLO_API cyclo_status cyclo_truncate(double y1, double y2, double eps, double* t1, double* t2, int* active,
                                      int* degenerate);
CYCLO_API cyclo_status cyclo_jacobian_phi(double s0, double alpha, double out[4]);
/* M <= 0 means M = m; V is evaluated at the estimate. */
CYCLO_API cyclo_status cyclo_adjusted_estimate(double dbar, double dincr, const cyclo_filter* filter, int64_t m,
                                               int64_t M, double c, cyclo_estimate* out);
CYCLO_API cyclo_status cyclo_asymptotics_compute(double s0, double alpha, const cyclo_filter* filter, double c,
                                                 cyclo_asymptotics* out);

/* ---- Monte Carlo ---- */

typedef struct {
    int64_t replicates;
    double s0, alpha;
    const cyclo_filter* filter;
    const cyclo_scheme* scheme;
    int level;
    const char* simulator; /* "exact-covariance", "spectral-bin", "gegenbauer-ma" */
    uint64_t seed;
    int workers;
    double gegenbauer_u, gegenbauer_d, gegenbauer_sigma;
    double band;           /* <= 0: automatic */
    int bins;
    int truncation_N;
} cyclo_mc_config;

CYCLO_API void cyclo_mc_config_default(cyclo_mc_config* cfg);
CYCLO_API cyclo_status cyclo_mc_run(const cyclo_mc_config* cfg, cyclo_mc_report** out);
CYCLO_API void cyclo_mc_report_destroy(cyclo_mc_report* report);
CYCLO_API cyclo_status cyclo_mc_report_json(const cyclo_mc_report* report, int include_samples, char** json);
CYCLO_API cyclo_status cyclo_mc_report_samples(const cyclo_mc_report* report, const double** s1, const double** s2,
                                               size_t* n);
CYCLO_API cyclo_status cyclo_mc_report_estimate(const cyclo_mc_report* report, size_t i, double* s0_hat,
                                                double* alpha_hat, int* truncated);
CYCLO_API cyclo_status cyclo_mc_report_runtime(const cyclo_mc_report* report, double* seconds);

CYCLO_API cyclo_status cyclo_normality_test(const double* samples, size_t n, double* statistic, double* p_value);
/* Writes n (theoretical, sample) quantile pairs. */
CYCLO_API cyclo_status cyclo_qq_data(const double* samples, size_t n, double* theoretical, double* sample);
CYCLO_API cyclo_status cyclo_ellipse(const double* xs, const double* ys, size_t n, double level, double center[2],
                                     double axes[2], double* angle);
/* Writes n/2 + 1 (frequency, power) pairs. */
CYCLO_API cyclo_status cyclo_periodogram(const cyclo_series* series, double* freq, double* power);
CYCLO_API cyclo_status cyclo_sample_autocovariance(const cyclo_series* series, size_t maxlag, double* out);

#ifdef __cplusplus
}
#endif

#endif
