/*
 * C interface of the risfso library.
 *
 * Every function returns a risfso_status. On failure the message of the
 * calling thread is available through risfso_last_error() until the next
 * call on that thread. Strings handed out by the library are released with
 * risfso_string_free().
 */
#ifndef RISFSO_RISFSO_H
#define RISFSO_RISFSO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RISFSO_API __declspec(dllexport)
#else
#define RISFSO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum risfso_status {
    RISFSO_OK = 0,
    RISFSO_ERR_INVALID_PARAMS = 1,
    RISFSO_ERR_NON_CONVERGENT = 2,
    RISFSO_ERR_POLE_HIT = 3,
    RISFSO_ERR_DOMAIN = 4,
    RISFSO_ERR_STRIP = 5,
    RISFSO_ERR_SPEC = 6,
    RISFSO_ERR_DEGENERATE_EXPONENTS = 7,
    RISFSO_ERR_CONFIG = 8,
    RISFSO_ERR_UNKNOWN_PROFILE = 9,
    RISFSO_ERR_COMPUTE = 10,
    RISFSO_ERR_IO = 11,
    RISFSO_ERR_NULL_ARGUMENT = 20,
    RISFSO_ERR_INTERNAL = 99
} risfso_status;

RISFSO_API const char* risfso_version(void);
RISFSO_API const char* risfso_last_error(void);
RISFSO_API const char* risfso_status_name(risfso_status status);
RISFSO_API void risfso_string_free(char* s);

/* ---- Fox-H ------------------------------------------------------------- */

typedef struct risfso_gamma_pair {
    double coeff;
    double scale;
} risfso_gamma_pair;

typedef struct risfso_foxh risfso_foxh;

/* upper holds p pairs (first n are numerator factors), lower holds q pairs
 * (first m are numerator factors). */
RISFSO_API risfso_status risfso_foxh_create(int m, int n, const risfso_gamma_pair* upper, size_t p,
                                            const risfso_gamma_pair* lower, size_t q, risfso_foxh** out);
RISFSO_API void risfso_foxh_destroy(risfso_foxh* h);
RISFSO_API risfso_status risfso_foxh_eval(const risfso_foxh* h, double z, double* out);

/* ---- channels ---------------------------------------------------------- */

typedef struct risfso_gg {
    double alpha;
    double beta;
    double omega;
} risfso_gg;

typedef struct risfso_hop {
    risfso_gg first;
    risfso_gg second;
    int has_pointing;
    double a0;
    double rho2;
} risfso_hop;

typedef struct risfso_cascade risfso_cascade;

RISFSO_API risfso_status risfso_cascade_create(const risfso_hop* hops, size_t k, risfso_cascade** out);
RISFSO_API void risfso_cascade_destroy(risfso_cascade* c);
RISFSO_API risfso_status risfso_cascade_pdf(const risfso_cascade* c, double x, double* out);
RISFSO_API risfso_status risfso_cascade_cdf(const risfso_cascade* c, double x, double* out);
RISFSO_API risfso_status risfso_cascade_moment(const risfso_cascade* c, double r, double* out);

/* ---- metrics ----------------------------------------------------------- */

typedef struct risfso_link_budget {
    double mean_snr_fso; /* linear */
    double mean_snr_rf;  /* linear */
} risfso_link_budget;

RISFSO_API risfso_status risfso_link_budget_from_power(double power_dbm, double fso_noise_dbm, double rf_noise_dbm,
                                                       risfso_link_budget* out);

RISFSO_API risfso_status risfso_outage(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb,
                                       double gamma_th, double* out);
/* numerical_residue (may be NULL) is set to 1 when the closed form was singular. */
RISFSO_API risfso_status risfso_outage_asymptotic(const risfso_cascade* fso, const risfso_cascade* rf,
                                                  risfso_link_budget lb, double gamma_th, double* out,
                                                  int* numerical_residue);
RISFSO_API risfso_status risfso_diversity_order(const risfso_cascade* fso, const risfso_cascade* rf, double* out);
RISFSO_API risfso_status risfso_avg_ber_df(const risfso_cascade* fso, const risfso_cascade* rf,
                                           risfso_link_budget lb, double p, double q, double* out);

typedef struct risfso_capacity_result {
    double value;
    double eta1;
    double eta2;
    double eta12;
    double eta21;
    int fallback; /* 1 when a cross term used direct quadrature */
} risfso_capacity_result;

RISFSO_API risfso_status risfso_capacity(const risfso_cascade* fso, const risfso_cascade* rf, risfso_link_budget lb,
                                         risfso_capacity_result* out);

/* ---- Monte Carlo ------------------------------------------------------- */

typedef struct risfso_mc_estimate {
    double value;
    double std_error;
    double ci_low;
    double ci_high;
    int64_t n_samples;
} risfso_mc_estimate;

typedef enum risfso_metric { RISFSO_METRIC_OUTAGE = 0, RISFSO_METRIC_BER = 1, RISFSO_METRIC_CAPACITY = 2 } risfso_metric;

/* arg is gamma_th for outage and q for BER (p = 1); ignored for capacity. */
RISFSO_API risfso_status risfso_mc_estimate_metric(const risfso_cascade* fso, const risfso_cascade* rf,
                                                   risfso_link_budget lb, risfso_metric metric, double arg,
                                                   int64_t n_samples, uint64_t seed, uint64_t stream_id,
                                                   risfso_mc_estimate* out);

/* ---- sweeps ------------------------------------------------------------ */

/* JSON array describing the builtin parameter profiles. */
RISFSO_API risfso_status risfso_profiles_json(char** out);
/* JSON array of builtin preset names. */
RISFSO_API risfso_status risfso_presets_json(char** out);

/* Parses and checks a config (JSON text). On success *summary (may be NULL)
 * receives a short human-readable description. */
RISFSO_API risfso_status risfso_config_validate(const char* config_json, char** summary);

typedef struct risfso_sweep_overrides {
    const char* output_dir; /* NULL keeps the config value */
    const char* mode;       /* NULL keeps the config value */
    int has_seed;
    uint64_t seed;
    int has_samples;
    int64_t samples;
    int has_timing;
    int timing;
    unsigned threads; /* 0 = hardware concurrency */
} risfso_sweep_overrides;

/* Runs a sweep from JSON text and writes CSV (and SVG when enabled).
 * *report (may be NULL) receives a JSON object with the written paths,
 * config hash, row count and per-point errors. */
RISFSO_API risfso_status risfso_sweep_run(const char* config_json, const risfso_sweep_overrides* overrides,
                                          char** report);
/* Same for a builtin preset; writes one CSV per turbulence profile. */
RISFSO_API risfso_status risfso_preset_run(const char* preset, const risfso_sweep_overrides* overrides,
                                           char** report);

#ifdef __cplusplus
}
#endif

#endif
