#ifndef BUBBLEDATE_H
#define BUBBLEDATE_H

/* C interface to the bubble break-date estimation library.
 *
 * All functions return a bd_status code; on failure a human-readable
 * message is available from bd_last_error() (thread-local). Handles
 * returned through out-parameters must be released with the matching
 * *_free function. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    BD_OK = 0,
    BD_ERR_INVALID = 1,  /* bad argument or configuration */
    BD_ERR_DOMAIN = 2,   /* value outside the mathematical domain */
    BD_ERR_ESTIMATION = 3, /* degenerate data made a fit impossible */
    BD_ERR_INTERNAL = 4
} bd_status;

/* Message describing the most recent failure on this thread. Never NULL. */
const char* bd_last_error(void);

const char* bd_version(void);

/* ---- volatility profiles -------------------------------------------- */

typedef struct bd_vol bd_vol;

bd_status bd_vol_constant(double sigma, bd_vol** out);
bd_status bd_vol_onebreak(double sigma0, double sigma1, double tau, bd_vol** out);
/* knots as parallel arrays; fractions[0] must be 0 and fractions strictly
 * increasing in [0,1). */
bd_status bd_vol_piecewise(const double* fractions, const double* sigmas, size_t n,
                           bd_vol** out);
void bd_vol_free(bd_vol* vol);

/* sigma_t for t in 1..T. */
bd_status bd_vol_at(const bd_vol* vol, int64_t t, int64_t T, double* sigma_out);

/* ---- simulation ------------------------------------------------------ */

typedef struct {
    int64_t T;
    double y0;
    double drift0, drift1; /* realized per-step drifts in regimes 1 and 4 */
    double c_a, c_b;       /* local-to-unity roots: phi_a = 1 + c_a/T, phi_b = 1 - c_b/T */
    double tau_e, tau_c, tau_r; /* break fractions; dates are floor(tau*T) */
    uint64_t seed;
} bd_sim_config;

/* y_out receives T+1 values (y_0..y_T); sigma_out, if non-NULL, receives
 * the T volatility values sigma_1..sigma_T. */
bd_status bd_simulate(const bd_sim_config* config, const bd_vol* vol, double* y_out,
                      double* sigma_out);

/* ---- estimation ------------------------------------------------------ */

typedef enum { BD_KERNEL_GAUSSIAN = 0, BD_KERNEL_EPANECHNIKOV = 1 } bd_kernel_kind;

typedef enum {
    BD_BANDWIDTH_EXPLICIT = 0,   /* value = b */
    BD_BANDWIDTH_FIXED_POWER = 1, /* value = p, b = T^(-p) */
    BD_BANDWIDTH_CROSS_VALIDATION = 2 /* value ignored */
} bd_bandwidth_rule;

typedef struct {
    bd_kernel_kind kind;
    bd_bandwidth_rule rule;
    double value;
} bd_kernel_spec;

/* Library defaults: Epanechnikov kernel, b = T^(-0.4). */
bd_kernel_spec bd_kernel_default(void);

typedef struct {
    /* Dates are -1 and fractions NaN when a date is unavailable. */
    int64_t k_e, k_c, k_r;
    double tau_e, tau_c, tau_r;
} bd_dates;

typedef struct {
    bd_dates ols;
    bd_dates wls;
    double bandwidth;           /* NaN when the weighted step failed */
    int bandwidth_at_boundary;
    int window_fallback; /* a missing first-step date was replaced by a trim bound */
    int wls_failed;      /* weighted step failed; its dates are all unavailable */
    double sigma2_min, sigma2_mean, sigma2_max;
    int variance_floor_applied;
} bd_estimate_result;

/* y holds y_0..y_T (n = T+1 values). trim is the edge fraction excluded
 * from each break-date search, typically 0.05. */
bd_status bd_estimate(const double* y, size_t n, double trim, const bd_kernel_spec* kernel,
                      bd_estimate_result* out);

/* ---- Monte Carlo ------------------------------------------------------ */

typedef struct {
    int64_t T;
    int64_t reps;
    double c_a, c_b;
    double tau_e, tau_c, tau_r;
    double y0;
    double drift0, drift1;
    uint64_t base_seed;
    double trim;
    bd_kernel_spec kernel;
    int64_t detection_window;
    int threads; /* 0 = hardware concurrency */
} bd_mc_config;

/* Defaults matching the standard experiment: T=400, reps=5000, c_a=c_b=6,
 * fractions (0.4, 0.6, 0.7), y0=1500, drifts 1/800, trim 0.05, window 0. */
bd_mc_config bd_mc_default(void);

typedef enum { BD_METHOD_OLS = 0, BD_METHOD_WLS = 1 } bd_method;
typedef enum { BD_TARGET_EMERGE = 0, BD_TARGET_COLLAPSE = 1, BD_TARGET_RECOVER = 2 } bd_target;

typedef struct bd_mc_result bd_mc_result;

bd_status bd_mc_run(const bd_mc_config* config, const bd_vol* vol, bd_mc_result** out);
void bd_mc_free(bd_mc_result* result);

/* Number of histogram bins (each bin is 0.01 wide in fraction units). */
size_t bd_mc_num_bins(const bd_mc_result* result);

/* counts must hold bd_mc_num_bins entries; dropped/total may be NULL. */
bd_status bd_mc_histogram(const bd_mc_result* result, bd_method method, bd_target target,
                          int64_t* counts, int64_t* dropped, int64_t* total);

bd_status bd_mc_detection(const bd_mc_result* result, bd_method method, bd_target target,
                          double* correct_freq, double* mode_bin, int64_t* dropped);

bd_status bd_mc_elapsed_seconds(const bd_mc_result* result, double* seconds);

#ifdef __cplusplus
}
#endif

#endif /* BUBBLEDATE_H */
