#include "bubbledate.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <numeric>
#include <string>

#include "adaptive.hpp"
#include "estimators.hpp"
#include "experiments.hpp"
#include "model.hpp"

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const char* msg) { g_last_error = msg; }

bd_status fail(bd_status code, const char* msg) {
    set_error(msg);
    return code;
}

// Runs a callable, translating C++ exceptions into status codes.
template <typename Fn>
bd_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const bubbledate::degenerate_segment_error& e) {
        return fail(BD_ERR_ESTIMATION, e.what());
    } catch (const bubbledate::degenerate_window_error& e) {
        return fail(BD_ERR_ESTIMATION, e.what());
    } catch (const bubbledate::bandwidth_error& e) {
        return fail(BD_ERR_ESTIMATION, e.what());
    } catch (const std::domain_error& e) {
        return fail(BD_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(BD_ERR_INVALID, e.what());
    } catch (const std::bad_alloc&) {
        return fail(BD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(BD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(BD_ERR_INTERNAL, "unknown error");
    }
}

bubbledate::KernelSpec to_kernel(const bd_kernel_spec* kernel) {
    bubbledate::KernelSpec spec;
    if (!kernel) return spec;
    spec.kind = kernel->kind == BD_KERNEL_GAUSSIAN ? bubbledate::KernelKind::kGaussian
                                                   : bubbledate::KernelKind::kEpanechnikov;
    switch (kernel->rule) {
        case BD_BANDWIDTH_EXPLICIT:
            spec.rule = bubbledate::BandwidthRule::kExplicit;
            spec.bandwidth = kernel->value;
            break;
        case BD_BANDWIDTH_FIXED_POWER:
            spec.rule = bubbledate::BandwidthRule::kFixedPower;
            spec.power = kernel->value;
            break;
        case BD_BANDWIDTH_CROSS_VALIDATION:
            spec.rule = bubbledate::BandwidthRule::kCrossValidation;
            break;
    }
    return spec;
}

bd_dates to_dates(const bubbledate::BreakEstimates& est) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    bd_dates d;
    d.k_e = est.k_e.value_or(-1);
    d.k_c = est.k_c.value_or(-1);
    d.k_r = est.k_r.value_or(-1);
    d.tau_e = est.tau_e().value_or(nan);
    d.tau_c = est.tau_c().value_or(nan);
    d.tau_r = est.tau_r().value_or(nan);
    return d;
}

}  // namespace

struct bd_vol {
    bubbledate::VolatilityProfile profile;
};

struct bd_mc_result {
    bubbledate::McResult result;
};

extern "C" {

const char* bd_last_error(void) { return g_last_error.c_str(); }

const char* bd_version(void) { return "1.0.0"; }

bd_status bd_vol_constant(double sigma, bd_vol** out) {
    if (!out) return fail(BD_ERR_INVALID, "out pointer is null");
    return guarded([&] {
        bubbledate::VolatilityProfile p = bubbledate::ConstantVol{sigma};
        bubbledate::validate_profile(p);
        *out = new bd_vol{std::move(p)};
        return BD_OK;
    });
}

bd_status bd_vol_onebreak(double sigma0, double sigma1, double tau, bd_vol** out) {
    if (!out) return fail(BD_ERR_INVALID, "out pointer is null");
    return guarded([&] {
        bubbledate::VolatilityProfile p = bubbledate::OneBreakVol{sigma0, sigma1, tau};
        bubbledate::validate_profile(p);
        *out = new bd_vol{std::move(p)};
        return BD_OK;
    });
}

bd_status bd_vol_piecewise(const double* fractions, const double* sigmas, size_t n,
                           bd_vol** out) {
    if (!out || !fractions || !sigmas)
        return fail(BD_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        bubbledate::PiecewiseVol pw;
        pw.knots.reserve(n);
        for (size_t i = 0; i < n; ++i) pw.knots.emplace_back(fractions[i], sigmas[i]);
        bubbledate::VolatilityProfile p = std::move(pw);
        bubbledate::validate_profile(p);
        *out = new bd_vol{std::move(p)};
        return BD_OK;
    });
}

void bd_vol_free(bd_vol* vol) { delete vol; }

bd_status bd_vol_at(const bd_vol* vol, int64_t t, int64_t T, double* sigma_out) {
    if (!vol || !sigma_out) return fail(BD_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        *sigma_out = bubbledate::volatility_at(vol->profile, t, T);
        return BD_OK;
    });
}

bd_status bd_simulate(const bd_sim_config* config, const bd_vol* vol, double* y_out,
                      double* sigma_out) {
    if (!config || !vol || !y_out) return fail(BD_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        bubbledate::McConfig mc;
        mc.T = config->T;
        mc.reps = 1;
        mc.c_a = config->c_a;
        mc.c_b = config->c_b;
        mc.tau_e = config->tau_e;
        mc.tau_c = config->tau_c;
        mc.tau_r = config->tau_r;
        mc.y0 = config->y0;
        mc.drift0 = config->drift0;
        mc.drift1 = config->drift1;
        const bubbledate::DgpParams params = mc.dgp();
        params.validate();
        const bubbledate::ShockSeries shocks =
            bubbledate::generate_shocks(vol->profile, config->T, config->seed);
        const bubbledate::Series y = bubbledate::simulate(params, shocks);
        std::copy(y.values.begin(), y.values.end(), y_out);
        if (sigma_out)
            for (int64_t t = 1; t <= config->T; ++t)
                sigma_out[t - 1] = bubbledate::volatility_at(vol->profile, t, config->T);
        return BD_OK;
    });
}

bd_kernel_spec bd_kernel_default(void) {
    bd_kernel_spec spec;
    spec.kind = BD_KERNEL_EPANECHNIKOV;
    spec.rule = BD_BANDWIDTH_FIXED_POWER;
    spec.value = 0.4;
    return spec;
}

bd_status bd_estimate(const double* y, size_t n, double trim, const bd_kernel_spec* kernel,
                      bd_estimate_result* out) {
    if (!y || !out) return fail(BD_ERR_INVALID, "null pointer argument");
    if (n < 2) return fail(BD_ERR_INVALID, "series must contain y_0 and at least one observation");
    return guarded([&] {
        bubbledate::Series series;
        series.values.assign(y, y + n);
        bubbledate::TrimConfig trim_cfg{trim};
        trim_cfg.validate();
        const bd_kernel_spec def = bd_kernel_default();
        const bubbledate::AdaptiveResult res =
            bubbledate::adaptive_estimate(series, trim_cfg, to_kernel(kernel ? kernel : &def));

        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::memset(out, 0, sizeof(*out));
        out->ols = to_dates(res.ols);
        out->wls = to_dates(res.wls);
        out->wls_failed = res.wls_failed ? 1 : 0;
        out->window_fallback = res.window_fallback ? 1 : 0;
        out->bandwidth_at_boundary = res.bandwidth_at_boundary ? 1 : 0;
        if (res.wls_failed) {
            out->bandwidth = nan;
            out->sigma2_min = out->sigma2_mean = out->sigma2_max = nan;
        } else {
            out->bandwidth = res.bandwidth;
            const auto& s2 = res.variance.sigma2;
            out->sigma2_min = *std::min_element(s2.begin(), s2.end());
            out->sigma2_max = *std::max_element(s2.begin(), s2.end());
            out->sigma2_mean = std::accumulate(s2.begin(), s2.end(), 0.0) /
                               static_cast<double>(s2.size());
            out->variance_floor_applied = res.variance.floor_applied ? 1 : 0;
        }
        return BD_OK;
    });
}

bd_mc_config bd_mc_default(void) {
    bd_mc_config cfg;
    std::memset(&cfg, 0, sizeof(cfg));
    cfg.T = 400;
    cfg.reps = 5000;
    cfg.c_a = 6.0;
    cfg.c_b = 6.0;
    cfg.tau_e = 0.4;
    cfg.tau_c = 0.6;
    cfg.tau_r = 0.7;
    cfg.y0 = 1500.0;
    cfg.drift0 = 1.0 / 800.0;
    cfg.drift1 = 1.0 / 800.0;
    cfg.base_seed = 0;
    cfg.trim = 0.05;
    cfg.kernel = bd_kernel_default();
    cfg.detection_window = 0;
    cfg.threads = 0;
    return cfg;
}

bd_status bd_mc_run(const bd_mc_config* config, const bd_vol* vol, bd_mc_result** out) {
    if (!config || !vol || !out) return fail(BD_ERR_INVALID, "null pointer argument");
    return guarded([&] {
        bubbledate::McConfig mc;
        mc.T = config->T;
        mc.reps = config->reps;
        mc.c_a = config->c_a;
        mc.c_b = config->c_b;
        mc.tau_e = config->tau_e;
        mc.tau_c = config->tau_c;
        mc.tau_r = config->tau_r;
        mc.y0 = config->y0;
        mc.drift0 = config->drift0;
        mc.drift1 = config->drift1;
        mc.volatility = vol->profile;
        mc.base_seed = config->base_seed;
        mc.trim = bubbledate::TrimConfig{config->trim};
        mc.kernel = to_kernel(&config->kernel);
        mc.detection_window = config->detection_window;
        mc.threads = config->threads;
        auto result = std::make_unique<bd_mc_result>();
        result->result = bubbledate::run_experiment(mc);
        *out = result.release();
        return BD_OK;
    });
}

void bd_mc_free(bd_mc_result* result) { delete result; }

size_t bd_mc_num_bins(const bd_mc_result* result) {
    if (!result) return 0;
    return result->result.histograms[0][0].counts.size();
}

bd_status bd_mc_histogram(const bd_mc_result* result, bd_method method, bd_target target,
                          int64_t* counts, int64_t* dropped, int64_t* total) {
    if (!result || !counts) return fail(BD_ERR_INVALID, "null pointer argument");
    if (target < BD_TARGET_EMERGE || target > BD_TARGET_RECOVER)
        return fail(BD_ERR_INVALID, "unknown target");
    const auto& h = result->result.histogram(
        method == BD_METHOD_OLS ? bubbledate::Method::kOls : bubbledate::Method::kWls,
        static_cast<bubbledate::Target>(target));
    std::copy(h.counts.begin(), h.counts.end(), counts);
    if (dropped) *dropped = h.dropped;
    if (total) *total = h.total;
    return BD_OK;
}

bd_status bd_mc_detection(const bd_mc_result* result, bd_method method, bd_target target,
                          double* correct_freq, double* mode_bin, int64_t* dropped) {
    if (!result) return fail(BD_ERR_INVALID, "null pointer argument");
    if (target < BD_TARGET_EMERGE || target > BD_TARGET_RECOVER)
        return fail(BD_ERR_INVALID, "unknown target");
    const auto& det = result->result.summary.at(
        method == BD_METHOD_OLS ? bubbledate::Method::kOls : bubbledate::Method::kWls,
        static_cast<bubbledate::Target>(target));
    if (correct_freq) *correct_freq = det.correct_freq;
    if (mode_bin) *mode_bin = det.mode_bin;
    if (dropped) *dropped = det.dropped;
    return BD_OK;
}

bd_status bd_mc_elapsed_seconds(const bd_mc_result* result, double* seconds) {
    if (!result || !seconds) return fail(BD_ERR_INVALID, "null pointer argument");
    *seconds = result->result.elapsed_seconds;
    return BD_OK;
}

}  // extern "C"
