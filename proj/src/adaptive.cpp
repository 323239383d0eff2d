#include "adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bubbledate {

namespace {

constexpr double kVarianceFloorRel = 1e-6;
constexpr double kRankTol = 1e-12;

double kernel_value(KernelKind kind, double u) {
    if (kind == KernelKind::kGaussian)
        return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
    const double a = std::abs(u);
    return a <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

// Fits dy_t = mu + delta * y_{t-1} on t in (lo, hi] and writes the window
// residuals. Throws on windows shorter than two observations or with a
// constant regressor.
void fit_window(const Series& y, std::int64_t lo, std::int64_t hi, double& mu, double& delta,
                std::vector<double>& residuals) {
    const std::int64_t n = hi - lo;
    if (n < 2) throw degenerate_window_error("regime window shorter than two observations");
    long double s1 = 0.0L, sy = 0.0L, syy = 0.0L, sd = 0.0L, sdy = 0.0L;
    for (std::int64_t t = lo + 1; t <= hi; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const long double yl = y.values[i - 1];
        const long double dy = y.values[i] - y.values[i - 1];
        s1 += 1.0L;
        sy += yl;
        syy += yl * yl;
        sd += dy;
        sdy += dy * yl;
    }
    const long double det = s1 * syy - sy * sy;
    if (!(det > kRankTol * s1 * std::max(1.0L, syy)))
        throw degenerate_window_error("regime window regressors are collinear");
    const long double d = (s1 * sdy - sy * sd) / det;
    const long double m = (sd - d * sy) / s1;
    mu = static_cast<double>(m);
    delta = static_cast<double>(d);
    for (std::int64_t t = lo + 1; t <= hi; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const double yl = y.values[i - 1];
        const double dy = y.values[i] - y.values[i - 1];
        residuals[i - 1] = dy - (mu + delta * yl);
    }
}

}  // namespace

RegimeRegressionFit regime_residuals(const Series& y, const BreakEstimates& est) {
    if (!est.all_available())
        throw std::invalid_argument("regime_residuals requires all three break dates");
    return regime_residuals(y, *est.k_e, *est.k_c, *est.k_c, *est.k_r);
}

RegimeRegressionFit regime_residuals(const Series& y, std::int64_t win1_lo,
                                     std::int64_t win1_hi, std::int64_t win2_lo,
                                     std::int64_t win2_hi) {
    const std::int64_t T = y.T();
    if (T < 1) throw std::invalid_argument("empty series");
    if (win1_lo < 0 || win1_hi > T || win2_lo < 0 || win2_hi > T || win1_hi > win2_lo)
        throw std::invalid_argument("regime windows out of range or overlapping");
    RegimeRegressionFit fit;
    fit.residuals.resize(static_cast<std::size_t>(T));
    for (std::int64_t t = 1; t <= T; ++t) {
        const auto i = static_cast<std::size_t>(t);
        fit.residuals[i - 1] = y.values[i] - y.values[i - 1];
    }
    // The two windows are disjoint, so the joint four-regressor least
    // squares problem decouples into two independent window fits.
    fit_window(y, win1_lo, win1_hi, fit.mu1, fit.delta1, fit.residuals);
    fit_window(y, win2_lo, win2_hi, fit.mu2, fit.delta2, fit.residuals);
    return fit;
}

VarianceEstimate kernel_variance(const std::vector<double>& residuals, KernelKind kind,
                                 double bandwidth) {
    const auto T = static_cast<std::int64_t>(residuals.size());
    if (T < 3) throw std::invalid_argument("kernel_variance needs at least three residuals");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw bandwidth_error("bandwidth must be positive and finite");
    const double tb = static_cast<double>(T) * bandwidth;
    // Kernel weights depend only on |t - i|; beyond d_max they vanish (or
    // underflow, for the Gaussian).
    std::int64_t d_max = T - 1;
    if (kind == KernelKind::kEpanechnikov)
        d_max = std::min<std::int64_t>(d_max, static_cast<std::int64_t>(std::floor(tb)));
    else
        d_max = std::min<std::int64_t>(d_max, static_cast<std::int64_t>(std::ceil(40.0 * tb)));
    std::vector<double> kw(static_cast<std::size_t>(d_max) + 1, 0.0);
    for (std::int64_t d = 1; d <= d_max; ++d)
        kw[static_cast<std::size_t>(d)] = kernel_value(kind, static_cast<double>(d) / tb);

    VarianceEstimate out;
    out.sigma2.resize(static_cast<std::size_t>(T));
    for (std::int64_t t = 1; t <= T; ++t) {
        long double num = 0.0L, den = 0.0L;
        const std::int64_t i_lo = std::max<std::int64_t>(1, t - d_max);
        const std::int64_t i_hi = std::min<std::int64_t>(T, t + d_max);
        for (std::int64_t i = i_lo; i <= i_hi; ++i) {
            if (i == t) continue;
            const double w = kw[static_cast<std::size_t>(std::llabs(t - i))];
            const double r = residuals[static_cast<std::size_t>(i - 1)];
            num += static_cast<long double>(w) * r * r;
            den += w;
        }
        if (!(den > 0.0L))
            throw bandwidth_error("all kernel weights vanish; bandwidth too small");
        out.sigma2[static_cast<std::size_t>(t - 1)] = static_cast<double>(num / den);
    }
    const double peak = *std::max_element(out.sigma2.begin(), out.sigma2.end());
    if (!(peak > 0.0)) {
        // All residuals are zero (noiseless input); any constant variance
        // yields the same weighted fit, so use 1.
        std::fill(out.sigma2.begin(), out.sigma2.end(), 1.0);
        out.floor_applied = true;
        return out;
    }
    const double floor = kVarianceFloorRel * peak;
    for (double& v : out.sigma2) {
        if (v < floor) {
            v = floor;
            out.floor_applied = true;
        }
    }
    return out;
}

std::pair<double, bool> resolve_bandwidth(const KernelSpec& kernel,
                                          const std::vector<double>& residuals,
                                          std::int64_t T) {
    if (T < 3) throw std::invalid_argument("resolve_bandwidth needs T >= 3");
    const double Td = static_cast<double>(T);
    switch (kernel.rule) {
        case BandwidthRule::kExplicit:
            if (!(kernel.bandwidth > 0.0))
                throw bandwidth_error("explicit bandwidth must be positive");
            return {kernel.bandwidth, false};
        case BandwidthRule::kFixedPower:
            return {std::pow(Td, -kernel.power), false};
        case BandwidthRule::kCrossValidation:
            break;
    }
    // Log grid between T^(-2/3) and T^(-1/10); pick the bandwidth whose
    // leave-one-out prediction of the squared residuals is best. Smallest
    // bandwidth wins ties.
    constexpr int kGridSize = 20;
    const double lo = std::pow(Td, -2.0 / 3.0);
    const double hi = std::pow(Td, -1.0 / 10.0);
    double best_b = 0.0;
    double best_score = std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int g = 0; g < kGridSize; ++g) {
        const double frac = static_cast<double>(g) / (kGridSize - 1);
        const double b = lo * std::pow(hi / lo, frac);
        double score;
        try {
            const VarianceEstimate est = kernel_variance(residuals, kernel.kind, b);
            long double acc = 0.0L;
            for (std::size_t i = 0; i < residuals.size(); ++i) {
                const long double diff =
                    static_cast<long double>(residuals[i]) * residuals[i] - est.sigma2[i];
                acc += diff * diff;
            }
            score = static_cast<double>(acc);
        } catch (const bandwidth_error&) {
            continue;
        }
        if (score < best_score) {
            best_score = score;
            best_b = b;
            best_index = g;
        }
    }
    if (best_index < 0) throw bandwidth_error("cross-validation found no usable bandwidth");
    return {best_b, best_index == 0 || best_index == kGridSize - 1};
}

AdaptiveResult adaptive_estimate(const Series& y, const TrimConfig& trim,
                                 const KernelSpec& kernel) {
    AdaptiveResult result;
    const std::int64_t T = y.T();
    result.ols = sample_split(y, unit_weights(T), trim, Method::kOls);
    result.wls.method = Method::kWls;
    result.wls.T = T;
    if (!result.ols.k_c) {
        result.wls_failed = true;
        return result;
    }
    const std::int64_t k_c = *result.ols.k_c;
    const std::int64_t k_e = result.ols.k_e.value_or(trim_lower(trim, T));
    const std::int64_t k_r = result.ols.k_r.value_or(trim_upper(trim, T));
    result.window_fallback = !result.ols.k_e || !result.ols.k_r;
    try {
        result.regression = regime_residuals(y, k_e, k_c, k_c, k_r);
        const auto [b, at_boundary] = resolve_bandwidth(kernel, result.regression.residuals, T);
        result.bandwidth = b;
        result.bandwidth_at_boundary = at_boundary;
        result.variance = kernel_variance(result.regression.residuals, kernel.kind, b);
        WeightSeries weights;
        weights.delta.resize(static_cast<std::size_t>(T));
        for (std::size_t i = 0; i < weights.delta.size(); ++i)
            weights.delta[i] = std::sqrt(result.variance.sigma2[i]);
        result.wls = sample_split(y, weights, trim, Method::kWls);
    } catch (const degenerate_window_error&) {
        result.wls_failed = true;
    } catch (const bandwidth_error&) {
        result.wls_failed = true;
    }
    return result;
}

}  // namespace bubbledate
