#include "estimators.hpp"

#include <cmath>
#include <limits>

namespace bubbledate {

namespace {

constexpr std::int64_t kMinSegment = 2;
constexpr double kTrimEps = 1e-9;

}  // namespace

void WeightSeries::validate(std::int64_t T) const {
    if (static_cast<std::int64_t>(delta.size()) != T)
        throw std::invalid_argument("weight series length must equal T");
    for (double d : delta)
        if (!(std::isfinite(d) && d > 0.0))
            throw std::invalid_argument("weights delta_t must be strictly positive and finite");
}

WeightSeries unit_weights(std::int64_t T) {
    WeightSeries w;
    w.delta.assign(static_cast<std::size_t>(T), 1.0);
    return w;
}

void TrimConfig::validate() const {
    if (!(trim > 0.0 && trim < 0.5))
        throw std::invalid_argument("trim fraction must lie in (0, 1/2)");
}

std::int64_t trim_lower(const TrimConfig& trim, std::int64_t T) {
    return static_cast<std::int64_t>(std::ceil(trim.trim * static_cast<double>(T) - kTrimEps));
}

std::int64_t trim_upper(const TrimConfig& trim, std::int64_t T) {
    return static_cast<std::int64_t>(
        std::floor((1.0 - trim.trim) * static_cast<double>(T) + kTrimEps));
}

WeightedMoments::WeightedMoments(const Series& y, const WeightSeries& weights) {
    T_ = y.T();
    if (T_ < 1) throw std::invalid_argument("series must contain y_0 and at least one observation");
    weights.validate(T_);
    a_.resize(static_cast<std::size_t>(T_) + 1, 0.0L);
    b_.resize(static_cast<std::size_t>(T_) + 1, 0.0L);
    c_.resize(static_cast<std::size_t>(T_) + 1, 0.0L);
    for (std::int64_t t = 1; t <= T_; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const long double d = weights.delta[i - 1];
        const long double w = 1.0L / (d * d);
        const long double yl = y.values[i - 1];
        const long double yt = y.values[i];
        a_[i] = a_[i - 1] + w * yl * yl;
        b_[i] = b_[i - 1] + w * yl * yt;
        c_[i] = c_[i - 1] + w * yt * yt;
    }
}

long double WeightedMoments::seg_a(std::int64_t l, std::int64_t m) const {
    return a_[static_cast<std::size_t>(m)] - a_[static_cast<std::size_t>(l - 1)];
}
long double WeightedMoments::seg_b(std::int64_t l, std::int64_t m) const {
    return b_[static_cast<std::size_t>(m)] - b_[static_cast<std::size_t>(l - 1)];
}
long double WeightedMoments::seg_c(std::int64_t l, std::int64_t m) const {
    return c_[static_cast<std::size_t>(m)] - c_[static_cast<std::size_t>(l - 1)];
}

bool WeightedMoments::segment_ok(std::int64_t l, std::int64_t m) const {
    return l >= 1 && m <= T_ && l <= m && seg_a(l, m) > 0.0L;
}

SegmentFit WeightedMoments::fit(std::int64_t l, std::int64_t m) const {
    if (l < 1 || m > T_ || l > m)
        throw std::invalid_argument("segment bounds out of range");
    const long double A = seg_a(l, m);
    if (!(A > 0.0L))
        throw degenerate_segment_error("segment has no weighted regressor energy");
    const long double B = seg_b(l, m);
    const long double C = seg_c(l, m);
    SegmentFit f;
    f.phi_hat = static_cast<double>(B / A);
    f.ssr = static_cast<double>(C - B * B / A);
    f.n = m - l + 1;
    return f;
}

double WeightedMoments::split_ssr(std::int64_t k, std::int64_t l, std::int64_t m) const {
    if (!(l <= k && k < m))
        throw std::invalid_argument("split point must satisfy l <= k < m");
    return fit(l, k).ssr + fit(k + 1, m).ssr;
}

std::optional<std::int64_t> WeightedMoments::argmin_split(std::int64_t l, std::int64_t m,
                                                          std::int64_t lo,
                                                          std::int64_t hi) const {
    lo = std::max(lo, l + kMinSegment - 1);
    hi = std::min(hi, m - kMinSegment);
    std::optional<std::int64_t> best_k;
    long double best = std::numeric_limits<long double>::infinity();
    for (std::int64_t k = lo; k <= hi; ++k) {
        const long double A1 = seg_a(l, k);
        const long double A2 = seg_a(k + 1, m);
        if (!(A1 > 0.0L) || !(A2 > 0.0L)) continue;
        const long double B1 = seg_b(l, k);
        const long double B2 = seg_b(k + 1, m);
        const long double ssr =
            (seg_c(l, k) - B1 * B1 / A1) + (seg_c(k + 1, m) - B2 * B2 / A2);
        if (ssr < best) {
            best = ssr;
            best_k = k;
        }
    }
    return best_k;
}

double weighted_ar_coef(const Series& y, std::int64_t l, std::int64_t m,
                        const WeightSeries& weights) {
    return WeightedMoments(y, weights).fit(l, m).phi_hat;
}

double split_ssr(const Series& y, std::int64_t k, const WeightSeries& weights,
                 std::int64_t l, std::int64_t m) {
    return WeightedMoments(y, weights).split_ssr(k, l, m);
}

std::optional<std::int64_t> estimate_collapse(const Series& y, const WeightSeries& weights,
                                              const TrimConfig& trim) {
    trim.validate();
    const WeightedMoments moments(y, weights);
    const std::int64_t T = moments.T();
    return moments.argmin_split(1, T, trim_lower(trim, T), trim_upper(trim, T));
}

std::optional<std::int64_t> estimate_emerge(const Series& y, const WeightSeries& weights,
                                            std::int64_t k_c_hat, const TrimConfig& trim) {
    trim.validate();
    const WeightedMoments moments(y, weights);
    const std::int64_t T = moments.T();
    if (k_c_hat < 1 || k_c_hat > T) throw std::invalid_argument("k_c_hat out of range");
    const std::int64_t margin = trim_lower(trim, T);
    return moments.argmin_split(1, k_c_hat, margin, k_c_hat - margin);
}

std::optional<std::int64_t> estimate_recover(const Series& y, const WeightSeries& weights,
                                             std::int64_t k_c_hat, const TrimConfig& trim) {
    trim.validate();
    const WeightedMoments moments(y, weights);
    const std::int64_t T = moments.T();
    if (k_c_hat < 1 || k_c_hat >= T) return std::nullopt;
    const std::int64_t margin = trim_lower(trim, T);
    return moments.argmin_split(k_c_hat + 1, T, k_c_hat + margin + 1, trim_upper(trim, T));
}

BreakEstimates sample_split(const Series& y, const WeightSeries& weights,
                            const TrimConfig& trim, Method method) {
    BreakEstimates est;
    est.method = method;
    est.T = y.T();
    est.k_c = estimate_collapse(y, weights, trim);
    if (est.k_c) {
        est.k_e = estimate_emerge(y, weights, *est.k_c, trim);
        est.k_r = estimate_recover(y, weights, *est.k_c, trim);
    }
    return est;
}

}  // namespace bubbledate
