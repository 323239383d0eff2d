#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "model.hpp"

namespace bubbledate {

// Per-observation weights delta_t; the regression weight applied to
// observation t is delta_t^(-2).
struct WeightSeries {
    std::vector<double> delta;  // delta[t-1] holds delta_t, t = 1..T

    void validate(std::int64_t T) const;
};

WeightSeries unit_weights(std::int64_t T);

struct TrimConfig {
    double trim = 0.05;  // fraction of the full sample excluded at each edge

    void validate() const;
};

// ceil(trim*T) and floor((1-trim)*T), robust to floating point edge cases.
std::int64_t trim_lower(const TrimConfig& trim, std::int64_t T);
std::int64_t trim_upper(const TrimConfig& trim, std::int64_t T);

struct SegmentFit {
    double phi_hat = 0.0;
    double ssr = 0.0;
    std::int64_t n = 0;
};

enum class Method { kOls, kWls };

struct BreakEstimates {
    std::optional<std::int64_t> k_e, k_c, k_r;
    Method method = Method::kOls;
    std::int64_t T = 0;

    std::optional<double> tau_e() const { return frac(k_e); }
    std::optional<double> tau_c() const { return frac(k_c); }
    std::optional<double> tau_r() const { return frac(k_r); }
    bool all_available() const { return k_e && k_c && k_r; }

  private:
    std::optional<double> frac(const std::optional<std::int64_t>& k) const {
        if (!k || T <= 0) return std::nullopt;
        return static_cast<double>(*k) / static_cast<double>(T);
    }
};

class degenerate_segment_error : public std::runtime_error {
  public:
    explicit degenerate_segment_error(const std::string& what) : std::runtime_error(what) {}
};

// Weighted prefix sums of (y_{t-1}^2, y_{t-1}*y_t, y_t^2), giving O(1)
// segment fits after O(T) setup. Accumulated in long double; the naive
// O(n) evaluation is kept as a test oracle.
class WeightedMoments {
  public:
    WeightedMoments(const Series& y, const WeightSeries& weights);

    std::int64_t T() const { return T_; }

    // AR(1) fit without intercept on observations t in [l, m], 1 <= l <= m <= T.
    // Throws degenerate_segment_error when the weighted regressor energy
    // vanishes.
    SegmentFit fit(std::int64_t l, std::int64_t m) const;

    bool segment_ok(std::int64_t l, std::int64_t m) const;

    // fit(l,k).ssr + fit(k+1,m).ssr
    double split_ssr(std::int64_t k, std::int64_t l, std::int64_t m) const;

    // argmin over k in [lo, hi] of split_ssr(k, l, m), candidates needing at
    // least two observations on each side; ties resolved toward the smallest
    // k; nullopt when no candidate is admissible.
    std::optional<std::int64_t> argmin_split(std::int64_t l, std::int64_t m,
                                             std::int64_t lo, std::int64_t hi) const;

  private:
    long double seg_a(std::int64_t l, std::int64_t m) const;
    long double seg_b(std::int64_t l, std::int64_t m) const;
    long double seg_c(std::int64_t l, std::int64_t m) const;

    std::int64_t T_ = 0;
    std::vector<long double> a_, b_, c_;  // index t holds the sum over 1..t
};

double weighted_ar_coef(const Series& y, std::int64_t l, std::int64_t m,
                        const WeightSeries& weights);

double split_ssr(const Series& y, std::int64_t k, const WeightSeries& weights,
                 std::int64_t l, std::int64_t m);

// argmin of the full-sample two-regime weighted SSR over the trimmed range.
std::optional<std::int64_t> estimate_collapse(const Series& y, const WeightSeries& weights,
                                              const TrimConfig& trim);

// Break date of the first subsample [1, k_c_hat]; nullopt when the trimmed
// range is empty (k_c_hat too close to the start of the sample).
std::optional<std::int64_t> estimate_emerge(const Series& y, const WeightSeries& weights,
                                            std::int64_t k_c_hat, const TrimConfig& trim);

// Break date of the second subsample [k_c_hat+1, T]; nullopt when the
// trimmed range is empty (k_c_hat too close to the end of the sample).
std::optional<std::int64_t> estimate_recover(const Series& y, const WeightSeries& weights,
                                             std::int64_t k_c_hat, const TrimConfig& trim);

// Collapse date first, then emergence and recovery dates conditioned on it.
// Unavailable dates are propagated as empty optionals, never as failures.
BreakEstimates sample_split(const Series& y, const WeightSeries& weights,
                            const TrimConfig& trim, Method method = Method::kOls);

}  // namespace bubbledate
