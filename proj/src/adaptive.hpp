#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "estimators.hpp"
#include "model.hpp"

namespace bubbledate {

enum class KernelKind { kGaussian, kEpanechnikov };

enum class BandwidthRule { kExplicit, kFixedPower, kCrossValidation };

struct KernelSpec {
    KernelKind kind = KernelKind::kEpanechnikov;
    BandwidthRule rule = BandwidthRule::kFixedPower;
    double bandwidth = 0.0;  // used when rule == kExplicit
    double power = 0.4;      // b = T^(-power) when rule == kFixedPower
};

// First-difference regression on the two regime windows: within window
// (lo, hi] the fitted model is dy_t = mu + delta * y_{t-1}; outside both
// windows the residual is dy_t itself.
struct RegimeRegressionFit {
    double mu1 = 0.0, mu2 = 0.0;
    double delta1 = 0.0, delta2 = 0.0;
    std::vector<double> residuals;  // residuals[t-1] holds e_t, t = 1..T
};

class degenerate_window_error : public std::runtime_error {
  public:
    explicit degenerate_window_error(const std::string& what) : std::runtime_error(what) {}
};

class bandwidth_error : public std::runtime_error {
  public:
    explicit bandwidth_error(const std::string& what) : std::runtime_error(what) {}
};

struct VarianceEstimate {
    std::vector<double> sigma2;  // sigma2[t-1], strictly positive after flooring
    bool floor_applied = false;
};

struct AdaptiveResult {
    BreakEstimates ols;
    BreakEstimates wls;
    VarianceEstimate variance;
    RegimeRegressionFit regression;
    double bandwidth = 0.0;
    bool bandwidth_at_boundary = false;
    bool window_fallback = false;  // a missing first-step date was replaced by a trim bound
    bool wls_failed = false;       // residual/variance step failed; wls dates all unavailable
};

// Windows taken directly from the estimated dates; requires all three
// available. Throws degenerate_window_error when a window is shorter than
// two observations or its regressors are collinear.
RegimeRegressionFit regime_residuals(const Series& y, const BreakEstimates& est);

// Explicit window bounds, each window being (lo, hi].
RegimeRegressionFit regime_residuals(const Series& y, std::int64_t win1_lo,
                                     std::int64_t win1_hi, std::int64_t win2_lo,
                                     std::int64_t win2_hi);

// Leave-one-out kernel smoother of squared residuals over rescaled time:
// sigma2_t = sum_{i != t} K((t-i)/(T*b)) r_i^2 / sum_{i != t} K((t-i)/(T*b)).
// Entries are floored at 1e-6 times the maximum before being returned.
// Throws bandwidth_error when every kernel weight vanishes at some t.
VarianceEstimate kernel_variance(const std::vector<double>& residuals, KernelKind kind,
                                 double bandwidth);

// Resolves the bandwidth rule to a concrete value. Returns (b, at_boundary);
// at_boundary is set when cross-validation selects a grid endpoint.
std::pair<double, bool> resolve_bandwidth(const KernelSpec& kernel,
                                          const std::vector<double>& residuals,
                                          std::int64_t T);

// Two-step pipeline: uncorrected sample split, residual extraction and
// kernel variance at the estimated dates, then the weighted sample split
// with delta_t = sigma_t estimates. When a first-step date is missing the
// corresponding window falls back to the trimmed sample bound and the
// result is flagged; when the collapse date itself is missing the weighted
// step is skipped and reported as failed rather than duplicating the
// uncorrected result.
AdaptiveResult adaptive_estimate(const Series& y, const TrimConfig& trim,
                                 const KernelSpec& kernel);

}  // namespace bubbledate
