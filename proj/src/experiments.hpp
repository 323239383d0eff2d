#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "adaptive.hpp"
#include "estimators.hpp"
#include "model.hpp"

namespace bubbledate {

enum class Target { kEmerge = 0, kCollapse = 1, kRecover = 2 };

struct McConfig {
    std::int64_t T = 400;
    std::int64_t reps = 5000;
    double c_a = 6.0, c_b = 6.0;
    double tau_e = 0.4, tau_c = 0.6, tau_r = 0.7;
    double y0 = 1500.0;
    double drift0 = 1.0 / 800.0;  // realized per-step drift in regimes 1 and 4
    double drift1 = 1.0 / 800.0;
    VolatilityProfile volatility = ConstantVol{1.0};
    std::uint64_t base_seed = 0;
    TrimConfig trim;
    KernelSpec kernel;
    std::int64_t detection_window = 0;
    int threads = 0;  // 0 selects hardware concurrency

    void validate() const;
    DgpParams dgp() const;
    std::int64_t true_k(Target target) const;
};

struct RepOutcome {
    BreakEstimates ols;
    BreakEstimates wls;
};

struct DateHistogram {
    Target target = Target::kCollapse;
    Method method = Method::kOls;
    double bin_width = 0.01;
    std::vector<std::int64_t> counts;  // bin i covers [i*bin_width, (i+1)*bin_width)
    std::int64_t dropped = 0;
    std::int64_t total = 0;

    double bin_lower(std::size_t i) const { return static_cast<double>(i) * bin_width; }
    double bin_upper(std::size_t i) const { return static_cast<double>(i + 1) * bin_width; }
};

struct TargetDetection {
    double correct_freq = 0.0;
    double mode_bin = 0.0;  // lower edge of the fullest histogram bin
    std::int64_t dropped = 0;
};

struct DetectionSummary {
    // indexed [method][target] with method 0 = OLS, 1 = WLS
    std::array<std::array<TargetDetection, 3>, 2> stats{};

    const TargetDetection& at(Method m, Target t) const {
        return stats[m == Method::kOls ? 0 : 1][static_cast<std::size_t>(t)];
    }
    TargetDetection& at(Method m, Target t) {
        return stats[m == Method::kOls ? 0 : 1][static_cast<std::size_t>(t)];
    }
};

struct McResult {
    std::vector<RepOutcome> outcomes;  // indexed by replication
    std::array<std::array<DateHistogram, 3>, 2> histograms{};  // [method][target]
    DetectionSummary summary;
    double elapsed_seconds = 0.0;

    const DateHistogram& histogram(Method m, Target t) const {
        return histograms[m == Method::kOls ? 0 : 1][static_cast<std::size_t>(t)];
    }
};

// Simulates one path with a seed derived from (base_seed, rep_index) and runs
// the two-step estimator. Estimation degeneracies surface as unavailable
// dates, never as exceptions.
RepOutcome run_replication(const McConfig& config, std::int64_t rep_index);

// Runs all replications (in parallel), bins the estimated fractions, and
// computes detection summaries. Aggregation is order-independent.
McResult run_experiment(const McConfig& config);

// Fraction of estimates with |k_hat - true_k| <= window; unavailable
// estimates count as misses and the denominator is the list length.
double detection_frequency(const std::vector<std::optional<std::int64_t>>& estimates,
                           std::int64_t true_k, std::int64_t window);

}  // namespace bubbledate
