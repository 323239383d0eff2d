#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace bubbledate {

// Four-regime AR(1) process: random walk with shrinking drift, mildly
// explosive regime, collapse regime, random walk again. Regime switches
// happen after observations k_e, k_c and k_r.
struct DgpParams {
    std::int64_t T = 0;
    double y0 = 0.0;
    double c0 = 0.0, c1 = 0.0;      // drift numerators (first / last regime)
    double eta0 = 1.0, eta1 = 1.0;  // drift decay exponents, must exceed 1/2
    double phi_a = 0.0;             // explosive root, > 1
    double phi_b = 0.0;             // collapse root, < 1
    std::int64_t k_e = 0, k_c = 0, k_r = 0;

    double tau_e() const { return static_cast<double>(k_e) / static_cast<double>(T); }
    double tau_c() const { return static_cast<double>(k_c) / static_cast<double>(T); }
    double tau_r() const { return static_cast<double>(k_r) / static_cast<double>(T); }

    // Throws std::invalid_argument when any constraint is violated.
    void validate() const;
};

// Deterministic volatility path sigma_t, evaluated on the rescaled time
// grid t/T. All sigma values must be strictly positive and finite.
struct ConstantVol {
    double sigma = 1.0;
};
struct OneBreakVol {
    double sigma0 = 1.0;
    double sigma1 = 1.0;
    double tau = 0.5;  // break fraction in (0,1); sigma0 applies for t <= floor(tau*T)
};
struct PiecewiseVol {
    // (fraction, sigma) knots; first fraction must be 0, fractions strictly
    // increasing. sigma of the last knot with floor(fraction*T) < t applies.
    std::vector<std::pair<double, double>> knots;
};
using VolatilityProfile = std::variant<ConstantVol, OneBreakVol, PiecewiseVol>;

void validate_profile(const VolatilityProfile& profile);

struct ShockSeries {
    std::vector<double> values;  // values[t-1] holds eps_t, t = 1..T
    std::uint64_t seed = 0;
};

// y_0 .. y_T; values[t] holds y_t.
struct Series {
    std::vector<double> values;

    std::int64_t T() const { return static_cast<std::int64_t>(values.size()) - 1; }
};

// sigma_t for observation t in 1..T. Throws std::domain_error if t is out
// of range.
double volatility_at(const VolatilityProfile& profile, std::int64_t t, std::int64_t T);

// eps_t = sigma_t * e_t with e_t standard normal. The stream is
// mt19937_64(seed) fed through std::normal_distribution, so identical
// (profile, T, seed) inputs give identical output within one build.
ShockSeries generate_shocks(const VolatilityProfile& profile, std::int64_t T,
                            std::uint64_t seed);

// Runs the four-regime recursion. shocks.values.size() must equal params.T.
Series simulate(const DgpParams& params, const ShockSeries& shocks);

// (1 + c_a/T, 1 - c_b/T). Throws std::domain_error for c_a <= 0, c_b <= 0
// or c_b >= T.
std::pair<double, double> local_to_unity(double c_a, double c_b, std::int64_t T);

}  // namespace bubbledate
