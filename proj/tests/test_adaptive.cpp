#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "adaptive.hpp"
#include "doctest.h"
#include "model.hpp"
#include "oracles.hpp"

using namespace bubbledate;

namespace {

Series noiseless_path(std::int64_t T, std::int64_t k_e, std::int64_t k_c, std::int64_t k_r,
                      double phi_a, double phi_b) {
    DgpParams p;
    p.T = T;
    p.y0 = 1.0;
    p.k_e = k_e;
    p.k_c = k_c;
    p.k_r = k_r;
    p.phi_a = phi_a;
    p.phi_b = phi_b;
    ShockSeries zero;
    zero.values.assign(static_cast<std::size_t>(T), 0.0);
    return simulate(p, zero);
}

Series noisy_path(std::uint64_t seed, std::int64_t T = 200) {
    DgpParams p;
    p.T = T;
    p.y0 = 100.0;
    p.k_e = 2 * T / 5;
    p.k_c = 3 * T / 5;
    p.k_r = 7 * T / 10;
    p.phi_a = 1.0 + 6.0 / static_cast<double>(T);
    p.phi_b = 1.0 - 6.0 / static_cast<double>(T);
    return simulate(p, generate_shocks(ConstantVol{5.0}, T, seed));
}

}  // namespace

TEST_CASE("residuals equal the first difference outside both windows") {
    const Series y = noisy_path(3);
    const RegimeRegressionFit fit = regime_residuals(y, 80, 120, 120, 140);
    for (std::int64_t t = 1; t <= 200; ++t) {
        if (t > 80 && t <= 140) continue;
        CHECK(fit.residuals[t - 1] == y.values[t] - y.values[t - 1]);
    }
}

TEST_CASE("a noiseless explosive window yields delta = phi_a - 1 and zero residuals") {
    const Series y = noiseless_path(200, 80, 120, 140, 1.05, 0.9);
    const RegimeRegressionFit fit = regime_residuals(y, 80, 120, 120, 140);
    CHECK(fit.delta1 == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(std::fabs(fit.mu1) < 1e-9);
    CHECK(fit.delta2 == doctest::Approx(-0.1).epsilon(1e-9));
    for (std::int64_t t = 81; t <= 140; ++t)
        CHECK(std::fabs(fit.residuals[t - 1]) < 1e-9);
}

TEST_CASE("constant regressor inside a window is rejected") {
    Series y;
    y.values.assign(101, 4.0);  // constant series: dummy and dummy*y collinear
    CHECK_THROWS_AS(regime_residuals(y, 30, 60, 60, 80), degenerate_window_error);
}

TEST_CASE("window shorter than two observations is rejected") {
    const Series y = noisy_path(5);
    CHECK_THROWS_AS(regime_residuals(y, 80, 81, 81, 140), degenerate_window_error);
}

TEST_CASE("window fits coincide with the joint four-regressor solve") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const Series y = noisy_path(seed);
        const RegimeRegressionFit fit = regime_residuals(y, 80, 120, 120, 140);
        const auto coef = oracle::regime_regression_4x4(y, 80, 120, 120, 140);
        CHECK(fit.mu1 == doctest::Approx(coef[0]).epsilon(1e-10));
        CHECK(fit.mu2 == doctest::Approx(coef[1]).epsilon(1e-10));
        CHECK(fit.delta1 == doctest::Approx(coef[2]).epsilon(1e-10));
        CHECK(fit.delta2 == doctest::Approx(coef[3]).epsilon(1e-10));
    }
}

TEST_CASE("normal-equation orthogonality holds") {
    const Series y = noisy_path(11);
    const RegimeRegressionFit fit = regime_residuals(y, 80, 120, 120, 140);
    for (int r = 0; r < 4; ++r) {
        double dot = 0.0, nr = 0.0, ne = 0.0;
        for (std::int64_t t = 1; t <= 200; ++t) {
            const double d1 = (t > 80 && t <= 120) ? 1.0 : 0.0;
            const double d2 = (t > 120 && t <= 140) ? 1.0 : 0.0;
            const double x[4] = {d1, d2, d1 * y.values[t - 1], d2 * y.values[t - 1]};
            dot += fit.residuals[t - 1] * x[r];
            nr += x[r] * x[r];
            ne += fit.residuals[t - 1] * fit.residuals[t - 1];
        }
        CHECK(std::fabs(dot) <= 1e-8 * std::max(1.0, std::sqrt(nr * ne)));
    }
}

TEST_CASE("kernel smoother reproduces a constant") {
    std::vector<double> r(50, 3.0);
    for (KernelKind kind : {KernelKind::kGaussian, KernelKind::kEpanechnikov}) {
        const VarianceEstimate v = kernel_variance(r, kind, 0.2);
        for (double s2 : v.sigma2) CHECK(s2 == doctest::Approx(9.0).epsilon(1e-12));
    }
}

TEST_CASE("three-point Gaussian smoother matches the hand evaluation") {
    const VarianceEstimate v = kernel_variance({1.0, 2.0, 3.0}, KernelKind::kGaussian, 1.0 / 3.0);
    CHECK(v.sigma2[0] == doctest::Approx(4.9122).epsilon(1e-4));
}

TEST_CASE("smoother equals the direct quadratic-time evaluation") {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> r(120);
    for (auto& v : r) v = noise(gen) * 2.0;
    for (bool gaussian : {true, false}) {
        const KernelKind kind = gaussian ? KernelKind::kGaussian : KernelKind::kEpanechnikov;
        const VarianceEstimate fast = kernel_variance(r, kind, 0.15);
        const auto slow = oracle::direct_kernel_variance(r, gaussian, 0.15);
        for (std::size_t i = 0; i < r.size(); ++i)
            CHECK(fast.sigma2[i] == doctest::Approx(slow[i]).epsilon(1e-10));
    }
}

TEST_CASE("smoothed values stay inside the residual envelope") {
    std::mt19937_64 gen(78);
    std::normal_distribution<double> noise(1.0, 0.2);
    std::vector<double> r(80);
    double lo = 1e300, hi = 0.0;
    for (auto& v : r) {
        v = noise(gen);
        lo = std::min(lo, v * v);
        hi = std::max(hi, v * v);
    }
    const VarianceEstimate v = kernel_variance(r, KernelKind::kEpanechnikov, 0.1);
    for (double s2 : v.sigma2) {
        CHECK(s2 >= lo - 1e-12);
        CHECK(s2 <= hi + 1e-12);
    }
}

TEST_CASE("tiny compact-support bandwidth fails cleanly") {
    std::vector<double> r(50, 1.0);
    CHECK_THROWS_AS(kernel_variance(r, KernelKind::kEpanechnikov, 0.005), bandwidth_error);
    CHECK_THROWS_AS(kernel_variance(r, KernelKind::kGaussian, -1.0), bandwidth_error);
}

TEST_CASE("fixed-power bandwidths") {
    KernelSpec spec;
    spec.rule = BandwidthRule::kFixedPower;
    spec.power = 0.2;
    std::vector<double> r(10, 1.0);
    CHECK(resolve_bandwidth(spec, r, 400).first == doctest::Approx(0.30171).epsilon(1e-4));
    CHECK(resolve_bandwidth(spec, r, 800).first == doctest::Approx(0.26265).epsilon(1e-4));
    spec.power = 0.4;
    CHECK(resolve_bandwidth(spec, r, 400).first ==
          doctest::Approx(std::pow(400.0, -0.4)).epsilon(1e-12));
}

TEST_CASE("explicit bandwidth passes through and is validated") {
    KernelSpec spec;
    spec.rule = BandwidthRule::kExplicit;
    spec.bandwidth = 0.123;
    std::vector<double> r(10, 1.0);
    CHECK(resolve_bandwidth(spec, r, 400).first == 0.123);
    spec.bandwidth = 0.0;
    CHECK_THROWS_AS(resolve_bandwidth(spec, r, 400), bandwidth_error);
}

TEST_CASE("cross-validation picks wider bandwidths for flat variance profiles") {
    KernelSpec spec;
    spec.rule = BandwidthRule::kCrossValidation;
    const std::int64_t T = 200;
    int wider = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const ShockSeries iid = generate_shocks(ConstantVol{1.0}, T, seed);
        const ShockSeries brk = generate_shocks(OneBreakVol{1.0, 5.0, 0.5}, T, seed + 1000);
        const double b_iid = resolve_bandwidth(spec, iid.values, T).first;
        const double b_brk = resolve_bandwidth(spec, brk.values, T).first;
        if (b_iid >= b_brk) ++wider;
    }
    CHECK(wider >= 80);
}

TEST_CASE("adaptive pipeline is exact on a homoskedastic noiseless path") {
    const Series y = noiseless_path(400, 160, 240, 280, 1.03, 0.95);
    const AdaptiveResult res = adaptive_estimate(y, TrimConfig{}, KernelSpec{});
    REQUIRE(res.ols.all_available());
    REQUIRE(res.wls.all_available());
    CHECK_FALSE(res.wls_failed);
    CHECK(*res.ols.k_e == 160);
    CHECK(*res.ols.k_c == 240);
    CHECK(*res.ols.k_r == 280);
    CHECK(res.wls.k_e == res.ols.k_e);
    CHECK(res.wls.k_c == res.ols.k_c);
    CHECK(res.wls.k_r == res.ols.k_r);
    CHECK(res.ols.method == Method::kOls);
    CHECK(res.wls.method == Method::kWls);
}

TEST_CASE("weighted step is reported as failed on a constant series") {
    Series y;
    y.values.assign(401, 7.0);
    const AdaptiveResult res = adaptive_estimate(y, TrimConfig{}, KernelSpec{});
    CHECK(res.wls_failed);
    CHECK_FALSE(res.wls.k_c.has_value());
}
