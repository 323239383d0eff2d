#include "model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace bubbledate {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void DgpParams::validate() const {
    if (T < 1) throw std::invalid_argument("T must be positive");
    if (!(0 < k_e && k_e < k_c && k_c < k_r && k_r < T))
        throw std::invalid_argument("break dates must satisfy 0 < k_e < k_c < k_r < T");
    if (!(phi_a > 1.0)) throw std::invalid_argument("phi_a must exceed 1");
    if (!(phi_b < 1.0)) throw std::invalid_argument("phi_b must be below 1");
    if (c0 < 0.0 || c1 < 0.0) throw std::invalid_argument("drift numerators must be nonnegative");
    if (!(eta0 > 0.5) || !(eta1 > 0.5))
        throw std::invalid_argument("drift decay exponents must exceed 1/2");
    if (!std::isfinite(y0)) throw std::invalid_argument("y0 must be finite");
}

void validate_profile(const VolatilityProfile& profile) {
    if (const auto* c = std::get_if<ConstantVol>(&profile)) {
        if (!positive_finite(c->sigma))
            throw std::invalid_argument("constant volatility must be strictly positive");
    } else if (const auto* ob = std::get_if<OneBreakVol>(&profile)) {
        if (!positive_finite(ob->sigma0) || !positive_finite(ob->sigma1))
            throw std::invalid_argument("one-break volatility levels must be strictly positive");
        if (!(ob->tau > 0.0 && ob->tau < 1.0))
            throw std::invalid_argument("volatility break fraction must lie in (0,1)");
    } else {
        const auto& pw = std::get<PiecewiseVol>(profile);
        if (pw.knots.empty()) throw std::invalid_argument("piecewise volatility needs knots");
        if (pw.knots.front().first != 0.0)
            throw std::invalid_argument("first piecewise knot must be at fraction 0");
        double prev = -1.0;
        for (const auto& [frac, sigma] : pw.knots) {
            if (!(frac > prev)) throw std::invalid_argument("knot fractions must increase");
            if (frac < 0.0 || frac >= 1.0)
                throw std::invalid_argument("knot fractions must lie in [0,1)");
            if (!positive_finite(sigma))
                throw std::invalid_argument("knot volatility must be strictly positive");
            prev = frac;
        }
    }
}

double volatility_at(const VolatilityProfile& profile, std::int64_t t, std::int64_t T) {
    if (t < 1 || t > T)
        throw std::domain_error("volatility_at: t out of range [1, T]");
    validate_profile(profile);
    if (const auto* c = std::get_if<ConstantVol>(&profile)) return c->sigma;
    if (const auto* ob = std::get_if<OneBreakVol>(&profile)) {
        const auto kb = static_cast<std::int64_t>(std::floor(ob->tau * static_cast<double>(T)));
        return t <= kb ? ob->sigma0 : ob->sigma1;
    }
    const auto& pw = std::get<PiecewiseVol>(profile);
    double sigma = pw.knots.front().second;
    for (const auto& [frac, s] : pw.knots) {
        const auto kb = static_cast<std::int64_t>(std::floor(frac * static_cast<double>(T)));
        if (kb < t) sigma = s;
    }
    return sigma;
}

ShockSeries generate_shocks(const VolatilityProfile& profile, std::int64_t T,
                            std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("generate_shocks: T must be positive");
    validate_profile(profile);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> standard_normal(0.0, 1.0);
    ShockSeries shocks;
    shocks.seed = seed;
    shocks.values.resize(static_cast<std::size_t>(T));
    for (std::int64_t t = 1; t <= T; ++t)
        shocks.values[static_cast<std::size_t>(t - 1)] =
            volatility_at(profile, t, T) * standard_normal(gen);
    return shocks;
}

Series simulate(const DgpParams& params, const ShockSeries& shocks) {
    params.validate();
    if (static_cast<std::int64_t>(shocks.values.size()) != params.T)
        throw std::domain_error("simulate: shock series length must equal T");
    const double drift0 = params.c0 * std::pow(static_cast<double>(params.T), -params.eta0);
    const double drift1 = params.c1 * std::pow(static_cast<double>(params.T), -params.eta1);
    Series y;
    y.values.resize(static_cast<std::size_t>(params.T) + 1);
    y.values[0] = params.y0;
    for (std::int64_t t = 1; t <= params.T; ++t) {
        const double prev = y.values[static_cast<std::size_t>(t - 1)];
        const double eps = shocks.values[static_cast<std::size_t>(t - 1)];
        double next;
        if (t <= params.k_e)
            next = drift0 + prev + eps;
        else if (t <= params.k_c)
            next = params.phi_a * prev + eps;
        else if (t <= params.k_r)
            next = params.phi_b * prev + eps;
        else
            next = drift1 + prev + eps;
        y.values[static_cast<std::size_t>(t)] = next;
    }
    return y;
}

std::pair<double, double> local_to_unity(double c_a, double c_b, std::int64_t T) {
    if (T < 1) throw std::domain_error("local_to_unity: T must be positive");
    if (!(c_a > 0.0)) throw std::domain_error("local_to_unity: c_a must be positive");
    if (!(c_b > 0.0)) throw std::domain_error("local_to_unity: c_b must be positive");
    if (c_b >= static_cast<double>(T))
        throw std::domain_error("local_to_unity: c_b >= T gives a nonpositive collapse root");
    const double Td = static_cast<double>(T);
    return {1.0 + c_a / Td, 1.0 - c_b / Td};
}

}  // namespace bubbledate
