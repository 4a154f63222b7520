#include "pcsim/forecast.hpp"

#include <cmath>

namespace pcsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Explicit generator and Box-Muller transform: std::normal_distribution is
// implementation-defined, which would break bit-exact reproducibility.
struct GaussianStream {
    uint64_t state;

    explicit GaussianStream(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    double next_uniform() { // in (0, 1]
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return (static_cast<double>(z >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
};

} // namespace

Series perturb_forecast(const Series& actual_mw, double capacity, double target, uint64_t seed) {
    if (target < 0.0) throw ConfigError("forecast error target must be nonnegative");
    Series out = actual_mw;
    if (target == 0.0 || capacity <= 0.0) return out;
    // E|N(0, sigma)| = sigma * sqrt(2/pi); invert for the requested mean
    // absolute error.
    const double sigma = target * std::sqrt(kPi / 2.0);
    GaussianStream rng(seed);
    for (size_t t = 0; t < out.size(); ++t) {
        double e = rng.next_normal();
        if (actual_mw[t] == 0.0) continue; // keep night hours dark
        out[t] = std::min(capacity, std::max(0.0, actual_mw[t] + capacity * sigma * e));
    }
    return out;
}

ForecastErrorStats forecast_errors(const Series& actual, const Series& forecast,
                                   double normalizer) {
    if (actual.size() != forecast.size())
        throw LengthMismatch("forecast_errors: series lengths differ");
    if (!(normalizer > 0.0)) throw ConfigError("forecast_errors: normalizer must be positive");
    double se = 0.0;
    double ae = 0.0;
    for (size_t t = 0; t < actual.size(); ++t) {
        double e = forecast[t] - actual[t];
        se += e * e;
        ae += std::fabs(e);
    }
    const double n = static_cast<double>(actual.size());
    ForecastErrorStats stats;
    if (n > 0) {
        stats.nrmse = std::sqrt(se / n) / normalizer;
        stats.nmae = (ae / n) / normalizer;
    }
    return stats;
}

void apply_forecasts(PowerSystem& sys, const ForecastSpec& spec) {
    for (auto& unit : sys.vre) {
        double target = unit.kind == VreKind::solar ? spec.solar_target : spec.wind_target;
        uint64_t unit_seed = spec.seed ^ fnv1a(unit.id);
        Series actual_mw(unit.availability.size());
        for (size_t t = 0; t < actual_mw.size(); ++t)
            actual_mw[t] = unit.capacity * unit.availability[t];
        Series forecast_mw = perturb_forecast(actual_mw, unit.capacity, target, unit_seed);
        Series frac(forecast_mw.size());
        for (size_t t = 0; t < frac.size(); ++t)
            frac[t] = unit.capacity > 0.0 ? forecast_mw[t] / unit.capacity : 0.0;
        unit.forecast = std::move(frac);
    }
}

} // namespace pcsim
