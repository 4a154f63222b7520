#pragma once

#include <cstdint>

#include "pcsim/system.hpp"

namespace pcsim {

struct ForecastSpec {
    double solar_target = 0.03; // mean |error| as a fraction of capacity
    double wind_target = 0.06;
    uint64_t seed = 1;
};

/// Synthetic day-ahead forecast: actual + capacity-scaled Gaussian noise,
/// clamped to [0, capacity]. Hours with zero actual output stay zero (a
/// day-ahead forecaster knows night). sigma is chosen so the mean absolute
/// error equals `target` x capacity.
Series perturb_forecast(const Series& actual_mw, double capacity, double target, uint64_t seed);

struct ForecastErrorStats {
    double nrmse = 0.0;
    double nmae = 0.0;
};

ForecastErrorStats forecast_errors(const Series& actual, const Series& forecast,
                                   double normalizer);

/// Fills the forecast series of every VRE unit from its actuals. Seeds are
/// derived per unit from spec.seed and the unit id, so results do not depend
/// on unit order.
void apply_forecasts(PowerSystem& system, const ForecastSpec& spec);

} // namespace pcsim
