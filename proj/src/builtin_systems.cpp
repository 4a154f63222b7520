#include <cmath>

#include "pcsim/system.hpp"

// Desk-scale test fixtures. Topology shapes follow the published test-system
// component counts; every numeric parameter is an invented, frozen value.
// Series are closed-form so the fixtures rebuild bit-identically.

namespace pcsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bell(double x, double mu, double sigma) {
    double z = (x - mu) / sigma;
    return std::exp(-z * z);
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic pseudo-weather in [0, 1).
double unit_noise(uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

Series mini3_total_load(int nt) {
    Series s(nt);
    for (int h = 0; h < nt; ++h) {
        int hod = h % 24;
        int day = h / 24;
        s[h] = 60.0 + 18.0 * bell(hod, 8.5, 2.5) + 42.0 * bell(hod, 19.0, 2.8) +
               5.0 * std::sin(2.0 * kPi * day / 14.0);
    }
    return s;
}

// Shared weather: a four-day wind lull (days 6-9) overlapping cloudy days 7-8.
Series mini3_solar(int nt) {
    Series s(nt);
    for (int h = 0; h < nt; ++h) {
        int hod = h % 24;
        int day = h / 24;
        double sf = 0.72 + 0.24 * std::sin(2.0 * kPi * (day + 2) / 14.0);
        if (day == 7 || day == 8) sf *= 0.15;
        double shape = 0.0;
        if (hod > 6 && hod < 18) shape = std::pow(std::sin(kPi * (hod - 6) / 12.0), 1.4);
        s[h] = clamp01(shape * sf);
    }
    return s;
}

Series mini3_wind(int nt) {
    Series s(nt);
    for (int h = 0; h < nt; ++h) {
        int day = h / 24;
        double v = 0.40 + 0.26 * std::sin(2.0 * kPi * h / 37.0 + 1.1) +
                   0.18 * std::sin(2.0 * kPi * h / 173.0 + 0.4) +
                   0.10 * std::sin(2.0 * kPi * h / 11.0 + 2.0);
        if (day >= 6 && day <= 9) v *= 0.10;
        s[h] = std::min(0.97, std::max(0.02, v));
    }
    return s;
}

PowerSystem build_mini3(BuiltinProfile profile) {
    const int nt = 336; // 14 days
    PowerSystem sys;
    sys.horizon_hours = nt;
    sys.base_power = 100.0;

    sys.buses = {{"B1", -0.6, 0.6, true}, {"B2", -0.6, 0.6, false}, {"B3", -0.6, 0.6, false}};
    sys.lines = {{"L12", "B1", "B2", 12.0, -120.0, 120.0},
                 {"L23", "B2", "B3", 10.0, -120.0, 120.0},
                 {"L13", "B1", "B3", 8.0, -120.0, 120.0}};

    sys.thermal = {
        {"G-base", "B1", 15.0, 70.0, 35.0, 35.0, 20.0, 300.0, 60.0, true, 45.0},
        {"G-peak", "B3", 5.0, 45.0, 45.0, 45.0, 70.0, 150.0, 25.0, false, 0.0},
    };

    const bool solar_led = profile == BuiltinProfile::solar_driven;
    VreGenerator solar{"S1", "B2", VreKind::solar, solar_led ? 120.0 : 50.0, mini3_solar(nt), {}};
    VreGenerator wind{"W1", "B3", VreKind::wind, solar_led ? 55.0 : 135.0, mini3_wind(nt), {}};
    sys.vre = {std::move(solar), std::move(wind)};

    // The long-duration device charges slowly: refilling its 200 MWh takes
    // about 2.5 days of surplus, so dispatch quality hinges on foresight
    // beyond the day-ahead window.
    const double rt_short = 0.80;
    const double rt_long = 0.65;
    sys.storage = {
        {"ES-4h", "B2", 15.0, 15.0, 0.0, 60.0, std::sqrt(rt_short), std::sqrt(rt_short), 0.0,
         30.0, DurationClass::short_duration},
        {"LD-10h", "B3", 12.0, 24.0, 0.0, 240.0, std::sqrt(rt_long), std::sqrt(rt_long), 0.0002,
         120.0, DurationClass::long_duration},
    };

    sys.reserves = {
        {"REG-UP", ReserveKind::regulation_up, ReserveRule{0.05, 0.0, 0.0}},
        {"SPIN-UP", ReserveKind::spin_up, ReserveRule{0.05, 0.10, 0.04}},
    };

    Series total = mini3_total_load(nt);
    Series l2(nt), l3(nt);
    for (int h = 0; h < nt; ++h) {
        l2[h] = 0.6 * total[h];
        l3[h] = 0.4 * total[h];
    }
    sys.loads["B2"] = std::move(l2);
    sys.loads["B3"] = std::move(l3);
    return sys;
}

Series pjm_total_load(int nt) {
    Series s(nt);
    for (int h = 0; h < nt; ++h) {
        int hod = h % 24;
        int day = h / 24;
        double seasonal = 1.0 + 0.12 * std::cos(2.0 * kPi * (day - 15) / 365.0) +
                          0.08 * std::cos(4.0 * kPi * (day - 190) / 365.0);
        double daily = 900.0 + 150.0 * bell(hod, 8.5, 2.5) + 260.0 * bell(hod, 19.0, 3.0);
        double weekly = 1.0 - 0.05 * (day % 7 >= 5 ? 1.0 : 0.0);
        s[h] = daily * seasonal * weekly;
    }
    return s;
}

Series pjm_solar(int nt, uint64_t salt) {
    Series s(nt);
    for (int h = 0; h < nt; ++h) {
        int hod = h % 24;
        int day = h / 24;
        double season = 0.70 + 0.30 * std::sin(2.0 * kPi * (day - 80) / 365.0);
        double weather = 0.45 + 0.55 * unit_noise(splitmix64(day * 977 + salt));
        double shape = 0.0;
        if (hod > 6 && hod < 18) shape = std::pow(std::sin(kPi * (hod - 6) / 12.0), 1.3);
        s[h] = clamp01(shape * season * weather);
    }
    return s;
}

Series pjm_wind(int nt, uint64_t salt) {
    Series s(nt);
    for (int h = 0; h < nt; ++h) {
        int day = h / 24;
        double season = 1.0 + 0.25 * std::cos(2.0 * kPi * (day - 20) / 365.0);
        double weather = 0.35 + 0.65 * unit_noise(splitmix64(day * 1409 + salt));
        double v = (0.38 + 0.24 * std::sin(2.0 * kPi * h / 41.0 + 0.7) +
                    0.16 * std::sin(2.0 * kPi * h / 191.0 + 1.9) +
                    0.08 * std::sin(2.0 * kPi * h / 13.0)) *
                   season * weather;
        s[h] = std::min(0.97, std::max(0.01, v));
    }
    return s;
}

PowerSystem build_pjm5like(BuiltinProfile profile) {
    const int nt = 8760;
    PowerSystem sys;
    sys.horizon_hours = nt;
    sys.base_power = 100.0;

    sys.buses = {{"B1", -0.6, 0.6, true},
                 {"B2", -0.6, 0.6, false},
                 {"B3", -0.6, 0.6, false},
                 {"B4", -0.6, 0.6, false},
                 {"B5", -0.6, 0.6, false}};
    sys.lines = {{"L12", "B1", "B2", 11.0, -500.0, 500.0},
                 {"L14", "B1", "B4", 9.0, -500.0, 500.0},
                 {"L15", "B1", "B5", 13.0, -600.0, 600.0},
                 {"L23", "B2", "B3", 10.0, -500.0, 500.0},
                 {"L34", "B3", "B4", 10.0, -500.0, 500.0},
                 {"L45", "B4", "B5", 12.0, -400.0, 400.0}};

    sys.thermal = {
        {"G-alta", "B1", 40.0, 110.0, 60.0, 60.0, 14.0, 900.0, 200.0, true, 90.0},
        {"G-park", "B1", 30.0, 100.0, 60.0, 60.0, 15.5, 800.0, 180.0, false, 0.0},
        {"G-solitude", "B3", 80.0, 520.0, 260.0, 260.0, 30.0, 3200.0, 700.0, true, 300.0},
        {"G-sundance", "B4", 50.0, 200.0, 120.0, 120.0, 41.0, 1500.0, 350.0, false, 0.0},
        {"G-brighton", "B5", 150.0, 600.0, 300.0, 300.0, 10.5, 4200.0, 900.0, true, 450.0},
    };

    const bool solar_led = profile == BuiltinProfile::solar_driven;
    sys.vre = {
        {"S1", "B3", VreKind::solar, solar_led ? 700.0 : 350.0, pjm_solar(nt, 11), {}},
        {"S2", "B4", VreKind::solar, solar_led ? 600.0 : 300.0, pjm_solar(nt, 23), {}},
        {"W1", "B5", VreKind::wind, solar_led ? 800.0 : 1600.0, pjm_wind(nt, 37), {}},
    };

    const double rt_short = 0.80;
    const double rt_long = 0.65;
    sys.storage = {
        {"ES-4h", "B2", 150.0, 150.0, 0.0, 600.0, std::sqrt(rt_short), std::sqrt(rt_short), 0.0,
         300.0, DurationClass::short_duration},
        {"LD-10h", "B4", 200.0, 200.0, 0.0, 2000.0, std::sqrt(rt_long), std::sqrt(rt_long),
         0.0002, 1000.0, DurationClass::long_duration},
    };

    sys.reserves = {
        {"REG-UP", ReserveKind::regulation_up, ReserveRule{0.05, 0.0, 0.0}},
        {"SPIN-UP", ReserveKind::spin_up, ReserveRule{0.05, 0.10, 0.04}},
    };

    Series total = pjm_total_load(nt);
    Series l2(nt), l3(nt), l4(nt);
    for (int h = 0; h < nt; ++h) {
        l2[h] = 0.37 * total[h];
        l3[h] = 0.30 * total[h];
        l4[h] = 0.33 * total[h];
    }
    sys.loads["B2"] = std::move(l2);
    sys.loads["B3"] = std::move(l3);
    sys.loads["B4"] = std::move(l4);
    return sys;
}

} // namespace

PowerSystem builtin_system(BuiltinName name, BuiltinProfile profile) {
    switch (name) {
        case BuiltinName::mini3: return build_mini3(profile);
        case BuiltinName::pjm5like: return build_pjm5like(profile);
    }
    throw ConfigError("unknown builtin system");
}

} // namespace pcsim
