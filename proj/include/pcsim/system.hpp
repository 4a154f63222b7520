#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pcsim/errors.hpp"

namespace pcsim {

// Hours are 0-based throughout the C++ API; file formats and the CLI use the
// 1-based convention and convert at the boundary.
using Series = std::vector<double>;

struct Bus {
    std::string id;
    double angle_min = -0.6; // radians
    double angle_max = 0.6;
    bool is_reference = false;
};

struct TransmissionLine {
    std::string id;
    std::string from_bus;
    std::string to_bus;
    double susceptance = 1.0; // per-unit
    double flow_min = 0.0;    // MW
    double flow_max = 0.0;
};

struct ThermalGenerator {
    std::string id;
    std::string bus;
    double p_min = 0.0;
    double p_max = 0.0;
    double ramp_up = 0.0;   // MW/h
    double ramp_down = 0.0;
    double fuel_cost = 0.0; // currency/MWh, variable O&M folded in
    double start_cost = 0.0;
    double stop_cost = 0.0;
    bool initial_online = false;
    double initial_output = 0.0;
};

enum class VreKind : uint8_t { solar, wind };

struct VreGenerator {
    std::string id;
    std::string bus;
    VreKind kind = VreKind::solar;
    double capacity = 0.0;
    Series availability;            // hourly fraction in [0,1], actuals
    std::optional<Series> forecast; // absent -> perfect foresight
};

enum class DurationClass : uint8_t { short_duration, long_duration };

struct StorageDevice {
    std::string id;
    std::string bus;
    double charge_max = 0.0;    // MW
    double discharge_max = 0.0;
    double soc_min = 0.0;       // MWh
    double soc_max = 0.0;
    double eff_charge = 1.0;
    double eff_discharge = 1.0;
    double self_discharge = 0.0; // fraction/h
    double initial_soc = 0.0;
    DurationClass duration_class = DurationClass::short_duration;

    double round_trip_efficiency() const { return eff_charge * eff_discharge; }
};

enum class ReserveKind : uint8_t { regulation_up, spin_up };

struct ReserveRule {
    double load_fraction = 0.0;
    double wind_forecast_fraction = 0.0;
    double solar_forecast_fraction = 0.0;
};

struct ReserveProduct {
    std::string id;
    ReserveKind kind = ReserveKind::regulation_up;
    std::variant<Series, ReserveRule> requirement;
};

struct PowerSystem {
    std::vector<Bus> buses;
    std::vector<TransmissionLine> lines;
    std::vector<ThermalGenerator> thermal;
    std::vector<VreGenerator> vre;
    std::vector<StorageDevice> storage;
    std::vector<ReserveProduct> reserves;
    std::map<std::string, Series> loads; // per-bus hourly MW
    int horizon_hours = 8760;
    double base_power = 100.0; // MVA

    int bus_index(const std::string& id) const;
    const StorageDevice* find_storage(const std::string& id) const;

    double bus_load(const std::string& bus, int hour) const;
    double total_load(int hour) const;
    /// capacity x forecast fraction; availability when no forecast is set
    double vre_forecast_mw(const VreGenerator& unit, int hour) const;
    double vre_actual_mw(const VreGenerator& unit, int hour) const;
};

struct Violation {
    std::string entity;
    std::string field;
    std::string rule;
    std::string str() const { return entity + "." + field + ": " + rule; }
};

std::vector<Violation> validate_system(const PowerSystem& system);

/// Total load minus forecasted VRE production over [first_hour, first_hour+count).
Series net_load(const PowerSystem& system, int first_hour, int count);
Series net_load(const PowerSystem& system);

double reserve_requirement(const PowerSystem& system, const ReserveProduct& product,
                           int hour);

enum class BuiltinName : uint8_t { mini3, pjm5like };
enum class BuiltinProfile : uint8_t { solar_driven, wind_driven };

PowerSystem builtin_system(BuiltinName name, BuiltinProfile profile);
std::optional<BuiltinName> parse_builtin_name(const std::string& s);
std::optional<BuiltinProfile> parse_builtin_profile(const std::string& s);

PowerSystem load_system(const std::filesystem::path& path);
void save_system(const PowerSystem& system, const std::filesystem::path& path);
std::string system_to_json_text(const PowerSystem& system);
uint64_t system_fingerprint(const PowerSystem& system);

uint64_t fnv1a(const void* data, size_t len, uint64_t seed = 1469598103934665603ull);
inline uint64_t fnv1a(const std::string& s, uint64_t seed = 1469598103934665603ull) {
    return fnv1a(s.data(), s.size(), seed);
}

} // namespace pcsim
