#include "pcsim/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace pcsim {

uint64_t fnv1a(const void* data, size_t len, uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

int PowerSystem::bus_index(const std::string& id) const {
    for (size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return static_cast<int>(i);
    return -1;
}

const StorageDevice* PowerSystem::find_storage(const std::string& id) const {
    for (const auto& s : storage)
        if (s.id == id) return &s;
    return nullptr;
}

double PowerSystem::bus_load(const std::string& bus, int hour) const {
    auto it = loads.find(bus);
    if (it == loads.end()) return 0.0;
    if (hour < 0 || hour >= static_cast<int>(it->second.size())) return 0.0;
    return it->second[hour];
}

double PowerSystem::total_load(int hour) const {
    double acc = 0.0;
    for (const auto& [bus, series] : loads) {
        (void)bus;
        if (hour >= 0 && hour < static_cast<int>(series.size())) acc += series[hour];
    }
    return acc;
}

double PowerSystem::vre_forecast_mw(const VreGenerator& unit, int hour) const {
    const Series& s = unit.forecast ? *unit.forecast : unit.availability;
    if (hour < 0 || hour >= static_cast<int>(s.size())) return 0.0;
    return unit.capacity * s[hour];
}

double PowerSystem::vre_actual_mw(const VreGenerator& unit, int hour) const {
    if (hour < 0 || hour >= static_cast<int>(unit.availability.size())) return 0.0;
    return unit.capacity * unit.availability[hour];
}

namespace {

void check_series_range(std::vector<Violation>& out, const std::string& entity,
                        const std::string& field, const Series& s, double lo, double hi) {
    for (double v : s) {
        if (v < lo || v > hi) {
            out.push_back({entity, field,
                           "values must lie in [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]"});
            return;
        }
    }
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

std::vector<Violation> validate_system(const PowerSystem& sys) {
    std::vector<Violation> out;
    const int nt = sys.horizon_hours;
    if (nt < 1) out.push_back({"system", "horizon_hours", "must be at least 1"});
    if (sys.base_power <= 0) out.push_back({"system", "base_power", "must be positive"});

    std::set<std::string> bus_ids;
    int refs = 0;
    for (const auto& b : sys.buses) {
        if (!bus_ids.insert(b.id).second)
            out.push_back({b.id, "id", "duplicate bus id"});
        if (b.is_reference) ++refs;
        if (!(b.angle_min <= 0.0 && 0.0 <= b.angle_max))
            out.push_back({b.id, "angle_min/angle_max", "must satisfy angle_min <= 0 <= angle_max"});
    }
    if (sys.buses.empty())
        out.push_back({"system", "buses", "at least one bus required"});
    else if (refs == 0)
        out.push_back({"system", "buses", "no reference bus"});
    else if (refs > 1)
        out.push_back({"system", "buses", "multiple reference buses"});

    auto known_bus = [&](const std::string& id) { return bus_ids.count(id) > 0; };

    std::set<std::string> ids;
    for (const auto& l : sys.lines) {
        if (!ids.insert("line:" + l.id).second) out.push_back({l.id, "id", "duplicate line id"});
        if (l.from_bus == l.to_bus)
            out.push_back({l.id, "from_bus/to_bus", "line endpoints must differ"});
        if (!known_bus(l.from_bus))
            out.push_back({l.id, "from_bus", "unknown bus " + l.from_bus});
        if (!known_bus(l.to_bus)) out.push_back({l.id, "to_bus", "unknown bus " + l.to_bus});
        if (!(l.flow_min <= 0.0 && 0.0 <= l.flow_max))
            out.push_back({l.id, "flow_min/flow_max", "must satisfy flow_min <= 0 <= flow_max"});
        if (!(l.susceptance > 0.0))
            out.push_back({l.id, "susceptance", "must be positive"});
    }

    for (const auto& g : sys.thermal) {
        if (!ids.insert("thermal:" + g.id).second)
            out.push_back({g.id, "id", "duplicate thermal id"});
        if (!known_bus(g.bus)) out.push_back({g.id, "bus", "unknown bus " + g.bus});
        if (!(0.0 <= g.p_min && g.p_min <= g.p_max))
            out.push_back({g.id, "p_min/p_max", "must satisfy 0 <= p_min <= p_max"});
        if (g.ramp_up < 0 || g.ramp_down < 0)
            out.push_back({g.id, "ramp_up/ramp_down", "ramp limits must be nonnegative"});
        if (g.fuel_cost < 0 || g.start_cost < 0 || g.stop_cost < 0)
            out.push_back({g.id, "costs", "costs must be nonnegative"});
        if (!g.initial_online && g.initial_output != 0.0)
            out.push_back({g.id, "initial_output", "offline unit must have zero initial output"});
    }

    for (const auto& v : sys.vre) {
        if (!ids.insert("vre:" + v.id).second) out.push_back({v.id, "id", "duplicate vre id"});
        if (!known_bus(v.bus)) out.push_back({v.id, "bus", "unknown bus " + v.bus});
        if (v.capacity < 0) out.push_back({v.id, "capacity", "must be nonnegative"});
        if (static_cast<int>(v.availability.size()) != nt)
            out.push_back({v.id, "availability",
                           "series length " + std::to_string(v.availability.size()) +
                               " != horizon " + std::to_string(nt)});
        check_series_range(out, v.id, "availability", v.availability, 0.0, 1.0);
        if (v.forecast) {
            if (static_cast<int>(v.forecast->size()) != nt)
                out.push_back({v.id, "forecast",
                               "series length " + std::to_string(v.forecast->size()) +
                                   " != horizon " + std::to_string(nt)});
            check_series_range(out, v.id, "forecast", *v.forecast, 0.0, 1.0);
        }
    }

    for (const auto& s : sys.storage) {
        if (!ids.insert("storage:" + s.id).second)
            out.push_back({s.id, "id", "duplicate storage id"});
        if (!known_bus(s.bus)) out.push_back({s.id, "bus", "unknown bus " + s.bus});
        if (!(0.0 <= s.soc_min && s.soc_min <= s.soc_max))
            out.push_back({s.id, "soc_min/soc_max", "must satisfy 0 <= soc_min <= soc_max"});
        if (s.initial_soc < s.soc_min || s.initial_soc > s.soc_max)
            out.push_back({s.id, "initial_soc", "must lie within [soc_min, soc_max]"});
        if (!(s.eff_charge > 0.0 && s.eff_charge <= 1.0))
            out.push_back({s.id, "eff_charge", "must lie in (0, 1]"});
        if (!(s.eff_discharge > 0.0 && s.eff_discharge <= 1.0))
            out.push_back({s.id, "eff_discharge", "must lie in (0, 1]"});
        if (!(s.self_discharge >= 0.0 && s.self_discharge < 1.0))
            out.push_back({s.id, "self_discharge", "must lie in [0, 1)"});
        if (!(s.charge_max > 0.0))
            out.push_back({s.id, "charge_max", "must be positive"});
        if (!(s.discharge_max > 0.0))
            out.push_back({s.id, "discharge_max", "must be positive"});
    }

    for (const auto& r : sys.reserves) {
        if (!ids.insert("reserve:" + r.id).second)
            out.push_back({r.id, "id", "duplicate reserve id"});
        if (const auto* series = std::get_if<Series>(&r.requirement)) {
            if (static_cast<int>(series->size()) != nt)
                out.push_back({r.id, "requirement",
                               "series length " + std::to_string(series->size()) +
                                   " != horizon " + std::to_string(nt)});
            for (double v : *series)
                if (v < 0) {
                    out.push_back({r.id, "requirement", "values must be nonnegative"});
                    break;
                }
        } else {
            const auto& rule = std::get<ReserveRule>(r.requirement);
            if (rule.load_fraction < 0 || rule.wind_forecast_fraction < 0 ||
                rule.solar_forecast_fraction < 0)
                out.push_back({r.id, "requirement", "rule fractions must be nonnegative"});
        }
    }

    for (const auto& [bus, series] : sys.loads) {
        if (!known_bus(bus)) out.push_back({bus, "loads", "unknown bus " + bus});
        if (static_cast<int>(series.size()) != nt)
            out.push_back({bus, "loads",
                           "series length " + std::to_string(series.size()) + " != horizon " +
                               std::to_string(nt)});
    }

    if (!sys.lines.empty() && !sys.buses.empty()) {
        UnionFind uf(static_cast<int>(sys.buses.size()));
        for (const auto& l : sys.lines) {
            int a = sys.bus_index(l.from_bus);
            int b = sys.bus_index(l.to_bus);
            if (a >= 0 && b >= 0) uf.unite(a, b);
        }
        int root = uf.find(0);
        for (size_t i = 1; i < sys.buses.size(); ++i)
            if (uf.find(static_cast<int>(i)) != root) {
                out.push_back({"system", "lines", "network graph is not connected"});
                break;
            }
    }
    return out;
}

Series net_load(const PowerSystem& sys, int first_hour, int count) {
    if (first_hour < 0 || count < 0 || first_hour + count > sys.horizon_hours)
        throw RangeError("net_load: hours [" + std::to_string(first_hour) + ", " +
                         std::to_string(first_hour + count) + ") exceed horizon " +
                         std::to_string(sys.horizon_hours));
    Series out(count, 0.0);
    for (int t = 0; t < count; ++t) {
        int h = first_hour + t;
        double v = sys.total_load(h);
        for (const auto& unit : sys.vre) v -= sys.vre_forecast_mw(unit, h);
        out[t] = v;
    }
    return out;
}

Series net_load(const PowerSystem& sys) { return net_load(sys, 0, sys.horizon_hours); }

double reserve_requirement(const PowerSystem& sys, const ReserveProduct& product, int hour) {
    if (hour < 0 || hour >= sys.horizon_hours)
        throw RangeError("reserve_requirement: hour " + std::to_string(hour) +
                         " outside horizon " + std::to_string(sys.horizon_hours));
    if (const auto* series = std::get_if<Series>(&product.requirement)) return (*series)[hour];
    const auto& rule = std::get<ReserveRule>(product.requirement);
    double req = rule.load_fraction * sys.total_load(hour);
    for (const auto& unit : sys.vre) {
        double fc = sys.vre_forecast_mw(unit, hour);
        req += (unit.kind == VreKind::wind ? rule.wind_forecast_fraction
                                           : rule.solar_forecast_fraction) *
               fc;
    }
    return req;
}

} // namespace pcsim
