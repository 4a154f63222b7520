#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pcsim/system.hpp"

namespace pcsim {

namespace {

using nlohmann::json;

Series load_csv_column(const std::filesystem::path& csv_path, const std::string& column) {
    std::ifstream in(csv_path);
    if (!in) throw ParseError("cannot open CSV " + csv_path.string());
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty CSV " + csv_path.string());
    std::vector<std::string> names;
    {
        std::stringstream ss(header);
        std::string cell;
        while (std::getline(ss, cell, ',')) names.push_back(cell);
    }
    if (names.empty() || names[0] != "hour")
        throw ParseError(csv_path.string() + ": first CSV column must be 'hour'");
    int col = -1;
    for (size_t i = 1; i < names.size(); ++i)
        if (names[i] == column) col = static_cast<int>(i);
    if (col < 0)
        throw ParseError(csv_path.string() + ": no column named '" + column + "'");

    Series out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int i = 0;
        double value = 0.0;
        bool found = false;
        while (std::getline(ss, cell, ',')) {
            if (i == col) {
                try {
                    value = std::stod(cell);
                } catch (const std::exception&) {
                    throw ParseError(csv_path.string() + ":" + std::to_string(lineno) +
                                     ": bad number '" + cell + "'");
                }
                found = true;
            }
            ++i;
        }
        if (!found)
            throw ParseError(csv_path.string() + ":" + std::to_string(lineno) +
                             ": missing column " + std::to_string(col));
        out.push_back(value);
    }
    return out;
}

Series parse_series(const json& j, const std::filesystem::path& base_dir,
                    const std::string& context) {
    if (j.is_array()) {
        Series out;
        out.reserve(j.size());
        for (const auto& v : j) {
            if (!v.is_number())
                throw ParseError(context + ": series entries must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (j.is_object() && j.contains("csv")) {
        std::filesystem::path p = base_dir / j.at("csv").get<std::string>();
        return load_csv_column(p, j.at("column").get<std::string>());
    }
    throw ParseError(context + ": series must be an array or {\"csv\": ..., \"column\": ...}");
}

template <typename T>
T get_field(const json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key)) throw ParseError(context + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(context + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_field_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

json series_to_json(const Series& s) {
    return json(s);
}

} // namespace

PowerSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open system file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    const auto base_dir = path.parent_path();

    PowerSystem sys;
    sys.horizon_hours = get_field<int>(j, "horizon_hours", "system");
    sys.base_power = get_field_or<double>(j, "base_power", 100.0);

    for (const auto& b : get_field_or<json>(j, "buses", json::array())) {
        Bus bus;
        bus.id = get_field<std::string>(b, "id", "bus");
        bus.angle_min = get_field_or<double>(b, "angle_min", -0.6);
        bus.angle_max = get_field_or<double>(b, "angle_max", 0.6);
        bus.is_reference = get_field_or<bool>(b, "is_reference", false);
        sys.buses.push_back(std::move(bus));
    }
    for (const auto& l : get_field_or<json>(j, "lines", json::array())) {
        TransmissionLine line;
        line.id = get_field<std::string>(l, "id", "line");
        line.from_bus = get_field<std::string>(l, "from_bus", "line " + line.id);
        line.to_bus = get_field<std::string>(l, "to_bus", "line " + line.id);
        line.susceptance = get_field<double>(l, "susceptance", "line " + line.id);
        line.flow_min = get_field<double>(l, "flow_min", "line " + line.id);
        line.flow_max = get_field<double>(l, "flow_max", "line " + line.id);
        sys.lines.push_back(std::move(line));
    }
    for (const auto& g : get_field_or<json>(j, "thermal", json::array())) {
        ThermalGenerator t;
        t.id = get_field<std::string>(g, "id", "thermal");
        const std::string ctx = "thermal " + t.id;
        t.bus = get_field<std::string>(g, "bus", ctx);
        t.p_min = get_field<double>(g, "p_min", ctx);
        t.p_max = get_field<double>(g, "p_max", ctx);
        t.ramp_up = get_field<double>(g, "ramp_up", ctx);
        t.ramp_down = get_field<double>(g, "ramp_down", ctx);
        t.fuel_cost = get_field<double>(g, "fuel_cost", ctx);
        t.start_cost = get_field_or<double>(g, "start_cost", 0.0);
        t.stop_cost = get_field_or<double>(g, "stop_cost", 0.0);
        t.initial_online = get_field_or<bool>(g, "initial_online", false);
        t.initial_output = get_field_or<double>(g, "initial_output", 0.0);
        sys.thermal.push_back(std::move(t));
    }
    for (const auto& v : get_field_or<json>(j, "vre", json::array())) {
        VreGenerator u;
        u.id = get_field<std::string>(v, "id", "vre");
        const std::string ctx = "vre " + u.id;
        u.bus = get_field<std::string>(v, "bus", ctx);
        std::string kind = get_field<std::string>(v, "kind", ctx);
        if (kind == "solar")
            u.kind = VreKind::solar;
        else if (kind == "wind")
            u.kind = VreKind::wind;
        else
            throw ParseError(ctx + ": kind must be 'solar' or 'wind'");
        u.capacity = get_field<double>(v, "capacity", ctx);
        u.availability = parse_series(v.at("availability"), base_dir, ctx + ".availability");
        if (v.contains("forecast"))
            u.forecast = parse_series(v.at("forecast"), base_dir, ctx + ".forecast");
        sys.vre.push_back(std::move(u));
    }
    for (const auto& s : get_field_or<json>(j, "storage", json::array())) {
        StorageDevice d;
        d.id = get_field<std::string>(s, "id", "storage");
        const std::string ctx = "storage " + d.id;
        d.bus = get_field<std::string>(s, "bus", ctx);
        d.charge_max = get_field<double>(s, "charge_max", ctx);
        d.discharge_max = get_field<double>(s, "discharge_max", ctx);
        d.soc_min = get_field<double>(s, "soc_min", ctx);
        d.soc_max = get_field<double>(s, "soc_max", ctx);
        d.eff_charge = get_field<double>(s, "eff_charge", ctx);
        d.eff_discharge = get_field<double>(s, "eff_discharge", ctx);
        d.self_discharge = get_field_or<double>(s, "self_discharge", 0.0);
        d.initial_soc = get_field<double>(s, "initial_soc", ctx);
        std::string cls = get_field_or<std::string>(s, "duration_class", "short");
        if (cls == "short")
            d.duration_class = DurationClass::short_duration;
        else if (cls == "long")
            d.duration_class = DurationClass::long_duration;
        else
            throw ParseError(ctx + ": duration_class must be 'short' or 'long'");
        sys.storage.push_back(std::move(d));
    }
    for (const auto& r : get_field_or<json>(j, "reserves", json::array())) {
        ReserveProduct p;
        p.id = get_field<std::string>(r, "id", "reserve");
        const std::string ctx = "reserve " + p.id;
        std::string kind = get_field<std::string>(r, "kind", ctx);
        if (kind == "regulation_up")
            p.kind = ReserveKind::regulation_up;
        else if (kind == "spin_up")
            p.kind = ReserveKind::spin_up;
        else
            throw ParseError(ctx + ": kind must be 'regulation_up' or 'spin_up'");
        const json& req = r.at("requirement");
        if (req.is_object() && !req.contains("csv")) {
            ReserveRule rule;
            rule.load_fraction = get_field_or<double>(req, "load_fraction", 0.0);
            rule.wind_forecast_fraction = get_field_or<double>(req, "wind_forecast_fraction", 0.0);
            rule.solar_forecast_fraction =
                get_field_or<double>(req, "solar_forecast_fraction", 0.0);
            p.requirement = rule;
        } else {
            p.requirement = parse_series(req, base_dir, ctx + ".requirement");
        }
        sys.reserves.push_back(std::move(p));
    }
    if (j.contains("loads")) {
        if (!j.at("loads").is_object()) throw ParseError("loads: must map bus id to a series");
        for (const auto& [bus, series] : j.at("loads").items())
            sys.loads[bus] = parse_series(series, base_dir, "loads." + bus);
    }

    auto violations = validate_system(sys);
    if (!violations.empty()) {
        std::string msg = path.string() + ": invalid system:";
        for (const auto& v : violations) msg += "\n  " + v.str();
        throw ValidationError(msg);
    }
    return sys;
}

std::string system_to_json_text(const PowerSystem& sys) {
    json j;
    j["horizon_hours"] = sys.horizon_hours;
    j["base_power"] = sys.base_power;
    j["buses"] = json::array();
    for (const auto& b : sys.buses)
        j["buses"].push_back({{"id", b.id},
                              {"angle_min", b.angle_min},
                              {"angle_max", b.angle_max},
                              {"is_reference", b.is_reference}});
    j["lines"] = json::array();
    for (const auto& l : sys.lines)
        j["lines"].push_back({{"id", l.id},
                              {"from_bus", l.from_bus},
                              {"to_bus", l.to_bus},
                              {"susceptance", l.susceptance},
                              {"flow_min", l.flow_min},
                              {"flow_max", l.flow_max}});
    j["thermal"] = json::array();
    for (const auto& g : sys.thermal)
        j["thermal"].push_back({{"id", g.id},
                                {"bus", g.bus},
                                {"p_min", g.p_min},
                                {"p_max", g.p_max},
                                {"ramp_up", g.ramp_up},
                                {"ramp_down", g.ramp_down},
                                {"fuel_cost", g.fuel_cost},
                                {"start_cost", g.start_cost},
                                {"stop_cost", g.stop_cost},
                                {"initial_online", g.initial_online},
                                {"initial_output", g.initial_output}});
    j["vre"] = json::array();
    for (const auto& u : sys.vre) {
        json v = {{"id", u.id},
                  {"bus", u.bus},
                  {"kind", u.kind == VreKind::solar ? "solar" : "wind"},
                  {"capacity", u.capacity},
                  {"availability", series_to_json(u.availability)}};
        if (u.forecast) v["forecast"] = series_to_json(*u.forecast);
        j["vre"].push_back(std::move(v));
    }
    j["storage"] = json::array();
    for (const auto& s : sys.storage)
        j["storage"].push_back(
            {{"id", s.id},
             {"bus", s.bus},
             {"charge_max", s.charge_max},
             {"discharge_max", s.discharge_max},
             {"soc_min", s.soc_min},
             {"soc_max", s.soc_max},
             {"eff_charge", s.eff_charge},
             {"eff_discharge", s.eff_discharge},
             {"self_discharge", s.self_discharge},
             {"initial_soc", s.initial_soc},
             {"duration_class",
              s.duration_class == DurationClass::short_duration ? "short" : "long"}});
    j["reserves"] = json::array();
    for (const auto& r : sys.reserves) {
        json req;
        if (const auto* series = std::get_if<Series>(&r.requirement)) {
            req = series_to_json(*series);
        } else {
            const auto& rule = std::get<ReserveRule>(r.requirement);
            req = {{"load_fraction", rule.load_fraction},
                   {"wind_forecast_fraction", rule.wind_forecast_fraction},
                   {"solar_forecast_fraction", rule.solar_forecast_fraction}};
        }
        j["reserves"].push_back(
            {{"id", r.id},
             {"kind", r.kind == ReserveKind::regulation_up ? "regulation_up" : "spin_up"},
             {"requirement", std::move(req)}});
    }
    j["loads"] = json::object();
    for (const auto& [bus, series] : sys.loads) j["loads"][bus] = series_to_json(series);
    return j.dump(1);
}

void save_system(const PowerSystem& sys, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write system file " + path.string());
    out << system_to_json_text(sys) << '\n';
}

uint64_t system_fingerprint(const PowerSystem& sys) {
    return fnv1a(system_to_json_text(sys));
}

std::optional<BuiltinName> parse_builtin_name(const std::string& s) {
    if (s == "mini3") return BuiltinName::mini3;
    if (s == "pjm5like") return BuiltinName::pjm5like;
    return std::nullopt;
}

std::optional<BuiltinProfile> parse_builtin_profile(const std::string& s) {
    if (s == "solar" || s == "solar_driven") return BuiltinProfile::solar_driven;
    if (s == "wind" || s == "wind_driven") return BuiltinProfile::wind_driven;
    return std::nullopt;
}

} // namespace pcsim
