#include "pcsim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <sys/resource.h>

namespace pcsim {

namespace {

using Clock = std::chrono::steady_clock;

std::string default_label(StrategyName name, const StrategyParams& params) {
    switch (name) {
        case StrategyName::ID: return "ID";
        case StrategyName::ID_LP: return "ID-LP";
        case StrategyName::TR: return "TR";
        case StrategyName::ELH: {
            int days = params.lookahead_days.value_or(0);
            if (days == 7) return "ELH-1w";
            if (days == 30) return "ELH-1m";
            return "ELH-" + std::to_string(days) + "d";
        }
        case StrategyName::EVT_LA: return "EVT-LA";
        case StrategyName::EVT_LA_MT: return "EVT-LA-MT";
        case StrategyName::EV: {
            double v = params.energy_value.value_or(0.0);
            if (v == 0.1) return "EV-01";
            if (v == 0.25) return "EV-025";
            return "EV";
        }
    }
    return "?";
}

void reject_param(bool present, const std::string& strategy, const std::string& param) {
    if (present)
        throw ConfigError(strategy + " does not take parameter '" + param + "'");
}

} // namespace

StrategySpec make_strategy(StrategyName name, const StrategyParams& params) {
    StrategySpec spec;
    spec.name = name;
    spec.label = default_label(name, params);
    if (params.per_window_time_limit) spec.per_window_time_limit = *params.per_window_time_limit;
    if (params.ideal_time_limit) spec.ideal_time_limit = *params.ideal_time_limit;
    spec.target_devices = params.target_devices;

    switch (name) {
        case StrategyName::ID:
        case StrategyName::ID_LP:
            reject_param(params.lookahead_days.has_value(), spec.label, "lookahead_days");
            reject_param(params.energy_value.has_value(), spec.label, "energy_value");
            reject_param(params.evt_fraction.has_value(), spec.label, "evt_fraction");
            spec.lookahead_hours = 0;
            break;
        case StrategyName::TR:
            reject_param(params.lookahead_days.has_value(), spec.label, "lookahead_days");
            reject_param(params.energy_value.has_value(), spec.label, "energy_value");
            reject_param(params.evt_fraction.has_value(), spec.label, "evt_fraction");
            spec.lookahead_hours = 24;
            break;
        case StrategyName::ELH: {
            if (!params.lookahead_days)
                throw ConfigError("ELH requires parameter 'lookahead_days'");
            reject_param(params.energy_value.has_value(), spec.label, "energy_value");
            reject_param(params.evt_fraction.has_value(), spec.label, "evt_fraction");
            int days = *params.lookahead_days;
            if (days < 1) throw ConfigError("ELH lookahead_days must be positive");
            spec.lookahead_hours = 24 * days;
            break;
        }
        case StrategyName::EVT_LA:
            reject_param(params.lookahead_days.has_value(), spec.label, "lookahead_days");
            reject_param(params.energy_value.has_value(), spec.label, "energy_value");
            spec.lookahead_hours = 24;
            spec.evt_fraction = params.evt_fraction.value_or(0.5);
            if (spec.evt_fraction < 0.0 || spec.evt_fraction > 1.0)
                throw ConfigError("EVT-LA fraction must lie in [0, 1]");
            break;
        case StrategyName::EVT_LA_MT:
            reject_param(params.lookahead_days.has_value(), spec.label, "lookahead_days");
            reject_param(params.energy_value.has_value(), spec.label, "energy_value");
            reject_param(params.evt_fraction.has_value(), spec.label, "evt_fraction");
            spec.lookahead_hours = 24;
            break;
        case StrategyName::EV:
            if (!params.energy_value)
                throw ConfigError("EV requires parameter 'energy_value'");
            reject_param(params.lookahead_days.has_value(), spec.label, "lookahead_days");
            reject_param(params.evt_fraction.has_value(), spec.label, "evt_fraction");
            spec.lookahead_hours = 24;
            spec.energy_value = *params.energy_value;
            if (spec.energy_value < 0.0) throw ConfigError("EV value must be nonnegative");
            break;
    }
    return spec;
}

StrategySpec make_strategy(const std::string& label) {
    StrategyParams p;
    if (label == "ID") return make_strategy(StrategyName::ID, p);
    if (label == "ID-LP") return make_strategy(StrategyName::ID_LP, p);
    if (label == "TR") return make_strategy(StrategyName::TR, p);
    if (label == "EVT-LA") return make_strategy(StrategyName::EVT_LA, p);
    if (label == "EVT-LA-MT") return make_strategy(StrategyName::EVT_LA_MT, p);
    if (label == "ELH-3d") {
        p.lookahead_days = 3;
        return make_strategy(StrategyName::ELH, p);
    }
    if (label == "ELH-1w") {
        p.lookahead_days = 7;
        return make_strategy(StrategyName::ELH, p);
    }
    if (label == "ELH-1m") {
        p.lookahead_days = 30;
        return make_strategy(StrategyName::ELH, p);
    }
    if (label == "EV-01") {
        p.energy_value = 0.1;
        return make_strategy(StrategyName::EV, p);
    }
    if (label == "EV-025") {
        p.energy_value = 0.25;
        return make_strategy(StrategyName::EV, p);
    }
    if (label.rfind("ELH-", 0) == 0 && label.back() == 'd') {
        p.lookahead_days = std::stoi(label.substr(4, label.size() - 5));
        return make_strategy(StrategyName::ELH, p);
    }
    if (label.rfind("EV:", 0) == 0) {
        p.energy_value = std::stod(label.substr(3));
        return make_strategy(StrategyName::EV, p);
    }
    std::string valid;
    for (const auto& l : known_strategy_labels()) valid += (valid.empty() ? "" : ", ") + l;
    throw ConfigError("unknown strategy '" + label + "'; valid strategies: " + valid);
}

std::vector<std::string> known_strategy_labels() {
    return {"ID", "ID-LP", "TR", "ELH-3d", "ELH-1w", "ELH-1m", "EVT-LA", "EVT-LA-MT",
            "EV-01", "EV-025"};
}

long peak_memory_estimate_bytes() {
    struct rusage ru{};
    if (getrusage(RUSAGE_SELF, &ru) != 0) return 0;
    return static_cast<long>(ru.ru_maxrss) * 1024L; // Linux reports KiB
}

BoundaryState advance_boundary(const PowerSystem& sys, const DispatchSchedule& sch,
                               int commit_hours) {
    const int last = commit_hours - 1;
    BoundaryState b;
    for (size_t s = 0; s < sys.storage.size(); ++s) {
        double soc = sch.soc[s][last];
        b.storage_soc[sys.storage[s].id] =
            std::clamp(soc, sys.storage[s].soc_min, sys.storage[s].soc_max);
    }
    for (size_t i = 0; i < sys.thermal.size(); ++i) {
        bool online = sch.thermal_commit[i][last] >= 0.5;
        b.thermal_online[sys.thermal[i].id] = online;
        b.thermal_prev_output[sys.thermal[i].id] = online ? sch.thermal_output[i][last] : 0.0;
    }
    return b;
}

namespace {

// Appends the committed prefix of a window schedule to the running annual one.
void append_committed(DispatchSchedule& annual, const DispatchSchedule& window, int committed) {
    auto append2 = [&](std::vector<std::vector<double>>& dst,
                       const std::vector<std::vector<double>>& src) {
        if (dst.empty()) dst.resize(src.size());
        for (size_t i = 0; i < src.size(); ++i)
            dst[i].insert(dst[i].end(), src[i].begin(), src[i].begin() + committed);
    };
    auto append3 = [&](std::vector<std::vector<std::vector<double>>>& dst,
                       const std::vector<std::vector<std::vector<double>>>& src) {
        if (dst.empty()) dst.resize(src.size());
        for (size_t r = 0; r < src.size(); ++r) {
            if (dst[r].empty()) dst[r].resize(src[r].size());
            for (size_t i = 0; i < src[r].size(); ++i)
                dst[r][i].insert(dst[r][i].end(), src[r][i].begin(),
                                 src[r][i].begin() + committed);
        }
    };

    if (annual.hours == 0) {
        annual.start_hour = window.start_hour;
        annual.network = window.network;
        annual.boundary = window.boundary;
    }
    append2(annual.thermal_output, window.thermal_output);
    append2(annual.thermal_commit, window.thermal_commit);
    append2(annual.thermal_start, window.thermal_start);
    append2(annual.thermal_stop, window.thermal_stop);
    append2(annual.vre_dispatch, window.vre_dispatch);
    append2(annual.vre_bound, window.vre_bound);
    append2(annual.charge, window.charge);
    append2(annual.discharge, window.discharge);
    append2(annual.soc, window.soc);
    append2(annual.charge_mode, window.charge_mode);
    append3(annual.reserve_thermal, window.reserve_thermal);
    append3(annual.reserve_storage, window.reserve_storage);
    append2(annual.flow, window.flow);
    append2(annual.angle, window.angle);
    append2(annual.unserved, window.unserved);
    append2(annual.reserve_shortfall, window.reserve_shortfall);
    annual.hours += committed;
    annual.committed.insert(annual.committed.end(), committed, uint8_t{1});

    // Committed-hour component totals (window components cover look-ahead
    // hours too, so recompute the committed share later from the schedule).
    annual.components.evt_penalty += window.components.evt_penalty;
    annual.components.ev_rebate += window.components.ev_rebate;
}

void log_window(std::ostream* log, const WindowRecord& rec) {
    if (!log) return;
    (*log) << "window=" << rec.index << " start_hour=" << rec.start_hour + 1
           << " status=" << to_string(rec.status) << " obj=" << rec.objective
           << " gap=" << rec.gap << " wall_s=" << rec.wall_s << "\n";
}

std::vector<std::string> resolve_target_devices(const PowerSystem& sys,
                                                const std::vector<std::string>& requested) {
    if (!requested.empty()) {
        for (const auto& id : requested)
            if (!sys.find_storage(id)) throw ConfigError("unknown target device " + id);
        return requested;
    }
    std::vector<std::string> out;
    for (const auto& s : sys.storage)
        if (s.duration_class == DurationClass::long_duration) out.push_back(s.id);
    return out;
}

} // namespace

AnnualResult run_ideal(const PowerSystem& sys, bool relax, const FormulationOptions& fopt,
                       const SolverOptions& sopt, const EngineOptions& eng) {
    auto t0 = Clock::now();
    const int NT = sys.horizon_hours;

    FormulationOptions wopt = fopt;
    wopt.relax_binaries = relax;
    wopt.cyclic_soc = !eng.comparability; // Eq. 14 only outside comparability mode

    HorizonSpec horizon{0, NT, 0};
    UcdProblem prob = build_ucd(sys, horizon, BoundaryState::initial(sys), wopt);
    Solution sol = solve_milp(prob.lp, sopt);
    if (sol.status == SolveStatus::time_limit_no_incumbent)
        throw SolverFailure("ideal run: time limit reached with no incumbent");
    if (!sol.has_incumbent())
        throw SolverFailure(std::string("ideal run failed: ") + to_string(sol.status));

    AnnualResult res;
    res.strategy = make_strategy(relax ? StrategyName::ID_LP : StrategyName::ID);
    res.formulation = wopt;
    res.solver = sopt;
    DispatchSchedule sch = extract_schedule(sys, sol, prob);
    for (auto& c : sch.committed) c = 1;
    res.schedule = std::move(sch);

    WindowRecord rec;
    rec.index = 0;
    rec.start_hour = 0;
    rec.hours = NT;
    rec.committed = NT;
    rec.status = sol.status;
    rec.objective = sol.objective;
    rec.gap = sol.gap;
    rec.nodes = sol.nodes_explored;
    rec.iterations = sol.simplex_iterations;
    rec.wall_s = sol.wall_time;
    log_window(eng.log, rec);
    res.windows.push_back(rec);
    res.total_wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
    res.peak_memory_bytes = peak_memory_estimate_bytes();
    return res;
}

AnnualResult run_strategy(const PowerSystem& sys, const StrategySpec& strategy,
                          const FormulationOptions& fopt, const SolverOptions& sopt,
                          const EngineOptions& eng) {
    const int NT = sys.horizon_hours;
    if (NT < 48) throw ConfigError("strategy runs need a horizon of at least 48 hours");

    if (strategy.name == StrategyName::ID || strategy.name == StrategyName::ID_LP) {
        SolverOptions ideal_sopt = sopt;
        ideal_sopt.time_limit = strategy.ideal_time_limit;
        AnnualResult res =
            run_ideal(sys, strategy.name == StrategyName::ID_LP, fopt, ideal_sopt, eng);
        res.strategy = strategy;
        return res;
    }

    auto t0 = Clock::now();
    AnnualResult res;
    res.strategy = strategy;
    res.formulation = fopt;
    res.solver = sopt;

    // EVT target sources.
    std::vector<std::string> targets;
    DailyTargets mt_targets;
    if (strategy.name == StrategyName::EVT_LA || strategy.name == StrategyName::EVT_LA_MT)
        targets = resolve_target_devices(sys, strategy.target_devices);
    if (strategy.name == StrategyName::EVT_LA_MT) {
        MtOptions mt = eng.mt.value_or(MtOptions{});
        if (!eng.mt) {
            mt.network = fopt.network; // default: match the PCM network mode
            mt.solver = sopt;
            mt.solver.time_limit = strategy.per_window_time_limit;
        }
        mt_targets = extract_daily_targets(run_mt(sys, mt), targets);
    }

    SolverOptions wsopt = sopt;
    wsopt.time_limit = strategy.per_window_time_limit;

    BoundaryState boundary = BoundaryState::initial(sys);
    const int commit = 24;
    int start = 0;
    int window = 0;
    while (start < NT) {
        const int remaining = NT - start;
        HorizonSpec horizon;
        horizon.start_hour = start;
        if (eng.tail == TailMode::truncate) {
            if (commit + strategy.lookahead_hours > remaining)
                break; // paper-style accounting: only full windows
            horizon.commit_hours = commit;
            horizon.lookahead_hours = strategy.lookahead_hours;
        } else if (commit + strategy.lookahead_hours >= remaining) {
            horizon.commit_hours = remaining; // clamp: the final window commits its tail
            horizon.lookahead_hours = 0;
        } else {
            horizon.commit_hours = commit;
            horizon.lookahead_hours = strategy.lookahead_hours;
        }
        const int total = horizon.total();

        FormulationOptions wopt = fopt;
        wopt.cyclic_soc = false;
        if (strategy.name == StrategyName::EV) {
            EnergyValueSpec ev;
            ev.value = strategy.energy_value;
            for (int offset : {24, 48})
                if (offset <= total) ev.hours.push_back(offset);
            wopt.energy_value = ev;
        }
        if (strategy.name == StrategyName::EVT_LA || strategy.name == StrategyName::EVT_LA_MT) {
            EvtSpec evt;
            if (fopt.evt) evt = *fopt.evt; // penalty/mode overrides from the caller
            evt.hour_offset = std::min(48, total);
            evt.targets.clear();
            int day = start / 24;
            for (size_t k = 0; k < targets.size(); ++k) {
                const StorageDevice* dev = sys.find_storage(targets[k]);
                double value = strategy.name == StrategyName::EVT_LA
                                   ? strategy.evt_fraction * dev->soc_max
                                   : mt_targets.targets[std::min<size_t>(day,
                                         mt_targets.targets.size() - 1)][k];
                value = std::clamp(value, dev->soc_min, dev->soc_max);
                evt.targets.push_back({targets[k], value});
            }
            wopt.evt = evt;
        }

        UcdProblem prob = build_ucd(sys, horizon, boundary, wopt);
        Solution sol = solve_milp(prob.lp, wsopt);
        if (sol.status == SolveStatus::time_limit_no_incumbent)
            throw SolverFailure("window " + std::to_string(window) +
                                ": time limit reached with no incumbent");
        if (!sol.has_incumbent())
            throw SolverFailure("window " + std::to_string(window) + " failed: " +
                                to_string(sol.status));

        DispatchSchedule sch = extract_schedule(sys, sol, prob);
        append_committed(res.schedule, sch, horizon.commit_hours);
        boundary = advance_boundary(sys, sch, horizon.commit_hours);

        WindowRecord rec;
        rec.index = window;
        rec.start_hour = start;
        rec.hours = total;
        rec.committed = horizon.commit_hours;
        rec.status = sol.status;
        rec.objective = sol.objective;
        rec.gap = sol.gap;
        rec.nodes = sol.nodes_explored;
        rec.iterations = sol.simplex_iterations;
        rec.wall_s = sol.wall_time;
        if (wopt.evt) {
            int off = wopt.evt->hour_offset - 1;
            for (const auto& target : wopt.evt->targets) {
                int s = -1;
                for (size_t k = 0; k < sys.storage.size(); ++k)
                    if (sys.storage[k].id == target.device_id) s = static_cast<int>(k);
                rec.evt_deviation = std::max(
                    rec.evt_deviation, std::fabs(sch.soc[s][off] - target.target_mwh));
            }
            for (const auto& slack : prob.index.evt_slacks)
                if (slack.under_var >= 0)
                    rec.evt_slack +=
                        sol.values[slack.under_var] + sol.values[slack.over_var];
        }
        log_window(eng.log, rec);
        res.windows.push_back(rec);

        start += horizon.commit_hours;
        ++window;
    }

    res.total_wall_s = std::chrono::duration<double>(Clock::now() - t0).count();
    res.peak_memory_bytes = peak_memory_estimate_bytes();
    return res;
}

} // namespace pcsim
