#include "pcsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pcsim {

namespace {

int storage_index(const PowerSystem& sys, const std::string& device) {
    for (size_t s = 0; s < sys.storage.size(); ++s)
        if (sys.storage[s].id == device) return static_cast<int>(s);
    throw UnknownDevice("unknown storage device " + device);
}

// Committed hours sorted into the top-n net-load order shared by all peak
// metrics. Indices are schedule offsets.
std::vector<int> peak_offsets(const AnnualResult& result, const PowerSystem& sys, int n) {
    Series nl = net_load(sys, result.schedule.start_hour, result.schedule.hours);
    std::vector<int> order(nl.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (nl[a] != nl[b]) return nl[a] > nl[b];
        return a < b;
    });
    std::vector<int> out;
    for (int t : order) {
        if (!result.schedule.committed[t]) continue;
        out.push_back(t);
        if (static_cast<int>(out.size()) == n) break;
    }
    return out;
}

} // namespace

CostBreakdown production_cost_breakdown(const PowerSystem& sys, const AnnualResult& result) {
    const DispatchSchedule& sch = result.schedule;
    CostBreakdown out;
    for (size_t i = 0; i < sys.thermal.size(); ++i) {
        const auto& g = sys.thermal[i];
        auto it = sch.boundary.thermal_online.find(g.id);
        double prev_on =
            (it != sch.boundary.thermal_online.end() ? it->second : g.initial_online) ? 1.0 : 0.0;
        for (int t = 0; t < sch.hours; ++t) {
            if (!sch.committed[t]) continue;
            out.fuel += g.fuel_cost * sch.thermal_output[i][t];
            double on = sch.thermal_commit[i][t] >= 0.5 ? 1.0 : 0.0;
            if (on > 0.5 && prev_on < 0.5) out.start += g.start_cost;
            if (on < 0.5 && prev_on > 0.5) out.stop += g.stop_cost;
            prev_on = on;
        }
    }
    for (int t = 0; t < sch.hours; ++t)
        if (sch.committed[t])
            out.unserved_penalty += result.formulation.voll * sch.unserved_total(t);
    for (const auto& series : sch.reserve_shortfall)
        for (int t = 0; t < sch.hours; ++t)
            if (sch.committed[t])
                out.reserve_penalty += result.formulation.reserve_shortfall_penalty * series[t];
    out.evt_penalty = sch.components.evt_penalty;
    out.total = out.fuel + out.start + out.stop + out.unserved_penalty + out.reserve_penalty +
                out.evt_penalty;
    return out;
}

std::vector<int> top_net_load_hours(const PowerSystem& sys, int n) {
    if (n > sys.horizon_hours)
        throw RangeError("top_net_load_hours: n exceeds the horizon");
    Series nl = net_load(sys);
    std::vector<int> order(nl.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (nl[a] != nl[b]) return nl[a] > nl[b];
        return a < b;
    });
    order.resize(n);
    return order;
}

double standard_capacity_credit(const AnnualResult& result, const PowerSystem& sys,
                                const std::string& device, int n) {
    int s = storage_index(sys, device);
    const double pd_max = sys.storage[s].discharge_max;
    double acc = 0.0;
    auto peaks = peak_offsets(result, sys, n);
    for (int t : peaks) acc += result.schedule.discharge[s][t];
    return 100.0 * acc / (n * pd_max);
}

double soc_aware_capacity_credit(const AnnualResult& result, const PowerSystem& sys,
                                 const std::string& device, int n) {
    int s = storage_index(sys, device);
    const auto& dev = sys.storage[s];
    double acc = 0.0;
    auto peaks = peak_offsets(result, sys, n);
    for (int t : peaks) {
        double pd = result.schedule.discharge[s][t];
        double deliverable =
            std::min(dev.discharge_max - pd, dev.eff_discharge * result.schedule.soc[s][t]);
        acc += pd + std::max(0.0, deliverable);
    }
    return 100.0 * acc / (n * dev.discharge_max);
}

double equivalent_cycles(const AnnualResult& result, const PowerSystem& sys,
                         const std::string& device) {
    int s = storage_index(sys, device);
    const auto& dev = sys.storage[s];
    double usable = dev.soc_max - dev.soc_min;
    if (usable <= 0.0)
        throw DegenerateCapacity("storage " + device + " has zero usable capacity");
    double throughput = 0.0;
    for (int t = 0; t < result.schedule.hours; ++t)
        if (result.schedule.committed[t])
            throughput += result.schedule.discharge[s][t] / dev.eff_discharge;
    return throughput / usable;
}

CurtailmentReport curtailment(const AnnualResult& result, const PowerSystem& sys) {
    CurtailmentReport out;
    const DispatchSchedule& sch = result.schedule;
    for (size_t u = 0; u < sys.vre.size(); ++u) {
        for (int t = 0; t < sch.hours; ++t) {
            if (!sch.committed[t]) continue;
            out.available_mwh += sys.vre_actual_mw(sys.vre[u], sch.start_hour + t);
            out.dispatched_mwh += sch.vre_dispatch[u][t];
        }
    }
    out.curtailed_mwh = out.available_mwh - out.dispatched_mwh;
    out.percent = out.available_mwh > 0.0 ? 100.0 * out.curtailed_mwh / out.available_mwh : 0.0;
    return out;
}

double reserve_share_peak(const AnnualResult& result, const PowerSystem& sys,
                          ProviderClass provider_class, int n) {
    const DispatchSchedule& sch = result.schedule;
    auto peaks = peak_offsets(result, sys, n);
    double requirement = 0.0;
    double provided = 0.0;
    for (int t : peaks) {
        for (size_t r = 0; r < sys.reserves.size(); ++r)
            requirement += reserve_requirement(sys, sys.reserves[r], sch.start_hour + t);
        if (provider_class == ProviderClass::thermal) {
            for (const auto& product : sch.reserve_thermal)
                for (const auto& unit : product) provided += unit[t];
        } else {
            for (const auto& product : sch.reserve_storage)
                for (size_t s = 0; s < product.size(); ++s) {
                    bool is_long =
                        sys.storage[s].duration_class == DurationClass::long_duration;
                    if ((provider_class == ProviderClass::long_storage) == is_long)
                        provided += product[s][t];
                }
        }
    }
    return requirement > 0.0 ? 100.0 * provided / requirement : 0.0;
}

MetricsReport compute_metrics(const PowerSystem& sys, const AnnualResult& result) {
    MetricsReport rep;
    rep.system_fingerprint = system_fingerprint(sys);
    rep.strategy_label = result.strategy.label;
    rep.horizon_hours = sys.horizon_hours;
    rep.window_count = static_cast<int>(result.windows.size());
    rep.cost = production_cost_breakdown(sys, result);
    for (const auto& dev : sys.storage) {
        StorageMetrics m;
        m.standard_cc = standard_capacity_credit(result, sys, dev.id);
        m.soc_aware_cc = soc_aware_capacity_credit(result, sys, dev.id);
        m.equivalent_cycles = equivalent_cycles(result, sys, dev.id);
        rep.storage[dev.id] = m;
    }
    rep.vre = curtailment(result, sys);
    if (!sys.reserves.empty()) {
        rep.reserve_share_thermal = reserve_share_peak(result, sys, ProviderClass::thermal);
        rep.reserve_share_short = reserve_share_peak(result, sys, ProviderClass::short_storage);
        rep.reserve_share_long = reserve_share_peak(result, sys, ProviderClass::long_storage);
    }
    for (int t = 0; t < result.schedule.hours; ++t)
        if (result.schedule.committed[t]) rep.unserved_mwh += result.schedule.unserved_total(t);
    for (const auto& w : result.windows) rep.max_window_gap = std::max(rep.max_window_gap, w.gap);
    rep.total_wall_s = result.total_wall_s;
    rep.mean_window_wall_s =
        result.windows.empty() ? 0.0 : result.total_wall_s / result.windows.size();
    rep.peak_memory_bytes = result.peak_memory_bytes;
    return rep;
}

RunComparison compare_runs(const MetricsReport& baseline, const MetricsReport& candidate) {
    if (baseline.system_fingerprint != candidate.system_fingerprint)
        throw FingerprintMismatch("baseline and candidate ran on different systems");
    RunComparison cmp;
    cmp.baseline_label = baseline.strategy_label;
    cmp.candidate_label = candidate.strategy_label;
    cmp.production_cost_reduction_percent =
        baseline.cost.total != 0.0
            ? 100.0 * (baseline.cost.total - candidate.cost.total) / baseline.cost.total
            : 0.0;
    cmp.normalized_cpu_time =
        baseline.total_wall_s > 0.0 ? candidate.total_wall_s / baseline.total_wall_s : 0.0;
    cmp.metric_deltas["production_cost_total"] = candidate.cost.total - baseline.cost.total;
    cmp.metric_deltas["fuel"] = candidate.cost.fuel - baseline.cost.fuel;
    cmp.metric_deltas["start"] = candidate.cost.start - baseline.cost.start;
    cmp.metric_deltas["curtailment_percent"] = candidate.vre.percent - baseline.vre.percent;
    cmp.metric_deltas["unserved_mwh"] = candidate.unserved_mwh - baseline.unserved_mwh;
    for (const auto& [id, m] : candidate.storage) {
        auto it = baseline.storage.find(id);
        if (it == baseline.storage.end()) continue;
        cmp.metric_deltas["standard_cc:" + id] = m.standard_cc - it->second.standard_cc;
        cmp.metric_deltas["soc_aware_cc:" + id] = m.soc_aware_cc - it->second.soc_aware_cc;
        cmp.metric_deltas["equivalent_cycles:" + id] =
            m.equivalent_cycles - it->second.equivalent_cycles;
    }
    return cmp;
}

} // namespace pcsim
