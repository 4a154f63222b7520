#pragma once

#include <map>
#include <string>
#include <vector>

#include "pcsim/engine.hpp"

namespace pcsim {

struct CostBreakdown {
    double fuel = 0.0;
    double start = 0.0;
    double stop = 0.0;
    double unserved_penalty = 0.0;
    double reserve_penalty = 0.0;
    double evt_penalty = 0.0;
    double total = 0.0;
};

/// Recomputed from the committed schedule, never from solver objectives
/// (those may carry stored-energy-value rebates).
CostBreakdown production_cost_breakdown(const PowerSystem& system, const AnnualResult& result);

/// The n hours with the largest net load, descending; ties broken by the
/// earlier hour.
std::vector<int> top_net_load_hours(const PowerSystem& system, int n);

double standard_capacity_credit(const AnnualResult& result, const PowerSystem& system,
                                const std::string& device, int n = 10);

/// Counts deliverable stored energy on top of actual discharge; peak hours are
/// scored independently (no chronology between them).
double soc_aware_capacity_credit(const AnnualResult& result, const PowerSystem& system,
                                 const std::string& device, int n = 10);

/// SOC throughput over usable capacity.
double equivalent_cycles(const AnnualResult& result, const PowerSystem& system,
                         const std::string& device);

struct CurtailmentReport {
    double available_mwh = 0.0;
    double dispatched_mwh = 0.0;
    double curtailed_mwh = 0.0;
    double percent = 0.0;
};

CurtailmentReport curtailment(const AnnualResult& result, const PowerSystem& system);

enum class ProviderClass : uint8_t { thermal, short_storage, long_storage };

/// Share of the total reserve requirement over the top-n net-load hours that
/// was carried by the given provider class.
double reserve_share_peak(const AnnualResult& result, const PowerSystem& system,
                          ProviderClass provider_class, int n = 10);

struct StorageMetrics {
    double standard_cc = 0.0;
    double soc_aware_cc = 0.0;
    double equivalent_cycles = 0.0;
};

struct MetricsReport {
    uint64_t system_fingerprint = 0;
    std::string strategy_label;
    int horizon_hours = 0;
    int window_count = 0;
    CostBreakdown cost;
    std::map<std::string, StorageMetrics> storage;
    CurtailmentReport vre;
    double reserve_share_thermal = 0.0;
    double reserve_share_short = 0.0;
    double reserve_share_long = 0.0;
    double unserved_mwh = 0.0;
    double max_window_gap = 0.0;
    // Wall-clock quantities are kept out of metrics.json so artifacts stay
    // byte-identical across re-runs; they live in windows.csv / run.log.
    double total_wall_s = 0.0;
    double mean_window_wall_s = 0.0;
    long peak_memory_bytes = 0;
};

MetricsReport compute_metrics(const PowerSystem& system, const AnnualResult& result);

struct RunComparison {
    std::string baseline_label;
    std::string candidate_label;
    double production_cost_reduction_percent = 0.0;
    double normalized_cpu_time = 0.0;
    std::map<std::string, double> metric_deltas; // candidate minus baseline
};

RunComparison compare_runs(const MetricsReport& baseline, const MetricsReport& candidate);

} // namespace pcsim
