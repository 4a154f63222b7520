#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pcsim/formulation.hpp"
#include "pcsim/mt.hpp"

namespace pcsim {

enum class StrategyName : uint8_t { ID, ID_LP, TR, ELH, EVT_LA, EVT_LA_MT, EV };

struct StrategyParams {
    std::optional<int> lookahead_days;     // ELH
    std::optional<double> energy_value;    // EV
    std::optional<double> evt_fraction;    // EVT-LA
    std::vector<std::string> target_devices; // EVT strategies; empty = all long-duration
    std::optional<double> per_window_time_limit;
    std::optional<double> ideal_time_limit;
};

struct StrategySpec {
    StrategyName name = StrategyName::TR;
    std::string label = "TR";
    int lookahead_hours = 24;
    double energy_value = 0.0;
    double evt_fraction = 0.5;
    std::vector<std::string> target_devices;
    double per_window_time_limit = 1000.0; // seconds, per sub-problem
    double ideal_time_limit = 86400.0;     // seconds, full-horizon runs
};

StrategySpec make_strategy(StrategyName name, const StrategyParams& params = {});
/// Table-style labels: ID, ID-LP, TR, ELH-3d, ELH-1w, ELH-1m, EVT-LA,
/// EVT-LA-MT, EV-01, EV-025 (also accepts ELH-<n>d and EV:<value>).
StrategySpec make_strategy(const std::string& label);
std::vector<std::string> known_strategy_labels();

enum class TailMode : uint8_t { clamp, truncate };

struct EngineOptions {
    TailMode tail = TailMode::clamp;
    // Comparability mode: fixed initial SOC, free terminal SOC, no cyclic
    // constraint; makes the full-horizon run a lower bound for every rolling
    // strategy. Turn off for standalone ideal studies (cyclic SOC active).
    bool comparability = true;
    std::ostream* log = nullptr;
    std::optional<MtOptions> mt; // EVT-LA-MT override
};

struct WindowRecord {
    int index = 0;
    int start_hour = 0; // 0-based
    int hours = 0;
    int committed = 0;
    SolveStatus status = SolveStatus::optimal;
    double objective = 0.0;
    double gap = 0.0;
    long nodes = 0;
    long iterations = 0;
    double wall_s = 0.0;
    double evt_deviation = 0.0; // max |SoC - target| at the EVT offset, if any
    double evt_slack = 0.0;     // soft-mode under+over total, if any
};

struct AnnualResult {
    DispatchSchedule schedule; // committed hours only, concatenated
    std::vector<WindowRecord> windows;
    StrategySpec strategy;
    FormulationOptions formulation;
    SolverOptions solver;
    double total_wall_s = 0.0;
    long peak_memory_bytes = 0; // best-effort estimate
};

struct SolverFailure : Error {
    using Error::Error;
};

AnnualResult run_strategy(const PowerSystem& system, const StrategySpec& strategy,
                          const FormulationOptions& formulation, const SolverOptions& solver,
                          const EngineOptions& engine = {});

AnnualResult run_ideal(const PowerSystem& system, bool relax,
                       const FormulationOptions& formulation, const SolverOptions& solver,
                       const EngineOptions& engine = {});

BoundaryState advance_boundary(const PowerSystem& system, const DispatchSchedule& schedule,
                               int commit_hours);

long peak_memory_estimate_bytes();

} // namespace pcsim
