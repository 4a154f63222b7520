#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcsim/lp.hpp"
#include "pcsim/system.hpp"

namespace pcsim {

struct HorizonSpec {
    int start_hour = 0;     // 0-based absolute hour
    int commit_hours = 24;  // decisions kept
    int lookahead_hours = 24; // decisions discarded
    int total() const { return commit_hours + lookahead_hours; }
};

enum class NetworkMode : uint8_t { copper_plate, nodal };
enum class EvtMode : uint8_t { hard, soft };

struct EnergyValueSpec {
    double value = 0.0;       // currency/MWh on end-of-period SOC
    std::vector<int> hours;   // 1-based in-window hour offsets, e.g. {24, 48}
};

struct EvtTarget {
    std::string device_id;
    double target_mwh = 0.0;
};

struct EvtSpec {
    std::vector<EvtTarget> targets;
    int hour_offset = 48; // 1-based in-window hour
    EvtMode mode = EvtMode::soft;
    double penalty = 500.0; // currency/MWh on target slack, soft mode only
};

struct FormulationOptions {
    NetworkMode network = NetworkMode::copper_plate;
    bool relax_binaries = false;
    std::optional<EnergyValueSpec> energy_value;
    std::optional<EvtSpec> evt;
    bool cyclic_soc = false;
    double voll = 10000.0;                    // currency/MWh unserved
    double reserve_shortfall_penalty = 4000.0; // currency/MW short
    bool include_reserves = true;
    bool include_startstop_costs = true;       // mid-term model drops them
    bool use_forecast_in_lookahead = true;     // committed hours see actuals
    bool forecast_everywhere = false;          // mid-term model sees forecasts only
};

struct BoundaryState {
    std::map<std::string, double> storage_soc;
    std::map<std::string, bool> thermal_online;
    std::map<std::string, double> thermal_prev_output;

    static BoundaryState initial(const PowerSystem& system);
};

// Index of every decision variable of a built window, [entity][hour offset].
struct UcdIndex {
    HorizonSpec horizon;
    NetworkMode network = NetworkMode::copper_plate;
    bool relaxed = false;
    double voll = 0.0;
    double reserve_shortfall_penalty = 0.0;

    std::vector<std::vector<int>> p, x, xstart, xstop;      // [thermal][t]
    std::vector<std::vector<int>> vre;                      // [vre][t]
    std::vector<std::vector<int>> pc, pd, soc, xc;          // [storage][t]
    std::vector<std::vector<std::vector<int>>> r_thermal;   // [product][thermal][t]
    std::vector<std::vector<std::vector<int>>> r_storage;   // [product][storage][t]
    std::vector<std::vector<int>> flow, angle;              // [line][t], [bus][t] (nodal)
    std::vector<std::vector<int>> unserved;                 // [bus][t] nodal, [0][t] copper
    std::vector<std::vector<int>> shortfall;                // [product][t]

    // EV rebate bookkeeping: (soc variable, value coefficient)
    std::vector<std::pair<int, double>> ev_terms;
    // EVT slack bookkeeping: (under, over, penalty); (-1,-1,_) in hard mode
    struct EvtSlack { int storage_index; int under_var; int over_var; double penalty; };
    std::vector<EvtSlack> evt_slacks;
    std::vector<double> vre_bound_mw; // flattened [vre * total + t], bound used in the model
    BoundaryState boundary_resolved;  // boundary the window was built against
};

struct UcdProblem {
    LinearProblem lp;
    UcdIndex index;
};

UcdProblem build_ucd(const PowerSystem& system, const HorizonSpec& horizon,
                     const BoundaryState& boundary, const FormulationOptions& options);

/// Adds the stored-energy-value rebate: objective -= value * SoC at the listed
/// 1-based in-window hours, for every storage device.
void attach_energy_value(UcdProblem& problem, double value, const std::vector<int>& hour_offsets);

/// Adds end-volume targets at the spec's hour offset (hard equality or soft
/// penalty with under/over slack).
void attach_evt(UcdProblem& problem, const PowerSystem& system, const EvtSpec& evt,
                double max_fuel_cost, double voll);

struct ObjectiveComponents {
    double fuel = 0.0;
    double start = 0.0;
    double stop = 0.0;
    double unserved_penalty = 0.0;
    double reserve_penalty = 0.0;
    double evt_penalty = 0.0;
    double ev_rebate = 0.0;

    double production_cost() const {
        return fuel + start + stop + unserved_penalty + reserve_penalty + evt_penalty;
    }
    double solver_objective() const { return production_cost() - ev_rebate; }
};

struct DispatchSchedule {
    int start_hour = 0;
    int hours = 0;
    NetworkMode network = NetworkMode::copper_plate;
    std::vector<uint8_t> committed; // per hour

    std::vector<std::vector<double>> thermal_output, thermal_commit, thermal_start, thermal_stop;
    std::vector<std::vector<double>> vre_dispatch, vre_bound;
    std::vector<std::vector<double>> charge, discharge, soc, charge_mode;
    std::vector<std::vector<std::vector<double>>> reserve_thermal; // [product][unit][t]
    std::vector<std::vector<std::vector<double>>> reserve_storage;
    std::vector<std::vector<double>> flow, angle;
    std::vector<std::vector<double>> unserved; // [bus][t] nodal, [0][t] copper plate
    std::vector<std::vector<double>> reserve_shortfall;

    BoundaryState boundary; // state entering hour 0
    ObjectiveComponents components;

    double unserved_total(int t) const;
    int committed_hours() const;
};

DispatchSchedule extract_schedule(const PowerSystem& system, const Solution& solution,
                                  const UcdProblem& problem);

// Hour-by-hour feasibility residuals of a schedule against the adopted model.
struct ScheduleCheck {
    double max_balance_residual = 0.0;       // Eq. 2 / Eq. 7
    double max_soc_residual = 0.0;           // adopted Eq. 13
    double max_charge_discharge_overlap = 0.0; // normalized p^c * p^d
    double max_headroom_violation = 0.0;     // Eq. 16
    double max_commitment_residual = 0.0;    // Eq. 5
    double max_start_stop_overlap = 0.0;
    double max_flow_angle_residual = 0.0;    // Eq. 9
    double max_bound_violation = 0.0;

    double worst() const;
};

ScheduleCheck verify_schedule(const PowerSystem& system, const DispatchSchedule& schedule);

} // namespace pcsim
