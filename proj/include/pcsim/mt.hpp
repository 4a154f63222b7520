#pragma once

#include <string>
#include <vector>

#include "pcsim/formulation.hpp"

namespace pcsim {

// Mid-term scheduling phase: a rolling weekly LP with no commitment
// constraints whose SOC trajectory supplies end-of-day targets.
struct MtOptions {
    int commit_hours = 168;
    int lookahead_hours = 168;
    bool include_reserves = true;
    NetworkMode network = NetworkMode::copper_plate;
    SolverOptions solver;
};

struct SocTrajectory {
    std::vector<std::string> device_ids;
    std::vector<Series> soc; // [device][hour], full horizon

    int device_index(const std::string& id) const;
};

SocTrajectory run_mt(const PowerSystem& system, const MtOptions& options = {});

struct DailyTargets {
    std::vector<std::string> device_ids;
    std::vector<std::vector<double>> targets; // [day][device], MWh
};

/// Target for the PCM window starting on day d is the trajectory SOC at the
/// end of day d+1 (window offset 48); the final day falls back to the last
/// trajectory hour.
DailyTargets extract_daily_targets(const SocTrajectory& trajectory,
                                   const std::vector<std::string>& devices);

} // namespace pcsim
