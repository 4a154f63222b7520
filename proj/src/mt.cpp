#include "pcsim/mt.hpp"

#include <algorithm>

namespace pcsim {

int SocTrajectory::device_index(const std::string& id) const {
    for (size_t i = 0; i < device_ids.size(); ++i)
        if (device_ids[i] == id) return static_cast<int>(i);
    return -1;
}

SocTrajectory run_mt(const PowerSystem& sys, const MtOptions& opt) {
    const int NT = sys.horizon_hours;
    if (NT < opt.commit_hours + opt.lookahead_hours)
        throw ConfigError("mid-term phase needs a horizon of at least " +
                          std::to_string(opt.commit_hours + opt.lookahead_hours) + " hours");

    SocTrajectory traj;
    for (const auto& d : sys.storage) {
        traj.device_ids.push_back(d.id);
        traj.soc.emplace_back(NT, 0.0);
    }

    FormulationOptions fopt;
    fopt.network = opt.network;
    fopt.relax_binaries = true;
    fopt.include_startstop_costs = false;
    fopt.include_reserves = opt.include_reserves;
    fopt.forecast_everywhere = true;

    BoundaryState boundary = BoundaryState::initial(sys);
    int start = 0;
    int window = 0;
    while (start < NT) {
        int remaining = NT - start;
        HorizonSpec horizon;
        horizon.start_hour = start;
        if (opt.commit_hours + opt.lookahead_hours >= remaining) {
            horizon.commit_hours = remaining; // final window commits its tail
            horizon.lookahead_hours = 0;
        } else {
            horizon.commit_hours = opt.commit_hours;
            horizon.lookahead_hours = opt.lookahead_hours;
        }
        UcdProblem prob = build_ucd(sys, horizon, boundary, fopt);
        Solution sol = solve_lp(prob.lp, opt.solver);
        if (!sol.has_incumbent())
            throw Error("mid-term window " + std::to_string(window) + " failed: " +
                        to_string(sol.status));
        DispatchSchedule sch = extract_schedule(sys, sol, prob);
        for (size_t s = 0; s < sys.storage.size(); ++s)
            for (int t = 0; t < horizon.commit_hours; ++t)
                traj.soc[s][start + t] = sch.soc[s][t];

        for (size_t s = 0; s < sys.storage.size(); ++s)
            boundary.storage_soc[sys.storage[s].id] = sch.soc[s][horizon.commit_hours - 1];
        for (size_t i = 0; i < sys.thermal.size(); ++i) {
            const auto& g = sys.thermal[i];
            double out = sch.thermal_output[i][horizon.commit_hours - 1];
            // Relaxed commitment: anything producing counts as online so the
            // boundary invariant (offline => zero output) survives the seam.
            bool online = sch.thermal_commit[i][horizon.commit_hours - 1] >= 0.5 || out > 1e-9;
            boundary.thermal_online[g.id] = online;
            boundary.thermal_prev_output[g.id] = online ? out : 0.0;
        }
        start += horizon.commit_hours;
        ++window;
    }
    return traj;
}

DailyTargets extract_daily_targets(const SocTrajectory& traj,
                                   const std::vector<std::string>& devices) {
    DailyTargets out;
    if (traj.soc.empty()) return out;
    const int NT = static_cast<int>(traj.soc.front().size());
    const int days = NT / 24;

    std::vector<int> picks;
    for (const auto& id : devices) {
        int ix = traj.device_index(id);
        if (ix < 0) throw UnknownDevice("no trajectory for storage device " + id);
        picks.push_back(ix);
        out.device_ids.push_back(id);
    }
    out.targets.assign(days, std::vector<double>(picks.size(), 0.0));
    for (int d = 0; d < days; ++d) {
        int hour = std::min((d + 2) * 24, NT) - 1; // end of day d+1, clamped to the horizon
        for (size_t k = 0; k < picks.size(); ++k) out.targets[d][k] = traj.soc[picks[k]][hour];
    }
    return out;
}

} // namespace pcsim
