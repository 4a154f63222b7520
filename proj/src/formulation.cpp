#include "pcsim/formulation.hpp"

#include <algorithm>
#include <cmath>

namespace pcsim {

BoundaryState BoundaryState::initial(const PowerSystem& sys) {
    BoundaryState b;
    for (const auto& s : sys.storage) b.storage_soc[s.id] = s.initial_soc;
    for (const auto& g : sys.thermal) {
        b.thermal_online[g.id] = g.initial_online;
        b.thermal_prev_output[g.id] = g.initial_output;
    }
    return b;
}

namespace {

std::string var_name(const char* tag, const std::string& id, int t) {
    return std::string(tag) + "[" + id + "][" + std::to_string(t) + "]";
}

double boundary_soc(const BoundaryState& b, const StorageDevice& dev) {
    auto it = b.storage_soc.find(dev.id);
    return it != b.storage_soc.end() ? it->second : dev.initial_soc;
}

bool boundary_online(const BoundaryState& b, const ThermalGenerator& g) {
    auto it = b.thermal_online.find(g.id);
    return it != b.thermal_online.end() ? it->second : g.initial_online;
}

double boundary_output(const BoundaryState& b, const ThermalGenerator& g) {
    auto it = b.thermal_prev_output.find(g.id);
    return it != b.thermal_prev_output.end() ? it->second : g.initial_output;
}

} // namespace

UcdProblem build_ucd(const PowerSystem& sys, const HorizonSpec& horizon,
                     const BoundaryState& boundary, const FormulationOptions& opt) {
    const int T = horizon.total();
    const int NT = sys.horizon_hours;
    if (horizon.commit_hours < 1) throw BuildError("window must commit at least one hour");
    if (horizon.start_hour < 0 || horizon.start_hour + T > NT)
        throw BuildError("window [" + std::to_string(horizon.start_hour) + ", " +
                         std::to_string(horizon.start_hour + T) + ") exceeds horizon " +
                         std::to_string(NT));
    for (const auto& [id, v] : boundary.storage_soc) {
        const StorageDevice* dev = sys.find_storage(id);
        if (!dev) throw BuildError("boundary references unknown storage " + id);
        if (v < dev->soc_min - 1e-6 || v > dev->soc_max + 1e-6)
            throw BuildError("boundary SOC for " + id + " outside device bounds");
    }

    const bool nodal = opt.network == NetworkMode::nodal;
    const int NU = static_cast<int>(sys.thermal.size());
    const int NV = static_cast<int>(sys.vre.size());
    const int NS = static_cast<int>(sys.storage.size());
    const int NR = opt.include_reserves ? static_cast<int>(sys.reserves.size()) : 0;
    const int NB = static_cast<int>(sys.buses.size());
    const int NL = static_cast<int>(sys.lines.size());

    UcdProblem out;
    LinearProblem& lp = out.lp;
    UcdIndex& ix = out.index;
    ix.horizon = horizon;
    ix.network = opt.network;
    ix.relaxed = opt.relax_binaries;
    ix.voll = opt.voll;
    ix.reserve_shortfall_penalty = opt.reserve_shortfall_penalty;

    auto grid = [T](int n) { return std::vector<std::vector<int>>(n, std::vector<int>(T, -1)); };
    ix.p = grid(NU);
    ix.x = grid(NU);
    ix.xstart = grid(NU);
    ix.xstop = grid(NU);
    ix.vre = grid(NV);
    ix.pc = grid(NS);
    ix.pd = grid(NS);
    ix.soc = grid(NS);
    ix.xc = grid(NS);
    ix.r_thermal.assign(NR, grid(NU));
    ix.r_storage.assign(NR, grid(NS));
    ix.flow = grid(nodal ? NL : 0);
    ix.angle = grid(nodal ? NB : 0);
    ix.unserved = grid(nodal ? NB : 1);
    ix.shortfall = grid(NR);
    ix.vre_bound_mw.assign(static_cast<size_t>(NV) * T, 0.0);

    const VarKind bin = opt.relax_binaries ? VarKind::continuous : VarKind::binary;

    // Availability the window is allowed to see at offset t.
    auto vre_bound = [&](const VreGenerator& u, int t) {
        int h = horizon.start_hour + t;
        bool use_forecast = opt.forecast_everywhere ||
                            (t >= horizon.commit_hours && opt.use_forecast_in_lookahead);
        return use_forecast ? sys.vre_forecast_mw(u, h) : sys.vre_actual_mw(u, h);
    };

    // --- Variables, hour-major so the constraint matrix is staircase-shaped.
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < NU; ++i) {
            const auto& g = sys.thermal[i];
            ix.p[i][t] = lp.add_variable(var_name("p", g.id, t), 0.0, g.p_max);
            ix.x[i][t] = lp.add_variable(var_name("x", g.id, t), 0.0, 1.0, bin);
            // Start/stop indicators take integral values at any optimum of the
            // committed model, so they stay continuous.
            ix.xstart[i][t] = lp.add_variable(var_name("xs", g.id, t), 0.0, 1.0);
            ix.xstop[i][t] = lp.add_variable(var_name("xp", g.id, t), 0.0, 1.0);
        }
        for (int v = 0; v < NV; ++v) {
            const auto& u = sys.vre[v];
            double cap = vre_bound(u, t);
            ix.vre_bound_mw[static_cast<size_t>(v) * T + t] = cap;
            ix.vre[v][t] = lp.add_variable(var_name("vre", u.id, t), 0.0, cap);
        }
        for (int s = 0; s < NS; ++s) {
            const auto& d = sys.storage[s];
            ix.pc[s][t] = lp.add_variable(var_name("pc", d.id, t), 0.0, d.charge_max);
            ix.pd[s][t] = lp.add_variable(var_name("pd", d.id, t), 0.0, d.discharge_max);
            ix.soc[s][t] = lp.add_variable(var_name("soc", d.id, t), d.soc_min, d.soc_max);
            ix.xc[s][t] = lp.add_variable(var_name("xc", d.id, t), 0.0, 1.0, bin);
        }
        for (int r = 0; r < NR; ++r) {
            const auto& prod = sys.reserves[r];
            for (int i = 0; i < NU; ++i)
                ix.r_thermal[r][i][t] = lp.add_variable(
                    var_name(("r:" + prod.id).c_str(), sys.thermal[i].id, t), 0.0, kInfinity);
            for (int s = 0; s < NS; ++s)
                ix.r_storage[r][s][t] = lp.add_variable(
                    var_name(("r:" + prod.id).c_str(), sys.storage[s].id, t), 0.0, kInfinity);
            double rr = reserve_requirement(sys, prod, horizon.start_hour + t);
            ix.shortfall[r][t] =
                lp.add_variable(var_name("short", prod.id, t), 0.0, std::max(0.0, rr));
        }
        if (nodal) {
            for (int l = 0; l < NL; ++l)
                ix.flow[l][t] = lp.add_variable(var_name("f", sys.lines[l].id, t),
                                                sys.lines[l].flow_min, sys.lines[l].flow_max);
            for (int k = 0; k < NB; ++k) {
                const auto& b = sys.buses[k];
                double lo = b.is_reference ? 0.0 : b.angle_min;
                double hi = b.is_reference ? 0.0 : b.angle_max;
                ix.angle[k][t] = lp.add_variable(var_name("theta", b.id, t), lo, hi);
            }
            for (int k = 0; k < NB; ++k) {
                double d = sys.bus_load(sys.buses[k].id, horizon.start_hour + t);
                ix.unserved[k][t] = lp.add_variable(var_name("uns", sys.buses[k].id, t), 0.0,
                                                    std::max(0.0, d));
            }
        } else {
            double d = sys.total_load(horizon.start_hour + t);
            ix.unserved[0][t] =
                lp.add_variable(var_name("uns", "sys", t), 0.0, std::max(0.0, d));
        }
    }

    // --- Objective.
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < NU; ++i) {
            const auto& g = sys.thermal[i];
            lp.add_objective(ix.p[i][t], g.fuel_cost);
            if (opt.include_startstop_costs) {
                lp.add_objective(ix.xstart[i][t], g.start_cost);
                lp.add_objective(ix.xstop[i][t], g.stop_cost);
            }
        }
        for (size_t k = 0; k < ix.unserved.size(); ++k)
            lp.add_objective(ix.unserved[k][t], opt.voll);
        for (int r = 0; r < NR; ++r)
            lp.add_objective(ix.shortfall[r][t], opt.reserve_shortfall_penalty);
    }

    // --- Constraints.
    for (int t = 0; t < T; ++t) {
        const int h = horizon.start_hour + t;

        if (!nodal) {
            std::vector<std::pair<int, double>> terms;
            for (int i = 0; i < NU; ++i) terms.emplace_back(ix.p[i][t], 1.0);
            for (int v = 0; v < NV; ++v) terms.emplace_back(ix.vre[v][t], 1.0);
            for (int s = 0; s < NS; ++s) {
                terms.emplace_back(ix.pd[s][t], 1.0);
                terms.emplace_back(ix.pc[s][t], -1.0);
            }
            terms.emplace_back(ix.unserved[0][t], 1.0);
            lp.add_constraint(std::move(terms), ConstraintSense::eq, sys.total_load(h),
                              "balance[" + std::to_string(t) + "]");
        } else {
            for (int l = 0; l < NL; ++l) {
                const auto& line = sys.lines[l];
                int from = sys.bus_index(line.from_bus);
                int to = sys.bus_index(line.to_bus);
                double coef = sys.base_power * line.susceptance;
                lp.add_constraint({{ix.flow[l][t], 1.0},
                                   {ix.angle[from][t], -coef},
                                   {ix.angle[to][t], coef}},
                                  ConstraintSense::eq, 0.0,
                                  var_name("flowdef", line.id, t));
            }
            for (int k = 0; k < NB; ++k) {
                const auto& bus = sys.buses[k];
                std::vector<std::pair<int, double>> terms;
                for (int i = 0; i < NU; ++i)
                    if (sys.thermal[i].bus == bus.id) terms.emplace_back(ix.p[i][t], 1.0);
                for (int v = 0; v < NV; ++v)
                    if (sys.vre[v].bus == bus.id) terms.emplace_back(ix.vre[v][t], 1.0);
                for (int s = 0; s < NS; ++s)
                    if (sys.storage[s].bus == bus.id) {
                        terms.emplace_back(ix.pd[s][t], 1.0);
                        terms.emplace_back(ix.pc[s][t], -1.0);
                    }
                for (int l = 0; l < NL; ++l) {
                    if (sys.lines[l].to_bus == bus.id) terms.emplace_back(ix.flow[l][t], 1.0);
                    if (sys.lines[l].from_bus == bus.id) terms.emplace_back(ix.flow[l][t], -1.0);
                }
                terms.emplace_back(ix.unserved[k][t], 1.0);
                lp.add_constraint(std::move(terms), ConstraintSense::eq,
                                  sys.bus_load(bus.id, h), var_name("nodebal", bus.id, t));
            }
        }

        for (int i = 0; i < NU; ++i) {
            const auto& g = sys.thermal[i];
            std::vector<std::pair<int, double>> up{{ix.p[i][t], 1.0}};
            std::vector<std::pair<int, double>> lo{{ix.p[i][t], 1.0}};
            for (int r = 0; r < NR; ++r) {
                up.emplace_back(ix.r_thermal[r][i][t], 1.0);
                lo.emplace_back(ix.r_thermal[r][i][t], 1.0);
            }
            up.emplace_back(ix.x[i][t], -g.p_max);
            lo.emplace_back(ix.x[i][t], -g.p_min);
            lp.add_constraint(std::move(up), ConstraintSense::le, 0.0,
                              var_name("cap_hi", g.id, t));
            lp.add_constraint(std::move(lo), ConstraintSense::ge, 0.0,
                              var_name("cap_lo", g.id, t));

            // Ramping; a starting (stopping) unit may move up to p_min past the
            // ramp limit so that commitment changes stay feasible.
            if (t == 0) {
                double prev = boundary_output(boundary, g);
                lp.add_constraint({{ix.p[i][t], 1.0}, {ix.xstart[i][t], -g.p_min}},
                                  ConstraintSense::le, g.ramp_up + prev,
                                  var_name("ramp_up", g.id, t));
                lp.add_constraint({{ix.p[i][t], -1.0}, {ix.xstop[i][t], -g.p_min}},
                                  ConstraintSense::le, g.ramp_down - prev,
                                  var_name("ramp_dn", g.id, t));
                lp.add_constraint({{ix.x[i][t], 1.0},
                                   {ix.xstart[i][t], -1.0},
                                   {ix.xstop[i][t], 1.0}},
                                  ConstraintSense::eq, boundary_online(boundary, g) ? 1.0 : 0.0,
                                  var_name("logic", g.id, t));
            } else {
                lp.add_constraint({{ix.p[i][t], 1.0},
                                   {ix.p[i][t - 1], -1.0},
                                   {ix.xstart[i][t], -g.p_min}},
                                  ConstraintSense::le, g.ramp_up, var_name("ramp_up", g.id, t));
                lp.add_constraint({{ix.p[i][t], -1.0},
                                   {ix.p[i][t - 1], 1.0},
                                   {ix.xstop[i][t], -g.p_min}},
                                  ConstraintSense::le, g.ramp_down,
                                  var_name("ramp_dn", g.id, t));
                lp.add_constraint({{ix.x[i][t], 1.0},
                                   {ix.x[i][t - 1], -1.0},
                                   {ix.xstart[i][t], -1.0},
                                   {ix.xstop[i][t], 1.0}},
                                  ConstraintSense::eq, 0.0, var_name("logic", g.id, t));
            }
        }

        for (int r = 0; r < NR; ++r) {
            std::vector<std::pair<int, double>> terms;
            for (int i = 0; i < NU; ++i) terms.emplace_back(ix.r_thermal[r][i][t], 1.0);
            for (int s = 0; s < NS; ++s) terms.emplace_back(ix.r_storage[r][s][t], 1.0);
            terms.emplace_back(ix.shortfall[r][t], 1.0);
            lp.add_constraint(std::move(terms), ConstraintSense::ge,
                              reserve_requirement(sys, sys.reserves[r], h),
                              var_name("reserve", sys.reserves[r].id, t));
        }

        for (int s = 0; s < NS; ++s) {
            const auto& d = sys.storage[s];
            lp.add_constraint({{ix.pc[s][t], 1.0}, {ix.xc[s][t], -d.charge_max}},
                              ConstraintSense::le, 0.0, var_name("chg", d.id, t));
            lp.add_constraint({{ix.pd[s][t], 1.0}, {ix.xc[s][t], d.discharge_max}},
                              ConstraintSense::le, d.discharge_max, var_name("dis", d.id, t));

            // Adopted SOC recursion:
            //   SoC_t = (1 - sd) SoC_{t-1} + eff_c p^c_t - p^d_t / eff_d
            std::vector<std::pair<int, double>> rec{{ix.soc[s][t], 1.0},
                                                    {ix.pc[s][t], -d.eff_charge},
                                                    {ix.pd[s][t], 1.0 / d.eff_discharge}};
            double rhs = 0.0;
            if (t == 0) {
                if (opt.cyclic_soc) {
                    rec.emplace_back(ix.soc[s][T - 1], -(1.0 - d.self_discharge));
                } else {
                    rhs = (1.0 - d.self_discharge) * boundary_soc(boundary, d);
                }
            } else {
                rec.emplace_back(ix.soc[s][t - 1], -(1.0 - d.self_discharge));
            }
            lp.add_constraint(std::move(rec), ConstraintSense::eq, rhs,
                              var_name("socrec", d.id, t));

            if (NR > 0) {
                std::vector<std::pair<int, double>> head{{ix.pd[s][t], 1.0},
                                                         {ix.pc[s][t], -1.0}};
                for (int r = 0; r < NR; ++r) head.emplace_back(ix.r_storage[r][s][t], 1.0);
                lp.add_constraint(std::move(head), ConstraintSense::le, d.discharge_max,
                                  var_name("headroom", d.id, t));
            }
        }
    }

    if (opt.energy_value) attach_energy_value(out, opt.energy_value->value, opt.energy_value->hours);
    if (opt.evt) {
        double max_fuel = 0.0;
        for (const auto& g : sys.thermal) max_fuel = std::max(max_fuel, g.fuel_cost);
        attach_evt(out, sys, *opt.evt, max_fuel, opt.voll);
    }

    // Record the boundary actually used so schedules can be verified.
    out.index.boundary_resolved = BoundaryState{};
    for (const auto& d : sys.storage)
        out.index.boundary_resolved.storage_soc[d.id] = boundary_soc(boundary, d);
    for (const auto& g : sys.thermal) {
        out.index.boundary_resolved.thermal_online[g.id] = boundary_online(boundary, g);
        out.index.boundary_resolved.thermal_prev_output[g.id] = boundary_output(boundary, g);
    }
    return out;
}

void attach_energy_value(UcdProblem& problem, double value, const std::vector<int>& hour_offsets) {
    UcdIndex& ix = problem.index;
    const int T = ix.horizon.total();
    for (int offset : hour_offsets) {
        if (offset < 1 || offset > T)
            throw BuildError("energy-value hour offset " + std::to_string(offset) +
                             " outside window of " + std::to_string(T) + " hours");
        for (auto& soc_series : ix.soc) {
            int var = soc_series[offset - 1];
            problem.lp.add_objective(var, -value);
            ix.ev_terms.emplace_back(var, value);
        }
    }
}

void attach_evt(UcdProblem& problem, const PowerSystem& sys, const EvtSpec& evt,
                double max_fuel_cost, double voll) {
    UcdIndex& ix = problem.index;
    const int T = ix.horizon.total();
    if (evt.hour_offset < 1 || evt.hour_offset > T)
        throw BuildError("EVT hour offset " + std::to_string(evt.hour_offset) +
                         " outside window of " + std::to_string(T) + " hours");
    if (evt.mode == EvtMode::soft && !(voll > evt.penalty && evt.penalty > max_fuel_cost))
        throw BuildError("EVT penalty ordering violated: need voll > penalty > max fuel cost");

    const int t = evt.hour_offset - 1;
    for (const auto& target : evt.targets) {
        int s = -1;
        for (size_t k = 0; k < sys.storage.size(); ++k)
            if (sys.storage[k].id == target.device_id) s = static_cast<int>(k);
        if (s < 0) throw BuildError("EVT target references unknown storage " + target.device_id);
        const auto& dev = sys.storage[s];
        if (target.target_mwh < dev.soc_min - 1e-9 || target.target_mwh > dev.soc_max + 1e-9)
            throw BuildError("EVT target for " + target.device_id + " outside SOC bounds");

        if (evt.mode == EvtMode::hard) {
            problem.lp.add_constraint({{ix.soc[s][t], 1.0}}, ConstraintSense::eq,
                                      target.target_mwh, var_name("evt", dev.id, t));
            ix.evt_slacks.push_back({s, -1, -1, 0.0});
        } else {
            int under = problem.lp.add_variable(var_name("evt_under", dev.id, t), 0.0, kInfinity);
            int over = problem.lp.add_variable(var_name("evt_over", dev.id, t), 0.0, kInfinity);
            problem.lp.add_objective(under, evt.penalty);
            problem.lp.add_objective(over, evt.penalty);
            problem.lp.add_constraint(
                {{ix.soc[s][t], 1.0}, {under, 1.0}, {over, -1.0}}, ConstraintSense::eq,
                target.target_mwh, var_name("evt", dev.id, t));
            ix.evt_slacks.push_back({s, under, over, evt.penalty});
        }
    }
}

double DispatchSchedule::unserved_total(int t) const {
    double acc = 0.0;
    for (const auto& series : unserved) acc += series[t];
    return acc;
}

int DispatchSchedule::committed_hours() const {
    int n = 0;
    for (uint8_t c : committed) n += c ? 1 : 0;
    return n;
}

DispatchSchedule extract_schedule(const PowerSystem& sys, const Solution& solution,
                                  const UcdProblem& problem) {
    if (!solution.has_incumbent())
        throw ExtractError(std::string("cannot extract schedule from status ") +
                           to_string(solution.status));
    const UcdIndex& ix = problem.index;
    const int T = ix.horizon.total();
    const auto& v = solution.values;

    DispatchSchedule sch;
    sch.start_hour = ix.horizon.start_hour;
    sch.hours = T;
    sch.network = ix.network;
    sch.committed.assign(T, 0);
    for (int t = 0; t < ix.horizon.commit_hours && t < T; ++t) sch.committed[t] = 1;
    sch.boundary = ix.boundary_resolved;

    auto pull = [&](const std::vector<std::vector<int>>& vars) {
        std::vector<std::vector<double>> out(vars.size(), std::vector<double>(T, 0.0));
        for (size_t i = 0; i < vars.size(); ++i)
            for (int t = 0; t < T; ++t) out[i][t] = v[vars[i][t]];
        return out;
    };

    sch.thermal_output = pull(ix.p);
    sch.thermal_commit = pull(ix.x);
    sch.thermal_start = pull(ix.xstart);
    sch.thermal_stop = pull(ix.xstop);
    sch.vre_dispatch = pull(ix.vre);
    sch.charge = pull(ix.pc);
    sch.discharge = pull(ix.pd);
    sch.soc = pull(ix.soc);
    sch.charge_mode = pull(ix.xc);
    sch.flow = pull(ix.flow);
    sch.angle = pull(ix.angle);
    sch.unserved = pull(ix.unserved);
    sch.reserve_shortfall = pull(ix.shortfall);
    sch.reserve_thermal.resize(ix.r_thermal.size());
    for (size_t r = 0; r < ix.r_thermal.size(); ++r) sch.reserve_thermal[r] = pull(ix.r_thermal[r]);
    sch.reserve_storage.resize(ix.r_storage.size());
    for (size_t r = 0; r < ix.r_storage.size(); ++r) sch.reserve_storage[r] = pull(ix.r_storage[r]);

    sch.vre_bound.assign(ix.vre.size(), std::vector<double>(T, 0.0));
    for (size_t u = 0; u < ix.vre.size(); ++u)
        for (int t = 0; t < T; ++t) sch.vre_bound[u][t] = ix.vre_bound_mw[u * T + t];

    ObjectiveComponents& c = sch.components;
    for (size_t i = 0; i < sys.thermal.size(); ++i) {
        const auto& g = sys.thermal[i];
        for (int t = 0; t < T; ++t) {
            c.fuel += g.fuel_cost * sch.thermal_output[i][t];
            c.start += g.start_cost * sch.thermal_start[i][t];
            c.stop += g.stop_cost * sch.thermal_stop[i][t];
        }
    }
    for (int t = 0; t < T; ++t) c.unserved_penalty += ix.voll * sch.unserved_total(t);
    for (const auto& series : sch.reserve_shortfall)
        for (double s : series) c.reserve_penalty += ix.reserve_shortfall_penalty * s;
    for (const auto& slack : ix.evt_slacks)
        if (slack.under_var >= 0)
            c.evt_penalty += slack.penalty * (v[slack.under_var] + v[slack.over_var]);
    for (const auto& [var, value] : ix.ev_terms) c.ev_rebate += value * v[var];
    return sch;
}

double ScheduleCheck::worst() const {
    return std::max({max_balance_residual, max_soc_residual, max_charge_discharge_overlap,
                     max_headroom_violation, max_commitment_residual, max_start_stop_overlap,
                     max_flow_angle_residual, max_bound_violation});
}

ScheduleCheck verify_schedule(const PowerSystem& sys, const DispatchSchedule& sch) {
    ScheduleCheck chk;
    const int T = sch.hours;
    const int NU = static_cast<int>(sys.thermal.size());
    const int NS = static_cast<int>(sys.storage.size());
    const int NV = static_cast<int>(sys.vre.size());
    const bool nodal = sch.network == NetworkMode::nodal;

    for (int t = 0; t < T; ++t) {
        const int h = sch.start_hour + t;

        if (!nodal) {
            double lhs = sch.unserved_total(t);
            for (int i = 0; i < NU; ++i) lhs += sch.thermal_output[i][t];
            for (int u = 0; u < NV; ++u) lhs += sch.vre_dispatch[u][t];
            for (int s = 0; s < NS; ++s) lhs += sch.discharge[s][t] - sch.charge[s][t];
            chk.max_balance_residual =
                std::max(chk.max_balance_residual, std::fabs(lhs - sys.total_load(h)));
        } else {
            for (size_t k = 0; k < sys.buses.size(); ++k) {
                const auto& bus = sys.buses[k];
                double lhs = sch.unserved[k][t];
                for (int i = 0; i < NU; ++i)
                    if (sys.thermal[i].bus == bus.id) lhs += sch.thermal_output[i][t];
                for (int u = 0; u < NV; ++u)
                    if (sys.vre[u].bus == bus.id) lhs += sch.vre_dispatch[u][t];
                for (int s = 0; s < NS; ++s)
                    if (sys.storage[s].bus == bus.id)
                        lhs += sch.discharge[s][t] - sch.charge[s][t];
                for (size_t l = 0; l < sys.lines.size(); ++l) {
                    if (sys.lines[l].to_bus == bus.id) lhs += sch.flow[l][t];
                    if (sys.lines[l].from_bus == bus.id) lhs -= sch.flow[l][t];
                }
                chk.max_balance_residual =
                    std::max(chk.max_balance_residual, std::fabs(lhs - sys.bus_load(bus.id, h)));
            }
            for (size_t l = 0; l < sys.lines.size(); ++l) {
                const auto& line = sys.lines[l];
                int from = sys.bus_index(line.from_bus);
                int to = sys.bus_index(line.to_bus);
                double expect = sys.base_power * line.susceptance *
                                (sch.angle[from][t] - sch.angle[to][t]);
                chk.max_flow_angle_residual = std::max(
                    chk.max_flow_angle_residual, std::fabs(sch.flow[l][t] - expect));
                chk.max_bound_violation =
                    std::max({chk.max_bound_violation, line.flow_min - sch.flow[l][t],
                              sch.flow[l][t] - line.flow_max});
            }
        }

        for (int s = 0; s < NS; ++s) {
            const auto& d = sys.storage[s];
            double prev = t == 0 ? [&] {
                auto it = sch.boundary.storage_soc.find(d.id);
                return it != sch.boundary.storage_soc.end() ? it->second : d.initial_soc;
            }()
                                 : sch.soc[s][t - 1];
            double expect = (1.0 - d.self_discharge) * prev + d.eff_charge * sch.charge[s][t] -
                            sch.discharge[s][t] / d.eff_discharge;
            chk.max_soc_residual =
                std::max(chk.max_soc_residual, std::fabs(sch.soc[s][t] - expect));
            chk.max_charge_discharge_overlap =
                std::max(chk.max_charge_discharge_overlap,
                         sch.charge[s][t] * sch.discharge[s][t] /
                             (d.charge_max * d.discharge_max));
            double reserves = 0.0;
            for (const auto& r : sch.reserve_storage) reserves += r[s][t];
            chk.max_headroom_violation =
                std::max(chk.max_headroom_violation, sch.discharge[s][t] + reserves -
                                                         sch.charge[s][t] - d.discharge_max);
            chk.max_bound_violation =
                std::max({chk.max_bound_violation, d.soc_min - sch.soc[s][t],
                          sch.soc[s][t] - d.soc_max, -sch.charge[s][t], -sch.discharge[s][t],
                          sch.charge[s][t] - d.charge_max, sch.discharge[s][t] - d.discharge_max});
        }

        for (int i = 0; i < NU; ++i) {
            const auto& g = sys.thermal[i];
            double prev_x = t == 0 ? [&] {
                auto it = sch.boundary.thermal_online.find(g.id);
                bool on = it != sch.boundary.thermal_online.end() ? it->second : g.initial_online;
                return on ? 1.0 : 0.0;
            }()
                                   : sch.thermal_commit[i][t - 1];
            double resid = sch.thermal_commit[i][t] - prev_x - sch.thermal_start[i][t] +
                           sch.thermal_stop[i][t];
            chk.max_commitment_residual = std::max(chk.max_commitment_residual, std::fabs(resid));
            chk.max_start_stop_overlap = std::max(
                chk.max_start_stop_overlap, sch.thermal_start[i][t] * sch.thermal_stop[i][t]);

            double reserves = 0.0;
            for (const auto& r : sch.reserve_thermal) reserves += r[i][t];
            double pr = sch.thermal_output[i][t] + reserves;
            chk.max_bound_violation =
                std::max({chk.max_bound_violation, pr - g.p_max * sch.thermal_commit[i][t],
                          g.p_min * sch.thermal_commit[i][t] - pr, -sch.thermal_output[i][t]});
        }

        for (int u = 0; u < NV; ++u)
            chk.max_bound_violation =
                std::max({chk.max_bound_violation, -sch.vre_dispatch[u][t],
                          sch.vre_dispatch[u][t] - sch.vre_bound[u][t]});
    }
    return chk;
}

} // namespace pcsim
