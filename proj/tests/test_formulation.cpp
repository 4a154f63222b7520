#include <cmath>

#include "doctest.h"
#include "pcsim/formulation.hpp"
#include "test_fixtures.hpp"

using namespace pcsim;
using namespace pcsim::testing;

TEST_CASE("flat load follows the unit, no starts") {
    ThermalGenerator g = basic_gen(10, 100, 20.0);
    g.initial_output = 50.0;
    PowerSystem sys = single_bus(2, 50.0, g);
    auto prob = build_ucd(sys, {0, 2, 0}, BoundaryState::initial(sys), {});
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(2000.0).epsilon(1e-9));
    DispatchSchedule sch = extract_schedule(sys, s, prob);
    CHECK(sch.thermal_output[0][0] == doctest::Approx(50.0));
    CHECK(sch.thermal_output[0][1] == doctest::Approx(50.0));
    CHECK(verify_schedule(sys, sch).worst() <= 1e-6);
}

TEST_CASE("load below p_min forces the unit off with unserved energy") {
    ThermalGenerator g = basic_gen(10, 100, 20.0);
    g.initial_output = 10.0;
    PowerSystem sys = single_bus(2, 5.0, g);
    FormulationOptions opt;
    opt.voll = 1000.0;
    auto prob = build_ucd(sys, {0, 2, 0}, BoundaryState::initial(sys), opt);
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);

    Solution oracle = commitment_lattice_oracle(prob.lp);
    REQUIRE(oracle.status == SolveStatus::optimal);
    CHECK(s.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
    CHECK(s.objective == doctest::Approx(10000.0).epsilon(1e-9)); // 5 MW x 2 h x 1000

    DispatchSchedule sch = extract_schedule(sys, s, prob);
    CHECK(sch.thermal_commit[0][0] == doctest::Approx(0.0));
    CHECK(sch.thermal_commit[0][1] == doctest::Approx(0.0));
    CHECK(sch.unserved_total(0) == doctest::Approx(5.0));
    CHECK(sch.unserved_total(1) == doctest::Approx(5.0));
}

TEST_CASE("nodal two-bus window respects the line limit") {
    PowerSystem sys;
    sys.horizon_hours = 1;
    sys.buses = {{"B1", -0.5, 0.5, true}, {"B2", -0.5, 0.5, false}};
    sys.lines = {{"L1", "B1", "B2", 10.0, -10.0, 10.0}};
    ThermalGenerator g = basic_gen(0, 50, 10.0);
    g.initial_online = true;
    g.initial_output = 0.0;
    sys.thermal = {g};
    sys.loads["B2"] = Series(1, 15.0);

    FormulationOptions opt;
    opt.network = NetworkMode::nodal;
    opt.voll = 1000.0;
    auto prob = build_ucd(sys, {0, 1, 0}, BoundaryState::initial(sys), opt);
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);

    DispatchSchedule sch = extract_schedule(sys, s, prob);
    CHECK(sch.unserved[1][0] == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(sch.flow[0][0] == doctest::Approx(10.0).epsilon(1e-6));
    double expect = sys.base_power * 10.0 * (sch.angle[0][0] - sch.angle[1][0]);
    CHECK(sch.flow[0][0] == doctest::Approx(expect).epsilon(1e-6));
    CHECK(verify_schedule(sys, sch).worst() <= 1e-6);
}

TEST_CASE("energy value attaches rebate terms to end-of-day SOC") {
    ThermalGenerator g = basic_gen(5, 100, 20.0);
    PowerSystem sys = single_bus(48, 50.0, g);
    sys.storage = {basic_storage("ES1", 10, 40, 0.8, DurationClass::short_duration),
                   basic_storage("ES2", 20, 200, 0.65, DurationClass::long_duration)};

    auto prob = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), {});
    attach_energy_value(prob, 0.1, {24, 48});
    CHECK(prob.index.ev_terms.size() == 4); // 2 hours x NS=2 devices
    for (const auto& [var, value] : prob.index.ev_terms) {
        CHECK(value == doctest::Approx(0.1));
        CHECK(prob.lp.objective[var] == doctest::Approx(-0.1));
    }

    SUBCASE("coefficient follows the configured value") {
        auto prob2 = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), {});
        attach_energy_value(prob2, 0.25, {48});
        for (const auto& [var, value] : prob2.index.ev_terms)
            CHECK(prob2.lp.objective[var] == doctest::Approx(-0.25));
    }
    SUBCASE("zero value leaves the solution unchanged") {
        auto plain = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), {});
        auto zero = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), {});
        attach_energy_value(zero, 0.0, {24, 48});
        Solution a = solve_milp(plain.lp);
        Solution b = solve_milp(zero.lp);
        REQUIRE(a.status == SolveStatus::optimal);
        REQUIRE(b.status == SolveStatus::optimal);
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
    }
    SUBCASE("out-of-window offset rejected") {
        auto prob3 = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), {});
        CHECK_THROWS_AS(attach_energy_value(prob3, 0.1, {49}), BuildError);
    }
}

TEST_CASE("hard EVT pins the SOC at the offset hour") {
    ThermalGenerator g = basic_gen(5, 150, 20.0);
    PowerSystem sys = single_bus(48, 50.0, g);
    StorageDevice dev = basic_storage("LD", 20, 200, 0.65, DurationClass::long_duration);
    sys.storage = {dev};

    EvtSpec evt;
    evt.targets = {{"LD", 0.5 * dev.soc_max}};
    evt.hour_offset = 48;
    evt.mode = EvtMode::hard;
    FormulationOptions opt;
    opt.evt = evt;
    auto prob = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), opt);
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);
    DispatchSchedule sch = extract_schedule(sys, s, prob);
    CHECK(sch.soc[0][47] == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("soft EVT reports unreachable targets through the under slack") {
    ThermalGenerator g = basic_gen(5, 150, 20.0);
    PowerSystem sys = single_bus(6, 50.0, g);
    StorageDevice dev = basic_storage("LD", 2, 500, 0.65, DurationClass::long_duration);
    dev.initial_soc = 0.0;
    sys.storage = {dev};

    EvtSpec evt;
    evt.targets = {{"LD", 400.0}}; // charge_max * 6h * eff < 400
    evt.hour_offset = 6;
    evt.mode = EvtMode::soft;
    evt.penalty = 500.0;
    FormulationOptions opt;
    opt.evt = evt;
    auto prob = build_ucd(sys, {0, 6, 0}, BoundaryState::initial(sys), opt);
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);
    DispatchSchedule sch = extract_schedule(sys, s, prob);
    double reachable = 2.0 * 6.0 * dev.eff_charge;
    CHECK(sch.components.evt_penalty >= 500.0 * (400.0 - reachable) - 1e-6);
    CHECK(sch.soc[0][5] <= reachable + 1e-6);

    SUBCASE("achievable target leaves slacks at zero") {
        EvtSpec easy = evt;
        easy.targets = {{"LD", 0.0}};
        FormulationOptions opt2;
        opt2.evt = easy;
        auto prob2 = build_ucd(sys, {0, 6, 0}, BoundaryState::initial(sys), opt2);
        Solution s2 = solve_milp(prob2.lp);
        REQUIRE(s2.status == SolveStatus::optimal);
        DispatchSchedule sch2 = extract_schedule(sys, s2, prob2);
        CHECK(sch2.components.evt_penalty == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("target outside device bounds rejected") {
        EvtSpec bad = evt;
        bad.targets = {{"LD", 600.0}};
        FormulationOptions opt3;
        opt3.evt = bad;
        CHECK_THROWS_AS(build_ucd(sys, {0, 6, 0}, BoundaryState::initial(sys), opt3), BuildError);
    }
    SUBCASE("penalty ordering enforced") {
        EvtSpec bad = evt;
        bad.penalty = 10.0; // below max fuel cost
        FormulationOptions opt4;
        opt4.evt = bad;
        CHECK_THROWS_AS(build_ucd(sys, {0, 6, 0}, BoundaryState::initial(sys), opt4), BuildError);
    }
}

TEST_CASE("extract flags the committed prefix and components add up") {
    ThermalGenerator g = basic_gen(5, 120, 22.0);
    PowerSystem sys = single_bus(48, 60.0, g);
    sys.storage = {basic_storage("ES", 15, 60, 0.8, DurationClass::short_duration)};
    sys.vre = {{"S1", "B1", VreKind::solar, 40.0, Series(48, 0.5), {}}};

    FormulationOptions opt;
    opt.energy_value = EnergyValueSpec{0.25, {24, 48}};
    auto prob = build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), opt);
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);
    DispatchSchedule sch = extract_schedule(sys, s, prob);

    CHECK(sch.committed_hours() == 24);
    CHECK(sch.hours == 48);
    CHECK(verify_schedule(sys, sch).max_balance_residual <= 1e-6);
    CHECK(sch.components.solver_objective() == doctest::Approx(s.objective).epsilon(1e-6));
    CHECK(sch.components.ev_rebate > 0.0);

    SUBCASE("extract on infeasible status raises") {
        Solution bad;
        bad.status = SolveStatus::infeasible;
        CHECK_THROWS_AS(extract_schedule(sys, bad, prob), ExtractError);
    }
}

TEST_CASE("relaxed problem bounds the integral objective") {
    ThermalGenerator g = basic_gen(20, 90, 25.0);
    g.initial_online = false;
    g.initial_output = 0.0;
    PowerSystem sys = single_bus(8, 0.0, g);
    Series load = {10, 35, 60, 80, 75, 50, 30, 15};
    sys.loads["B1"] = load;
    sys.storage = {basic_storage("ES", 10, 40, 0.8, DurationClass::short_duration)};
    FormulationOptions opt;
    opt.voll = 2000.0;

    auto integral = build_ucd(sys, {0, 8, 0}, BoundaryState::initial(sys), opt);
    FormulationOptions relaxed_opt = opt;
    relaxed_opt.relax_binaries = true;
    auto relaxed = build_ucd(sys, {0, 8, 0}, BoundaryState::initial(sys), relaxed_opt);

    Solution si = solve_milp(integral.lp);
    Solution sr = solve_lp(relaxed.lp);
    REQUIRE(si.status == SolveStatus::optimal);
    REQUIRE(sr.status == SolveStatus::optimal);
    CHECK(sr.objective <= si.objective + 1e-6);
}

TEST_CASE("uncongested nodal run matches copper plate") {
    PowerSystem sys;
    sys.horizon_hours = 6;
    sys.buses = {{"B1", -0.5, 0.5, true}, {"B2", -0.5, 0.5, false}, {"B3", -0.5, 0.5, false}};
    sys.lines = {{"L12", "B1", "B2", 10.0, -500.0, 500.0},
                 {"L23", "B2", "B3", 10.0, -500.0, 500.0},
                 {"L13", "B1", "B3", 10.0, -500.0, 500.0}};
    ThermalGenerator g1 = basic_gen(10, 80, 18.0);
    ThermalGenerator g2 = basic_gen(5, 60, 35.0);
    g2.id = "G2";
    g2.bus = "B3";
    g2.initial_online = false;
    g2.initial_output = 0.0;
    sys.thermal = {g1, g2};
    sys.thermal[0].bus = "B1";
    sys.loads["B2"] = {40, 55, 70, 90, 65, 45};
    sys.storage = {basic_storage("ES", 10, 40, 0.8, DurationClass::short_duration)};
    sys.storage[0].bus = "B2";

    FormulationOptions copper;
    FormulationOptions nodal;
    nodal.network = NetworkMode::nodal;
    auto pc = build_ucd(sys, {0, 6, 0}, BoundaryState::initial(sys), copper);
    auto pn = build_ucd(sys, {0, 6, 0}, BoundaryState::initial(sys), nodal);
    Solution sc = solve_milp(pc.lp);
    Solution sn = solve_milp(pn.lp);
    REQUIRE(sc.status == SolveStatus::optimal);
    REQUIRE(sn.status == SolveStatus::optimal);
    CHECK(sn.objective == doctest::Approx(sc.objective).epsilon(1e-5));
}

TEST_CASE("storage exclusivity and headroom hold on a reserve-heavy window") {
    ThermalGenerator g = basic_gen(10, 120, 20.0);
    PowerSystem sys = single_bus(12, 70.0, g);
    sys.vre = {{"S1", "B1", VreKind::solar, 80.0,
                Series{0, 0, 0.2, 0.6, 0.9, 1.0, 0.9, 0.6, 0.2, 0, 0, 0}, {}}};
    sys.storage = {basic_storage("ES", 15, 60, 0.8, DurationClass::short_duration),
                   basic_storage("LD", 20, 200, 0.65, DurationClass::long_duration)};
    sys.reserves = {{"REG", ReserveKind::regulation_up, ReserveRule{0.05, 0.0, 0.0}},
                    {"SPIN", ReserveKind::spin_up, ReserveRule{0.05, 0.10, 0.04}}};

    auto prob = build_ucd(sys, {0, 12, 0}, BoundaryState::initial(sys), {});
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);
    DispatchSchedule sch = extract_schedule(sys, s, prob);
    ScheduleCheck chk = verify_schedule(sys, sch);
    CHECK(chk.max_charge_discharge_overlap <= 1e-6);
    CHECK(chk.max_headroom_violation <= 1e-6);
    CHECK(chk.max_balance_residual <= 1e-6);
    CHECK(chk.max_soc_residual <= 1e-6);
    CHECK(chk.max_commitment_residual <= 1e-6);
}

TEST_CASE("cyclic SOC links the first hour to the last") {
    ThermalGenerator g = basic_gen(5, 120, 20.0);
    PowerSystem sys = single_bus(24, 60.0, g);
    sys.vre = {{"S1", "B1", VreKind::solar, 90.0, Series(24, 0.0), {}}};
    for (int h = 8; h < 16; ++h) sys.vre[0].availability[h] = 0.9;
    sys.storage = {basic_storage("ES", 15, 60, 0.8, DurationClass::short_duration)};

    FormulationOptions opt;
    opt.cyclic_soc = true;
    auto prob = build_ucd(sys, {0, 24, 0}, BoundaryState::initial(sys), opt);
    Solution s = solve_milp(prob.lp);
    REQUIRE(s.status == SolveStatus::optimal);
    DispatchSchedule sch = extract_schedule(sys, s, prob);
    const auto& dev = sys.storage[0];
    double expect = (1.0 - dev.self_discharge) * sch.soc[0][23] +
                    dev.eff_charge * sch.charge[0][0] - sch.discharge[0][0] / dev.eff_discharge;
    CHECK(sch.soc[0][0] == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("window exceeding the horizon is rejected") {
    ThermalGenerator g = basic_gen(5, 100, 20.0);
    PowerSystem sys = single_bus(24, 50.0, g);
    CHECK_THROWS_AS(build_ucd(sys, {0, 24, 24}, BoundaryState::initial(sys), {}), BuildError);
}
