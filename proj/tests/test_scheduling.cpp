#include <catch2/catch_amalgamated.hpp>

#include "ivnsim/oracle.hpp"
#include "ivnsim/scheduling.hpp"
#include "ivnsim/solver.hpp"
#include "ivnsim/workload.hpp"

using namespace ivnsim;

namespace {

Topology tree_topology(MediumMode medium = MediumMode::Wired, std::uint64_t seed = 5) {
    TopologyParams p;
    if (medium == MediumMode::Hybrid) p.reliability_sampler = make_reliability_sampler(seed);
    return build_topology(TopologyKind::Tree, {3, 3, 3, 3}, medium, p);
}

Task make_task(int id, NodeId origin, double cycles, double size_bits, double deadline_s,
               double gen = 0.0) {
    Task t;
    t.id = id;
    t.origin = origin;
    t.compute_cycles = cycles;
    t.size_bits = size_bits;
    t.result_bits = 0.15 * size_bits;
    t.deadline_s = deadline_s;
    t.gen_time_s = gen;
    return t;
}

Assignment assign(const Topology& topo, const Task& t, NodeId unit, int max_hops = 4,
                  std::size_t path_index = 0) {
    auto paths = enumerate_paths(topo, t.origin, unit, max_hops);
    REQUIRE(!paths.empty());
    Assignment a;
    a.task_id = t.id;
    a.unit = unit;
    a.forward = paths.at(path_index);
    a.backward = a.forward.reversed();
    return a;
}

EvalContext make_context(const Topology& topo, const ChannelConfig& channel,
                         SimOptions opt = {}) {
    return EvalContext(topo, channel, FadingProcess::constant(1000.0), DeliveryRng{3}, opt);
}

const ChannelConfig kChannel = ChannelConfig::make_default();

}  // namespace

TEST_CASE("processing time is demand over speed") {
    Task t = make_task(0, NodeId::hpcu(), 10e6, 1e6, 0.1);
    ComputeSpec ecu{NodeId::zone_ecu(1), 1e9, 0.1, 1e8};
    ComputeSpec hpcu{NodeId::hpcu(), 4e9, 0.1, 4e8};
    CHECK(processing_time(t, ecu) == Catch::Approx(10e-3));
    CHECK(processing_time(t, hpcu) == Catch::Approx(2.5e-3));
    t.compute_cycles = 0.0;
    CHECK(processing_time(t, ecu) == 0.0);
}

TEST_CASE("deadline penalty") {
    CHECK(penalty_beta(1.2, 0.5) == 1.0);
    CHECK(penalty_beta(0.5, 1.0) == 0.0);
    CHECK(penalty_beta(0.5, 0.855) == Catch::Approx(0.145));
    CHECK(penalty_beta(1.0, 0.9) == Catch::Approx(0.1));  // on time at the boundary

    CounterRng rng(4);
    double prev = 1.0;
    for (int i = 0; i <= 20; ++i) {
        double rel = i / 20.0;
        double beta = penalty_beta(0.7, rel);
        CHECK(beta >= 0.0);
        CHECK(beta <= 1.0);
        CHECK(beta <= prev);  // non-increasing in reliability
        prev = beta;
        // Scale invariance of the deadline ratio.
        double t = rng.uniform(1e-3, 1.0), tmax = rng.uniform(1e-3, 1.0);
        double k = rng.uniform(0.1, 10.0);
        CHECK(penalty_beta(t / tmax, rel) == penalty_beta((k * t) / (k * tmax), rel));
    }
}

TEST_CASE("local HPCU task takes exactly its processing time") {
    Topology topo = tree_topology();
    std::vector<Task> tasks{make_task(0, NodeId::hpcu(), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::hpcu())};
    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);
    CHECK(ev.tasks[0].total == Catch::Approx(2.5e-3));
    CHECK(ev.tasks[0].t_comm_forward == 0.0);
    CHECK(ev.tasks[0].t_comm_return == 0.0);
    CHECK(ev.tasks[0].satisfied);
}

TEST_CASE("one wired hop to the zone ECU") {
    Topology topo = tree_topology();
    std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1))};
    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);
    // 1 ms out + 10 ms processing + 0.15 ms back.
    CHECK(ev.tasks[0].t_comm_forward == Catch::Approx(1e-3));
    CHECK(ev.tasks[0].t_unit == Catch::Approx(10e-3));
    CHECK(ev.tasks[0].t_comm_return == Catch::Approx(0.15e-3));
    CHECK(ev.tasks[0].total == Catch::Approx(11.15e-3));
    CHECK(ev.tasks[0].selected_reliability == 1.0);
}

TEST_CASE("two wired hops to the HPCU, store and forward") {
    Topology topo = tree_topology();
    std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::hpcu())};
    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);
    // 2 x 1 ms out + 2.5 ms processing + 2 x 0.15 ms back.
    CHECK(ev.tasks[0].t_comm_forward == Catch::Approx(2e-3));
    CHECK(ev.tasks[0].t_unit == Catch::Approx(2.5e-3));
    CHECK(ev.tasks[0].t_comm_return == Catch::Approx(0.3e-3));
    CHECK(ev.tasks[0].total == Catch::Approx(4.8e-3));
}

TEST_CASE("a shared wired link serializes transmissions") {
    Topology topo = tree_topology();
    // Two tasks from the same sensor, so the forward hops share one link.
    std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1),
                            make_task(1, NodeId::sensor(1, 1), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1)),
                     assign(topo, tasks[1], NodeId::zone_ecu(1))};
    EvalContext ctx = make_context(topo, kChannel, SimOptions{UnitQueueDiscipline::None});
    auto ev = evaluate_schedule(s, tasks, ctx);
    CHECK(ev.tasks[0].t_comm_forward == Catch::Approx(1e-3));
    CHECK(ev.tasks[1].t_comm_forward == Catch::Approx(2e-3));  // waits for the first
    // The constraint checker finds no overlap on the serialized link.
    auto violations = check_constraints(s, ev, topo);
    CHECK(violations.empty());
}

TEST_CASE("unit queue disciplines order contending tasks") {
    Topology topo = tree_topology();
    // Task 0 has the later deadline but the lower id; both arrive together.
    std::vector<Task> tasks{make_task(0, NodeId::zone_ecu(1), 10e6, 1e6, 0.100),
                            make_task(1, NodeId::zone_ecu(1), 10e6, 1e6, 0.040)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1)),
                     assign(topo, tasks[1], NodeId::zone_ecu(1))};

    SECTION("edf serves the tighter deadline first") {
        EvalContext ctx = make_context(topo, kChannel, SimOptions{UnitQueueDiscipline::Edf});
        auto ev = evaluate_schedule(s, tasks, ctx);
        CHECK(ev.tasks[1].unit_wait == 0.0);
        CHECK(ev.tasks[0].unit_wait == Catch::Approx(10e-3));
        CHECK(ev.tasks[0].t_unit == Catch::Approx(20e-3));
    }
    SECTION("fifo serves by arrival, ties by id") {
        EvalContext ctx = make_context(topo, kChannel, SimOptions{UnitQueueDiscipline::Fifo});
        auto ev = evaluate_schedule(s, tasks, ctx);
        CHECK(ev.tasks[0].unit_wait == 0.0);
        CHECK(ev.tasks[1].unit_wait == Catch::Approx(10e-3));
    }
    SECTION("no contention model runs tasks in parallel") {
        EvalContext ctx = make_context(topo, kChannel, SimOptions{UnitQueueDiscipline::None});
        auto ev = evaluate_schedule(s, tasks, ctx);
        CHECK(ev.tasks[0].unit_wait == 0.0);
        CHECK(ev.tasks[1].unit_wait == 0.0);
    }
}

TEST_CASE("total always equals the sum of its three parts") {
    Topology topo = build_topology(TopologyKind::CentralizedMesh, {2, 2, 2, 2},
                                   MediumMode::Hybrid,
                                   [] {
                                       TopologyParams p;
                                       p.reliability_sampler = make_reliability_sampler(9);
                                       return p;
                                   }());
    WorkloadConfig wc;
    wc.n_tasks = 12;
    wc.seed = 31;
    auto tasks = generate_tasks(wc, topo);
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    ChannelConfig channel = ChannelConfig::make_default();
    EvalContext ctx(topo, channel, FadingProcess::rayleigh(30.0, 41), DeliveryRng{43},
                    SimOptions{UnitQueueDiscipline::Edf});
    CounterRng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        Chromosome c = space.random_chromosome(rng);
        Schedule s = space.decode(c, tasks);
        auto ev = evaluate_schedule(s, tasks, ctx);
        for (const EvaluatedTask& et : ev.tasks) {
            CHECK(et.total == et.t_comm_forward + et.t_unit + et.t_comm_return);
            CHECK(et.t_unit == Catch::Approx(et.unit_wait + et.exec).margin(1e-15));
        }
        // Bookings and wired occupancies never overlap by construction.
        auto violations = check_constraints(s, ev, topo);
        for (const auto& v : violations) {
            CHECK(v.kind == ConstraintKind::ComputeCapacity);  // only capacity can trip
        }
    }
}

TEST_CASE("wireless round trip under constant fading matches slot arithmetic") {
    TopologyParams p;
    p.reliability_sampler = [](LinkClass, NodeId, NodeId) { return 1.0; };
    Topology topo = build_topology(TopologyKind::Tree, {3, 3, 3, 3}, MediumMode::Hybrid, p);
    std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1))};
    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);
    // Forward: 11 slots (1 Mbit at 197.35 Mb/s); return: 2 slots (0.15 Mbit).
    CHECK(ev.tasks[0].t_comm_forward == Catch::Approx(5.5e-3));
    CHECK(ev.tasks[0].t_unit == Catch::Approx(10e-3));
    CHECK(ev.tasks[0].t_comm_return == Catch::Approx(1e-3));
    REQUIRE(ev.bookings.size() == 2);
    CHECK(ev.bookings[0].slot_count == 11);
    CHECK(ev.bookings[1].slot_count == 2);
    // Return starts at the first slot boundary after processing completes.
    CHECK(ev.bookings[1].start_slot == 31);
}

TEST_CASE("objectives") {
    Topology topo = tree_topology();
    std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1),
                            make_task(1, NodeId::sensor(2, 1), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::hpcu()),
                     assign(topo, tasks[1], NodeId::hpcu())};
    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);

    SECTION("deterministic objective is zero when on time over wired paths") {
        CHECK(objective_deterministic(ev, tasks) == 0.0);
    }
    SECTION("deterministic objective counts late tasks") {
        std::vector<Task> tight = tasks;
        tight[0].deadline_s = 1e-6;
        tight[1].deadline_s = 1e-6;
        auto late = evaluate_schedule(s, tight, ctx);
        CHECK(objective_deterministic(late, tight) == 2.0);
        tight[1].deadline_s = 0.1;
        auto mixed = evaluate_schedule(s, tight, ctx);
        CHECK(objective_deterministic(mixed, tight) == 1.0);
    }
    SECTION("shortest objective sums forward distances") {
        CHECK(objective_shortest(s) == 4.0);  // two 2-hop forwards
        Schedule locals;
        Task hp = make_task(0, NodeId::hpcu(), 1e6, 1e6, 0.1);
        locals.assignments = {assign(topo, hp, NodeId::hpcu())};
        CHECK(objective_shortest(locals) == 0.0);
        Schedule one;
        one.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1))};
        CHECK(objective_shortest(one) == 1.0);
    }
    SECTION("minimum objective sums total times") {
        CHECK(objective_minimum(ev) ==
              Catch::Approx(ev.tasks[0].total + ev.tasks[1].total));
        EvaluatedSchedule empty;
        CHECK(objective_minimum(empty) == 0.0);
    }
}

TEST_CASE("static mapping sends sensor tasks to the zone ECU and keeps units local") {
    Topology topo = tree_topology();
    std::vector<Task> tasks{make_task(0, NodeId::sensor(2, 3), 10e6, 1e6, 0.1),
                            make_task(1, NodeId::hpcu(), 10e6, 1e6, 0.1),
                            make_task(2, NodeId::zone_ecu(1), 10e6, 1e6, 0.1)};
    Schedule s = baseline_schedule(tasks, topo);
    CHECK(s.assignments[0].unit == NodeId::zone_ecu(2));
    CHECK(s.assignments[0].forward.hops() == 1);
    CHECK(s.assignments[1].unit == NodeId::hpcu());
    CHECK(s.assignments[1].forward.empty());
    CHECK(s.assignments[2].unit == NodeId::zone_ecu(1));
    CHECK(s.assignments[2].forward.empty());

    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);
    auto violations = check_constraints(s, ev, topo);
    CHECK(violations.empty());
}

TEST_CASE("constraint checker flags each violation kind") {
    Topology topo = tree_topology();

    SECTION("duplicate assignment") {
        std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1)};
        Schedule s;
        s.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1)),
                         assign(topo, tasks[0], NodeId::hpcu())};
        EvaluatedSchedule ev;
        ev.used_cycles.assign(5, 0.0);
        auto violations = check_constraints(s, ev, topo);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == ConstraintKind::SingleUnit);
    }

    SECTION("double-booked band cell") {
        Schedule s;
        EvaluatedSchedule ev;
        ev.used_cycles.assign(5, 0.0);
        ev.bookings.push_back(ResourceBooking{0, 0, BandId::zone_band(1), 0, 55, 10, 5, 0});
        ev.bookings.push_back(ResourceBooking{1, 4, BandId::zone_band(1), 0, 55, 12, 5, 0});
        auto violations = check_constraints(s, ev, topo);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == ConstraintKind::ResourceExclusive);

        // Disjoint resource ranges on the same band and slots are fine.
        ev.bookings[1].first_resource = 55;
        CHECK(check_constraints(s, ev, topo).empty());
    }

    SECTION("overlapping wired occupancy") {
        Schedule s;
        EvaluatedSchedule ev;
        ev.used_cycles.assign(5, 0.0);
        ev.wired_uses.push_back(WiredUse{0, 3, 0.0, 1e-3});
        ev.wired_uses.push_back(WiredUse{1, 3, 0.5e-3, 1.5e-3});
        auto violations = check_constraints(s, ev, topo);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == ConstraintKind::WiredLinkCapacity);
    }

    SECTION("unit over processing capacity") {
        // Eleven 10-Mcycle tasks against a 100-Mcycle window on one ECU.
        std::vector<Task> tasks;
        for (int i = 0; i < 11; ++i) {
            tasks.push_back(make_task(i, NodeId::sensor(1, 1 + (i % 3)), 10e6, 1e6, 0.1));
        }
        Schedule s;
        for (const Task& t : tasks) s.assignments.push_back(assign(topo, t, NodeId::zone_ecu(1)));
        EvalContext ctx = make_context(topo, kChannel);
        auto ev = evaluate_schedule(s, tasks, ctx);
        auto violations = check_constraints(s, ev, topo);
        REQUIRE(violations.size() == 1);
        CHECK(violations[0].kind == ConstraintKind::ComputeCapacity);

        // One task fewer fits exactly.
        tasks.pop_back();
        s.assignments.pop_back();
        auto ev_ok = evaluate_schedule(s, tasks, ctx);
        CHECK(check_constraints(s, ev_ok, topo).empty());
    }
}

TEST_CASE("reliability product spans forward and return links without double counting") {
    TopologyParams p;
    p.reliability_sampler = make_reliability_sampler(13);
    Topology topo = build_topology(TopologyKind::CentralizedMesh, {2, 2, 2, 2},
                                   MediumMode::Hybrid, p);
    std::vector<Task> tasks{make_task(0, NodeId::sensor(1, 1), 10e6, 1e6, 0.1)};
    Schedule s;
    s.assignments = {assign(topo, tasks[0], NodeId::zone_ecu(1))};
    EvalContext ctx = make_context(topo, kChannel);
    auto ev = evaluate_schedule(s, tasks, ctx);
    // Forward and return use the same single link; it counts once.
    double rho = s.assignments[0].forward.links[0].reliability;
    CHECK(ev.tasks[0].selected_reliability == Catch::Approx(rho));
    CHECK(rho < 1.0);
}
