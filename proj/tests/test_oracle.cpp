#include <catch2/catch_amalgamated.hpp>

#include "ivnsim/oracle.hpp"
#include "ivnsim/workload.hpp"

using namespace ivnsim;

namespace {

Topology topo_of(TopologyKind kind, MediumMode medium = MediumMode::Wired) {
    TopologyParams p;
    if (medium == MediumMode::Hybrid) p.reliability_sampler = make_reliability_sampler(5);
    return build_topology(kind, {2, 2, 2, 2}, medium, p);
}

EvalContext make_context(const Topology& topo, const ChannelConfig& channel) {
    return EvalContext(topo, channel, FadingProcess::rayleigh(30.0, 3), DeliveryRng{4});
}

const ChannelConfig kChannel = ChannelConfig::make_default();

std::vector<Task> batch(const Topology& topo, int n, std::uint64_t seed) {
    WorkloadConfig wc;
    wc.n_tasks = n;
    wc.seed = seed;
    return generate_tasks(wc, topo);
}

}  // namespace

TEST_CASE("single sensor task on the tree: the static mapping is distance-optimal") {
    Topology topo = topo_of(TopologyKind::Tree);
    std::vector<Task> tasks{[&] {
        Task t;
        t.id = 0;
        t.origin = NodeId::sensor(2, 1);
        t.compute_cycles = 10e6;
        t.size_bits = 1e6;
        t.result_bits = 0.15e6;
        t.deadline_s = 0.1;
        return t;
    }()};
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    EvalContext ctx = make_context(topo, kChannel);
    OracleResult res = brute_force_solve(space, tasks, ctx, SchedulerKind::Shortest);
    Schedule base = baseline_schedule(tasks, topo);
    CHECK(res.schedule.assignments[0].unit == base.assignments[0].unit);
    CHECK(res.objective == objective_shortest(base));
    CHECK(res.feasible);
}

TEST_CASE("oracle optimum lower-bounds hand-built schedules") {
    Topology topo = topo_of(TopologyKind::CentralizedMesh);
    std::vector<Task> tasks = batch(topo, 3, 5);
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    EvalContext ctx = make_context(topo, kChannel);
    OracleResult res = brute_force_solve(space, tasks, ctx, SchedulerKind::Minimum,
                                         OracleBudget{2000000});

    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        CounterRng rng(seed);
        Chromosome c = space.random_chromosome(rng);
        FitnessBreakdown fb = fitness(c, SchedulerKind::Minimum, space, tasks, ctx);
        CHECK(fb.value >= res.best_fitness);
    }
    Schedule base = baseline_schedule(tasks, topo);
    auto ev = evaluate_schedule(base, tasks, ctx);
    CHECK(objective_minimum(ev) >= res.objective);
}

TEST_CASE("empty task list yields an empty optimal schedule") {
    Topology topo = topo_of(TopologyKind::Tree);
    std::vector<Task> tasks;
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    EvalContext ctx = make_context(topo, kChannel);
    OracleResult res = brute_force_solve(space, tasks, ctx, SchedulerKind::Minimum);
    CHECK(res.schedule.assignments.empty());
    CHECK(res.objective == 0.0);
    CHECK(res.feasible);
}

TEST_CASE("optimal objective is invariant to task order") {
    Topology topo = topo_of(TopologyKind::BasicMesh);
    std::vector<Task> tasks = batch(topo, 2, 9);
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    EvalContext ctx = make_context(topo, kChannel);
    OracleResult forward = brute_force_solve(space, tasks, ctx, SchedulerKind::Minimum);

    std::vector<Task> swapped{tasks[1], tasks[0]};
    swapped[0].id = 0;
    swapped[1].id = 1;
    DecodeSpace space2 = DecodeSpace::build(topo, swapped, 4);
    OracleResult reversed = brute_force_solve(space2, swapped, ctx, SchedulerKind::Minimum);
    CHECK(forward.objective == Catch::Approx(reversed.objective).margin(1e-12));
}

TEST_CASE("budget overruns are rejected") {
    Topology topo = topo_of(TopologyKind::CentralizedMesh);
    std::vector<Task> tasks = batch(topo, 6, 2);
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    EvalContext ctx = make_context(topo, kChannel);
    CHECK_THROWS_AS(brute_force_solve(space, tasks, ctx, SchedulerKind::Minimum,
                                      OracleBudget{100}),
                    std::runtime_error);
}

TEST_CASE("infeasible instances are reported with the flag down") {
    Topology topo = topo_of(TopologyKind::Tree);
    // Five tasks of 120 Mcycles each cannot all fit: the four ECUs hold one
    // each (100-Mcycle window) and the HPCU only three (400 Mcycles).
    std::vector<Task> tasks;
    for (int i = 0; i < 5; ++i) {
        Task t;
        t.id = i;
        t.origin = NodeId::zone_ecu(1 + (i % 4));
        t.compute_cycles = 120e6;
        t.size_bits = 1e6;
        t.result_bits = 0.15e6;
        t.deadline_s = 0.1;
        tasks.push_back(t);
    }
    DecodeSpace space = DecodeSpace::build(topo, tasks, 4);
    EvalContext ctx = make_context(topo, kChannel);
    OracleResult res = brute_force_solve(space, tasks, ctx, SchedulerKind::Minimum,
                                         OracleBudget{2000000});
    CHECK_FALSE(res.feasible);
    CHECK(res.best_fitness >= kInfeasiblePenalty);
}
