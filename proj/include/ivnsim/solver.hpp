// Genetic-algorithm scheduler.
//
// A chromosome holds two genes per task: a candidate-unit index and a path
// index. Decoding is total: any gene vector inside its declared ranges maps
// to a structurally valid schedule (constraint violations are possible,
// structural invalidity is not). Wireless bookings are not encoded; they
// follow from the evaluator's greedy full-band policy, which keeps the
// chromosome at two genes per task.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ivnsim/rng.hpp"
#include "ivnsim/scheduling.hpp"

namespace ivnsim {

// Ranking weight of one constraint violation; large enough that any
// feasible schedule outranks any infeasible one for every objective.
inline constexpr double kInfeasiblePenalty = 1e6;

struct Gene {
    std::uint32_t unit = 0;
    std::uint32_t path = 0;

    friend constexpr auto operator<=>(const Gene&, const Gene&) = default;
};

using Chromosome = std::vector<Gene>;

// Candidate units and paths per task, shared read-only by a whole solver
// run (and by the brute-force oracle, so both search the same space).
class DecodeSpace {
public:
    struct TaskOptions {
        std::vector<NodeId> units;                     // candidate units, fixed order
        std::vector<const std::vector<Path>*> paths;   // per candidate unit
        std::uint32_t max_paths = 0;                   // path-gene range
        std::uint64_t option_count = 0;                // sum of per-unit path counts
    };

    static DecodeSpace build(const Topology& topo, const std::vector<Task>& tasks, int max_hops) {
        DecodeSpace space;
        space.tasks_.reserve(tasks.size());
        for (const Task& t : tasks) {
            TaskOptions opt;
            for (const NodeId& unit : topo.computing_units()) {
                auto key = std::make_pair(t.origin, unit);
                auto it = space.path_cache_.find(key);
                if (it == space.path_cache_.end()) {
                    it = space.path_cache_
                             .emplace(key, enumerate_paths(topo, t.origin, unit, max_hops))
                             .first;
                }
                if (it->second.empty()) continue;  // unreachable unit
                opt.units.push_back(unit);
                opt.paths.push_back(&it->second);
                opt.max_paths = std::max(opt.max_paths,
                                         static_cast<std::uint32_t>(it->second.size()));
                opt.option_count += it->second.size();
            }
            if (opt.units.empty()) {
                throw std::runtime_error("task origin cannot reach any computing unit");
            }
            space.tasks_.push_back(std::move(opt));
        }
        return space;
    }

    std::size_t task_count() const { return tasks_.size(); }
    const TaskOptions& options(std::size_t task) const { return tasks_.at(task); }

    // Number of distinct decodable schedules, saturating at `cap`.
    std::uint64_t decodable_schedules(std::uint64_t cap) const {
        std::uint64_t total = 1;
        for (const TaskOptions& o : tasks_) {
            if (o.option_count == 0) return 0;
            if (total > cap / o.option_count) return cap + 1;
            total *= o.option_count;
        }
        return total;
    }

    Schedule decode(const Chromosome& chrom, const std::vector<Task>& tasks) const {
        if (chrom.size() != tasks_.size()) throw std::invalid_argument("chromosome length mismatch");
        Schedule s;
        s.assignments.reserve(chrom.size());
        for (std::size_t i = 0; i < chrom.size(); ++i) {
            const TaskOptions& opt = tasks_[i];
            std::size_t ui = chrom[i].unit % opt.units.size();
            const std::vector<Path>& paths = *opt.paths[ui];
            const Path& fwd = paths[chrom[i].path % paths.size()];
            Assignment a;
            a.task_id = tasks[i].id;
            a.unit = opt.units[ui];
            a.forward = fwd;
            a.backward = fwd.reversed();
            s.assignments.push_back(std::move(a));
        }
        return s;
    }

    Chromosome random_chromosome(CounterRng& rng) const {
        Chromosome c(tasks_.size());
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            c[i].unit = static_cast<std::uint32_t>(rng.uniform_index(tasks_[i].units.size()));
            c[i].path = static_cast<std::uint32_t>(
                rng.uniform_index(std::max<std::uint32_t>(1, tasks_[i].max_paths)));
        }
        return c;
    }

private:
    std::vector<TaskOptions> tasks_;
    std::map<std::pair<NodeId, NodeId>, std::vector<Path>> path_cache_;
};

struct GaParams {
    int population = 1000;
    double elite_fraction = 0.20;
    double crossover_fraction = 0.80;
    int generations = 10;
    double mutation_rate = 0.20;  // per gene
    std::uint64_t seed = 1;

    void validate() const {
        if (population < 1) throw std::invalid_argument("population must be >= 1");
        if (generations < 0) throw std::invalid_argument("generations must be >= 0");
        if (elite_fraction < 0 || elite_fraction > 1 || crossover_fraction < 0 ||
            crossover_fraction > 1 || mutation_rate < 0 || mutation_rate > 1) {
            throw std::invalid_argument("fractions must lie in [0, 1]");
        }
        if (std::abs(elite_fraction + crossover_fraction - 1.0) > 1e-9) {
            throw std::invalid_argument("elite and crossover fractions must sum to 1");
        }
    }
};

struct FitnessBreakdown {
    double value = 0.0;      // objective + penalty
    double objective = 0.0;  // scheme objective alone
    int violations = 0;
};

// Scheme objective plus the infeasibility penalty. Lower is better.
inline FitnessBreakdown fitness(const Chromosome& chrom, SchedulerKind scheme,
                                const DecodeSpace& space, const std::vector<Task>& tasks,
                                EvalContext& ctx) {
    if (scheme == SchedulerKind::Baseline) {
        throw std::invalid_argument("baseline bypasses the solver");
    }
    Schedule s = space.decode(chrom, tasks);
    EvaluatedSchedule ev = evaluate_schedule(s, tasks, ctx);
    FitnessBreakdown fb;
    fb.violations = static_cast<int>(check_constraints(s, ev, ctx.topo()).size());
    switch (scheme) {
        case SchedulerKind::Deterministic: fb.objective = objective_deterministic(ev, tasks); break;
        case SchedulerKind::Minimum: fb.objective = objective_minimum(ev); break;
        case SchedulerKind::Shortest: fb.objective = objective_shortest(s); break;
        case SchedulerKind::Baseline: break;  // unreachable
    }
    fb.value = fb.objective + kInfeasiblePenalty * fb.violations;
    return fb;
}

// Uniform crossover: each gene from either parent with probability 1/2.
inline Chromosome crossover(const Chromosome& a, const Chromosome& b, CounterRng& rng) {
    if (a.size() != b.size()) throw std::invalid_argument("parents must have equal length");
    Chromosome child(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        child[i].unit = rng.bernoulli(0.5) ? a[i].unit : b[i].unit;
        child[i].path = rng.bernoulli(0.5) ? a[i].path : b[i].path;
    }
    return child;
}

// Per-gene mutation: with the given probability a gene is re-sampled
// uniformly from its range.
inline Chromosome mutate(Chromosome chrom, double rate, const DecodeSpace& space,
                         CounterRng& rng) {
    if (rate < 0 || rate > 1) throw std::invalid_argument("mutation rate must lie in [0, 1]");
    for (std::size_t i = 0; i < chrom.size(); ++i) {
        const DecodeSpace::TaskOptions& opt = space.options(i);
        if (rng.bernoulli(rate)) {
            chrom[i].unit = static_cast<std::uint32_t>(rng.uniform_index(opt.units.size()));
        }
        if (rng.bernoulli(rate)) {
            chrom[i].path = static_cast<std::uint32_t>(
                rng.uniform_index(std::max<std::uint32_t>(1, opt.max_paths)));
        }
    }
    return chrom;
}

struct GaResult {
    Schedule schedule;
    Chromosome chromosome;
    double best_fitness = 0.0;
    double objective = 0.0;
    int violations = 0;
    bool feasible = false;
    std::vector<double> trace;  // best fitness after init and after each generation
};

// Generational loop: evaluate, keep the elite, refill by crossover of
// uniformly chosen elite parents, mutate. Deterministic in (space, tasks,
// scheme, params, context seeds).
inline GaResult solve(const DecodeSpace& space, const std::vector<Task>& tasks,
                      EvalContext& ctx, SchedulerKind scheme, const GaParams& params) {
    params.validate();
    if (scheme == SchedulerKind::Baseline) {
        throw std::invalid_argument("baseline bypasses the solver");
    }
    if (space.task_count() != tasks.size()) {
        throw std::invalid_argument("decode space/task mismatch");
    }

    struct Member {
        Chromosome chrom;
        FitnessBreakdown fit;
    };
    auto better = [](const Member& a, const Member& b) {
        if (a.fit.value != b.fit.value) return a.fit.value < b.fit.value;
        return a.chrom < b.chrom;  // deterministic tie-break: lower encoding
    };

    const int pop_size = params.population;
    std::vector<Member> pop(pop_size);
    for (int i = 0; i < pop_size; ++i) {
        CounterRng rng(derive_key(params.seed, 0u, static_cast<std::uint64_t>(i)));
        pop[i].chrom = space.random_chromosome(rng);
        pop[i].fit = fitness(pop[i].chrom, scheme, space, tasks, ctx);
    }
    std::sort(pop.begin(), pop.end(), better);

    GaResult result;
    result.trace.push_back(pop.front().fit.value);

    int elite_count = std::clamp(static_cast<int>(std::llround(params.elite_fraction * pop_size)),
                                 1, pop_size);
    for (int gen = 1; gen <= params.generations; ++gen) {
        std::vector<Member> next(pop.begin(), pop.begin() + elite_count);
        next.reserve(pop_size);
        for (int i = elite_count; i < pop_size; ++i) {
            CounterRng rng(derive_key(params.seed, static_cast<std::uint64_t>(gen),
                                      static_cast<std::uint64_t>(i)));
            const Chromosome& pa = pop[rng.uniform_index(elite_count)].chrom;
            const Chromosome& pb = pop[rng.uniform_index(elite_count)].chrom;
            Member child;
            child.chrom = mutate(crossover(pa, pb, rng), params.mutation_rate, space, rng);
            child.fit = fitness(child.chrom, scheme, space, tasks, ctx);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        std::sort(pop.begin(), pop.end(), better);
        result.trace.push_back(pop.front().fit.value);
    }

    const Member& best = pop.front();
    result.chromosome = best.chrom;
    result.schedule = space.decode(best.chrom, tasks);
    result.best_fitness = best.fit.value;
    result.objective = best.fit.objective;
    result.violations = best.fit.violations;
    result.feasible = best.fit.violations == 0;
    return result;
}

}  // namespace ivnsim
