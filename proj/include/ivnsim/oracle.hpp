// Exhaustive scheduler for small instances: enumerates every (unit, path)
// combination in the same decode space the solver searches, under the same
// booking policy and channel realization, and returns the true optimum.
// Used to validate solver results; far too slow for experiment scale.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ivnsim/scheduling.hpp"
#include "ivnsim/solver.hpp"

namespace ivnsim {

struct OracleBudget {
    std::uint64_t max_enumerable = 200000;
};

struct OracleResult {
    Schedule schedule;
    Chromosome chromosome;
    double best_fitness = 0.0;
    double objective = 0.0;
    bool feasible = false;
};

inline OracleResult brute_force_solve(const DecodeSpace& space, const std::vector<Task>& tasks,
                                      EvalContext& ctx, SchedulerKind scheme,
                                      const OracleBudget& budget = {}) {
    if (scheme == SchedulerKind::Baseline) {
        throw std::invalid_argument("baseline bypasses the solver");
    }
    if (space.task_count() != tasks.size()) {
        throw std::invalid_argument("decode space/task mismatch");
    }
    std::uint64_t count = space.decodable_schedules(budget.max_enumerable);
    if (count > budget.max_enumerable) {
        throw std::runtime_error("instance exceeds the oracle enumeration budget");
    }

    OracleResult best;
    if (tasks.empty()) {
        best.feasible = true;
        return best;
    }

    // Flattened per-task option lists in (unit index, path index) order so
    // that enumeration proceeds in ascending encoding order; keeping only
    // strict improvements then lands on the lowest encoding among ties.
    std::vector<std::vector<Gene>> options(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const DecodeSpace::TaskOptions& opt = space.options(t);
        for (std::uint32_t u = 0; u < opt.units.size(); ++u) {
            for (std::uint32_t p = 0; p < opt.paths[u]->size(); ++p) {
                options[t].push_back(Gene{u, p});
            }
        }
    }

    std::vector<std::size_t> idx(tasks.size(), 0);
    Chromosome chrom(tasks.size());
    bool have_best = false;
    while (true) {
        for (std::size_t t = 0; t < tasks.size(); ++t) chrom[t] = options[t][idx[t]];
        FitnessBreakdown fb = fitness(chrom, scheme, space, tasks, ctx);
        if (!have_best || fb.value < best.best_fitness) {
            have_best = true;
            best.best_fitness = fb.value;
            best.objective = fb.objective;
            best.feasible = fb.violations == 0;
            best.chromosome = chrom;
        }
        // Mixed-radix increment, last task fastest.
        std::size_t t = tasks.size();
        while (t > 0) {
            --t;
            if (++idx[t] < options[t].size()) break;
            idx[t] = 0;
            if (t == 0) {
                best.schedule = space.decode(best.chromosome, tasks);
                return best;
            }
        }
    }
}

}  // namespace ivnsim
