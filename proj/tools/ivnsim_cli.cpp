// Command-line front end: experiment sweeps, config validation, and
// solver-vs-oracle spot checks.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ivnsim/ivnsim.hpp"

namespace {

using namespace ivnsim;

int cmd_run(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
            bool seed_set, const std::vector<std::string>& schemes,
            const std::vector<std::string>& topologies, const std::string& tasks,
            const std::string& timing, int threads) {
    std::vector<ConfigDiagnostic> diags;
    ExperimentConfig cfg = parse_config_file(config_path, diags);

    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.base_seed = seed;
    if (!schemes.empty()) {
        cfg.schemes.clear();
        for (const std::string& s : schemes) {
            auto k = detail::parse_scheme(s);
            if (!k) {
                std::fprintf(stderr, "config error: unknown scheme '%s'\n", s.c_str());
                return 1;
            }
            cfg.schemes.push_back(*k);
        }
    }
    if (!topologies.empty()) {
        cfg.topologies.clear();
        for (const std::string& t : topologies) {
            auto k = detail::parse_topology(t);
            if (!k) {
                std::fprintf(stderr, "config error: unknown topology '%s'\n", t.c_str());
                return 1;
            }
            cfg.topologies.push_back(*k);
        }
    }
    if (!tasks.empty()) {
        cfg.task_counts.clear();
        for (const std::string& item : detail::split_list(tasks)) {
            try {
                cfg.task_counts.push_back(std::stoi(item));
            } catch (...) {
                std::fprintf(stderr, "config error: bad task count '%s'\n", item.c_str());
                return 1;
            }
        }
    }
    if (timing == "zero") cfg.wall_time_real = false;

    // Re-validate after overrides.
    for (const std::string& e : cfg.validate()) diags.push_back({0, e});
    if (!diags.empty()) {
        for (const ConfigDiagnostic& d : diags) {
            if (d.line > 0) {
                std::fprintf(stderr, "config error: line %d: %s\n", d.line, d.message.c_str());
            } else {
                std::fprintf(stderr, "config error: %s\n", d.message.c_str());
            }
        }
        return 1;
    }

    try {
        std::vector<RunReport> reports = run_experiment(cfg, true, threads);
        std::printf("ran %zu cells; reports written to %s\n", reports.size(),
                    cfg.out_dir.c_str());
        return 0;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_validate(const std::string& config_path) {
    std::vector<ConfigDiagnostic> diags;
    parse_config_file(config_path, diags);
    if (diags.empty()) {
        std::printf("OK\n");
        return 0;
    }
    for (const ConfigDiagnostic& d : diags) {
        if (d.line > 0) {
            std::fprintf(stderr, "config error: line %d: %s\n", d.line, d.message.c_str());
        } else {
            std::fprintf(stderr, "config error: %s\n", d.message.c_str());
        }
    }
    return 1;
}

// Random small instances solved by both the GA and exhaustive enumeration
// under one frozen channel realization per instance.
int cmd_oracle_check(int max_tasks, int instances, std::uint64_t seed, std::uint64_t budget,
                     double min_match) {
    ExperimentConfig cfg;
    const SchedulerKind schemes[] = {SchedulerKind::Deterministic, SchedulerKind::Minimum,
                                     SchedulerKind::Shortest};
    const TopologyKind topologies[] = {TopologyKind::Tree, TopologyKind::BasicMesh,
                                       TopologyKind::CrossZoneMesh, TopologyKind::CentralizedMesh};
    const MediumMode media[] = {MediumMode::Wired, MediumMode::Hybrid};

    int matched[3] = {0, 0, 0};
    int beat[3] = {0, 0, 0};
    for (int inst = 0; inst < instances; ++inst) {
        std::uint64_t inst_seed = derive_key(seed, 0x0c1eu, static_cast<std::uint64_t>(inst));
        TopologyKind tk = topologies[inst % 4];
        MediumMode mm = media[(inst / 4) % 2];
        Topology topo = build_topology(tk, {2, 2, 2, 2}, mm,
                                       cfg.topology_params(derive_key(inst_seed, 0x2e1u)));

        // Shrink the batch until the instance fits the enumeration budget.
        CounterRng size_rng(derive_key(inst_seed, 0x517eu));
        int n = 1 + static_cast<int>(size_rng.uniform_index(max_tasks));
        std::vector<Task> tasks;
        DecodeSpace space;
        while (true) {
            tasks = generate_tasks(cfg.workload_config(n, derive_key(inst_seed, 0x70a5u)), topo);
            space = DecodeSpace::build(topo, tasks, cfg.max_hops);
            if (space.decodable_schedules(budget) <= budget || n == 1) break;
            --n;
        }

        ChannelConfig channel = cfg.channel_config();
        FadingProcess fading =
            FadingProcess::rayleigh(cfg.mean_sinr_db, derive_key(inst_seed, 0xfadu));
        DeliveryRng delivery{derive_key(inst_seed, 0xde1u)};

        for (int s = 0; s < 3; ++s) {
            EvalContext ctx(topo, channel, fading, delivery, SimOptions{cfg.discipline});
            GaParams ga = cfg.ga;
            ga.seed = derive_key(inst_seed, 0x9au, static_cast<std::uint64_t>(s));
            GaResult g = solve(space, tasks, ctx, schemes[s], ga);
            OracleResult o = brute_force_solve(space, tasks, ctx, schemes[s],
                                               OracleBudget{budget});
            double diff = g.best_fitness - o.best_fitness;
            if (diff < -1e-9) ++beat[s];
            if (std::abs(diff) <= 1e-9) ++matched[s];
        }
    }

    bool ok = true;
    for (int s = 0; s < 3; ++s) {
        double rate = static_cast<double>(matched[s]) / instances;
        bool pass = rate >= min_match && beat[s] == 0;
        ok = ok && pass;
        std::printf("%-13s matched %3d/%d (%.1f%%), beat oracle %d time(s): %s\n",
                    to_string(schemes[s]), matched[s], instances, 100.0 * rate, beat[s],
                    pass ? "ok" : "FAIL");
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zonal in-vehicle network task-scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, tasks, timing = "real";
    std::uint64_t seed = 0;
    std::vector<std::string> schemes, topologies;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment sweep");
    run->add_option("--config", config_path, "config file (key=value lines)")->required();
    run->add_option("--out", out_dir, "output directory (overrides experiment.out_dir)");
    auto* seed_opt = run->add_option("--seed", seed, "base seed (overrides experiment.base_seed)");
    run->add_option("--scheme", schemes, "restrict to scheme(s)");
    run->add_option("--topology", topologies, "restrict to topology(ies)");
    run->add_option("--tasks", tasks, "comma-separated task counts");
    run->add_option("--timing", timing, "wall_time_ms column: real|zero")
        ->check(CLI::IsMember({"real", "zero"}));
    run->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::string vconfig;
    CLI::App* validate = app.add_subcommand("validate-config", "check a config file");
    validate->add_option("--config", vconfig, "config file")->required();

    int max_tasks = 5, instances = 100;
    std::uint64_t ocheck_seed = 1, budget = 200;
    double min_match = 0.95;
    CLI::App* ocheck = app.add_subcommand("oracle-check",
                                          "compare the GA against exhaustive enumeration");
    ocheck->add_option("--max-tasks", max_tasks, "largest instance size")->check(CLI::Range(1, 16));
    ocheck->add_option("--instances", instances, "number of random instances");
    ocheck->add_option("--seed", ocheck_seed, "instance stream seed");
    ocheck->add_option("--budget", budget, "max decodable schedules per instance");
    ocheck->add_option("--min-match", min_match, "required optimum-match rate");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return cmd_run(config_path, out_dir, seed, seed_opt->count() > 0, schemes, topologies,
                       tasks, timing, threads);
    }
    if (validate->parsed()) return cmd_validate(vconfig);
    if (ocheck->parsed()) return cmd_oracle_check(max_tasks, instances, ocheck_seed, budget,
                                                  min_match);
    return 1;
}
