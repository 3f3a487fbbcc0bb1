// Experiment runner: sweeps (topology, medium, scheme, load, replication)
// cells, computes per-run metrics and writes the CSV reports. Also hosts
// the flat key=value config format used by the CLI.
//
// Determinism contract: a run is a pure function of (config, base_seed).
// Cells execute on a small thread pool, but every random stream is keyed by
// cell coordinates, and rows are emitted in a fixed order, so the CSV bytes
// do not depend on scheduling (wall_time_ms excepted; see report.wall_time).

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ivnsim/oracle.hpp"
#include "ivnsim/scheduling.hpp"
#include "ivnsim/solver.hpp"
#include "ivnsim/workload.hpp"

namespace ivnsim {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline double satisfaction_ratio(const EvaluatedSchedule& ev) {
    if (ev.tasks.empty()) throw std::invalid_argument("empty evaluation");
    std::size_t ok = 0;
    for (const EvaluatedTask& t : ev.tasks) ok += t.satisfied ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(ev.tasks.size());
}

// Assigned cycles on `unit` divided by its capacity over the window. Can
// exceed 1 for schedules that ignore the capacity constraint.
inline double usage_ratio(const EvaluatedSchedule& ev, const Topology& topo, NodeId unit) {
    for (std::size_t u = 0; u < topo.compute_specs.size(); ++u) {
        if (topo.compute_specs[u].unit == unit) {
            return ev.used_cycles.at(u) / topo.compute_specs[u].max_capacity_cycles;
        }
    }
    throw std::invalid_argument("not a computing unit: " + unit.to_string());
}

struct LatencyStats {
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

// Statistics over all completion times, late tasks included. Percentiles
// use the nearest-rank definition.
inline LatencyStats latency_stats(const EvaluatedSchedule& ev) {
    if (ev.tasks.empty()) throw std::invalid_argument("empty evaluation");
    std::vector<double> totals;
    totals.reserve(ev.tasks.size());
    double sum = 0.0;
    for (const EvaluatedTask& t : ev.tasks) {
        totals.push_back(t.total);
        sum += t.total;
    }
    std::sort(totals.begin(), totals.end());
    auto rank = [&](double q) {
        std::size_t r = static_cast<std::size_t>(
            std::ceil(q * static_cast<double>(totals.size())));
        return totals[std::clamp<std::size_t>(r, 1, totals.size()) - 1];
    };
    return LatencyStats{sum / static_cast<double>(totals.size()), rank(0.50), rank(0.95),
                        totals.back()};
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::vector<TopologyKind> topologies = {TopologyKind::Tree, TopologyKind::BasicMesh,
                                            TopologyKind::CrossZoneMesh,
                                            TopologyKind::CentralizedMesh};
    std::vector<MediumMode> media = {MediumMode::Wired};
    std::vector<SchedulerKind> schemes = {SchedulerKind::Deterministic, SchedulerKind::Minimum,
                                          SchedulerKind::Shortest, SchedulerKind::Baseline};
    std::vector<int> task_counts = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60};
    int replications = 20;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";

    std::vector<int> sensors_per_zone = {9, 9, 9, 9};
    int max_hops = 4;
    double link_distance = 1.0;
    double wired_rate_bps = 1e9;
    double ecu_speed_hz = 1e9;
    double hpcu_speed_hz = 4e9;
    double capacity_window_s = 0.100;
    UnitQueueDiscipline discipline = UnitQueueDiscipline::Edf;

    double mean_sinr_db = 30.0;
    double ber = 1e-5;
    double band_bandwidth_hz = 20e6;
    double subcarrier_hz = 30e3;
    int subcarriers_per_resource = 12;
    double slot_duration_s = 0.5e-3;
    std::int64_t max_slots = 4000;

    double sensor_fraction = 0.70;
    double ecu_fraction = 0.15;
    double hpcu_fraction = 0.15;
    double demand_cycles_lo = 5e6;
    double demand_cycles_hi = 15e6;
    double size_bits_lo = 0.5e6;
    double size_bits_hi = 1.5e6;
    double result_fraction = 0.15;
    double deadline_s_lo = 40e-3;
    double deadline_s_hi = 100e-3;
    double stagger_horizon_s = 0.0;

    GaParams ga;  // seed is derived per cell
    std::uint64_t oracle_max_enumerable = 200000;
    bool wall_time_real = true;

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (topologies.empty()) errs.push_back("experiment.topologies is empty");
        if (media.empty()) errs.push_back("experiment.media is empty");
        if (schemes.empty()) errs.push_back("experiment.schemes is empty");
        if (task_counts.empty()) errs.push_back("experiment.task_counts is empty");
        for (std::size_t i = 0; i + 1 < task_counts.size(); ++i) {
            if (task_counts[i] >= task_counts[i + 1]) {
                errs.push_back("experiment.task_counts must be positive ascending");
                break;
            }
        }
        if (!task_counts.empty() && task_counts.front() <= 0) {
            errs.push_back("experiment.task_counts must be positive");
        }
        if (replications < 1) errs.push_back("experiment.replications must be >= 1");
        if (sensors_per_zone.size() != static_cast<std::size_t>(kZoneCount)) {
            errs.push_back("topology.sensors_per_zone needs one entry per zone");
        }
        for (int c : sensors_per_zone) {
            if (c <= 0) {
                errs.push_back("topology.sensors_per_zone entries must be positive");
                break;
            }
        }
        if (max_hops < 1) errs.push_back("topology.max_hops must be >= 1");
        if (wired_rate_bps <= 0) errs.push_back("topology.wired_rate_gbps must be positive");
        if (ecu_speed_hz <= 0 || hpcu_speed_hz <= 0) {
            errs.push_back("unit speeds must be positive");
        }
        if (capacity_window_s <= 0) errs.push_back("scheduling.capacity_window_ms must be positive");
        if (ber < 0 || ber >= 1) errs.push_back("channel.ber must lie in [0, 1)");
        if (band_bandwidth_hz <= 0 || subcarrier_hz <= 0 || subcarriers_per_resource < 1) {
            errs.push_back("channel band layout values must be positive");
        }
        if (slot_duration_s <= 0) errs.push_back("channel.slot_ms must be positive");
        if (static_cast<double>(max_slots) * slot_duration_s <= deadline_s_hi) {
            errs.push_back("channel.max_slots horizon must exceed the largest deadline");
        }
        double mix = sensor_fraction + ecu_fraction + hpcu_fraction;
        if (std::abs(mix - 1.0) > 1e-9) errs.push_back("workload.origin_mix must sum to 1");
        if (demand_cycles_lo <= 0 || demand_cycles_hi < demand_cycles_lo) {
            errs.push_back("workload.demand_mcycles range is invalid");
        }
        if (size_bits_lo <= 0 || size_bits_hi < size_bits_lo) {
            errs.push_back("workload.size_mbits range is invalid");
        }
        if (result_fraction < 0) errs.push_back("workload.result_fraction must be >= 0");
        if (deadline_s_lo <= 0 || deadline_s_hi < deadline_s_lo) {
            errs.push_back("workload.deadline_ms range is invalid");
        }
        if (stagger_horizon_s < 0) errs.push_back("workload.stagger_ms must be >= 0");
        try {
            ga.validate();
        } catch (const std::exception& e) {
            errs.push_back(std::string("ga: ") + e.what());
        }
        return errs;
    }

    ChannelConfig channel_config() const {
        ChannelConfig c;
        c.ber = ber;
        c.mean_sinr_db = mean_sinr_db;
        c.slot_duration_s = slot_duration_s;
        c.max_slots = max_slots;
        double res_bw = subcarrier_hz * subcarriers_per_resource;
        c.band_plans.resize(kBandCount);
        for (int z = 1; z <= kZoneCount; ++z) {
            c.band_plans[BandId::zone_band(z).array_index()] =
                BandPlan::make(BandId::zone_band(z), band_bandwidth_hz, res_bw, slot_duration_s);
        }
        c.band_plans[BandId::hpcu_band().array_index()] =
            BandPlan::make(BandId::hpcu_band(), band_bandwidth_hz, res_bw, slot_duration_s);
        return c;
    }

    TopologyParams topology_params(std::uint64_t reliability_seed) const {
        TopologyParams p;
        p.wired_rate_bps = wired_rate_bps;
        p.link_distance = link_distance;
        p.ecu_speed_hz = ecu_speed_hz;
        p.hpcu_speed_hz = hpcu_speed_hz;
        p.capacity_window_s = capacity_window_s;
        p.reliability_sampler = make_reliability_sampler(reliability_seed);
        return p;
    }

    WorkloadConfig workload_config(int n_tasks, std::uint64_t seed) const {
        WorkloadConfig w;
        w.n_tasks = n_tasks;
        w.sensor_fraction = sensor_fraction;
        w.ecu_fraction = ecu_fraction;
        w.hpcu_fraction = hpcu_fraction;
        w.demand_cycles_lo = demand_cycles_lo;
        w.demand_cycles_hi = demand_cycles_hi;
        w.size_bits_lo = size_bits_lo;
        w.size_bits_hi = size_bits_hi;
        w.result_fraction = result_fraction;
        w.deadline_s_lo = deadline_s_lo;
        w.deadline_s_hi = deadline_s_hi;
        w.stagger_horizon_s = stagger_horizon_s;
        w.seed = seed;
        return w;
    }
};

// ---------------------------------------------------------------------------
// Flat key=value config parsing
// ---------------------------------------------------------------------------

struct ConfigDiagnostic {
    int line = 0;
    std::string message;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

// "lo..hi"
inline bool parse_range(const std::string& s, double& lo, double& hi) {
    std::size_t pos = s.find("..");
    if (pos == std::string::npos) return false;
    return parse_double(trim(s.substr(0, pos)), lo) && parse_double(trim(s.substr(pos + 2)), hi);
}

inline std::optional<TopologyKind> parse_topology(const std::string& s) {
    if (s == "tree") return TopologyKind::Tree;
    if (s == "basic_mesh") return TopologyKind::BasicMesh;
    if (s == "cross_zone_mesh") return TopologyKind::CrossZoneMesh;
    if (s == "centralized_mesh") return TopologyKind::CentralizedMesh;
    return std::nullopt;
}

inline std::optional<MediumMode> parse_medium(const std::string& s) {
    if (s == "wired") return MediumMode::Wired;
    if (s == "hybrid") return MediumMode::Hybrid;
    return std::nullopt;
}

inline std::optional<SchedulerKind> parse_scheme(const std::string& s) {
    if (s == "deterministic") return SchedulerKind::Deterministic;
    if (s == "minimum") return SchedulerKind::Minimum;
    if (s == "shortest") return SchedulerKind::Shortest;
    if (s == "baseline") return SchedulerKind::Baseline;
    return std::nullopt;
}

inline std::optional<UnitQueueDiscipline> parse_discipline(const std::string& s) {
    if (s == "edf") return UnitQueueDiscipline::Edf;
    if (s == "fifo") return UnitQueueDiscipline::Fifo;
    if (s == "none") return UnitQueueDiscipline::None;
    return std::nullopt;
}

}  // namespace detail

// Applies one key=value pair; returns an error message or empty on success.
inline std::string apply_config_key(ExperimentConfig& cfg, const std::string& key,
                                    const std::string& value) {
    using namespace detail;
    auto bad = [&](const std::string& what) { return "invalid value for " + key + ": " + what; };

    if (key == "experiment.topologies") {
        std::vector<TopologyKind> ts;
        for (const std::string& item : split_list(value)) {
            auto t = parse_topology(item);
            if (!t) return bad(item);
            ts.push_back(*t);
        }
        cfg.topologies = ts;
        return "";
    }
    if (key == "experiment.media") {
        std::vector<MediumMode> ms;
        for (const std::string& item : split_list(value)) {
            auto m = parse_medium(item);
            if (!m) return bad(item);
            ms.push_back(*m);
        }
        cfg.media = ms;
        return "";
    }
    if (key == "experiment.schemes") {
        std::vector<SchedulerKind> ss;
        for (const std::string& item : split_list(value)) {
            auto s = parse_scheme(item);
            if (!s) return bad(item);
            ss.push_back(*s);
        }
        cfg.schemes = ss;
        return "";
    }
    if (key == "experiment.task_counts") {
        std::vector<int> ns;
        for (const std::string& item : split_list(value)) {
            double d;
            if (!parse_double(item, d) || d != std::floor(d)) return bad(item);
            ns.push_back(static_cast<int>(d));
        }
        cfg.task_counts = ns;
        return "";
    }
    if (key == "experiment.replications") {
        double d;
        if (!parse_double(value, d) || d != std::floor(d) || d < 1) return bad(value);
        cfg.replications = static_cast<int>(d);
        return "";
    }
    if (key == "experiment.base_seed") {
        std::uint64_t u;
        if (!parse_u64(value, u)) return bad(value);
        cfg.base_seed = u;
        return "";
    }
    if (key == "experiment.out_dir") {
        cfg.out_dir = value;
        return "";
    }
    if (key == "topology.sensors_per_zone") {
        std::vector<int> counts;
        for (const std::string& item : split_list(value)) {
            double d;
            if (!parse_double(item, d) || d != std::floor(d)) return bad(item);
            counts.push_back(static_cast<int>(d));
        }
        cfg.sensors_per_zone = counts;
        return "";
    }

    struct DoubleKey {
        const char* name;
        double* field;
        double scale;
    };
    const DoubleKey double_keys[] = {
        {"topology.link_distance", &cfg.link_distance, 1.0},
        {"topology.wired_rate_gbps", &cfg.wired_rate_bps, 1e9},
        {"topology.ecu_speed_ghz", &cfg.ecu_speed_hz, 1e9},
        {"topology.hpcu_speed_ghz", &cfg.hpcu_speed_hz, 1e9},
        {"scheduling.capacity_window_ms", &cfg.capacity_window_s, 1e-3},
        {"channel.mean_sinr_db", &cfg.mean_sinr_db, 1.0},
        {"channel.ber", &cfg.ber, 1.0},
        {"channel.band_mhz", &cfg.band_bandwidth_hz, 1e6},
        {"channel.scs_khz", &cfg.subcarrier_hz, 1e3},
        {"channel.slot_ms", &cfg.slot_duration_s, 1e-3},
        {"workload.result_fraction", &cfg.result_fraction, 1.0},
        {"workload.stagger_ms", &cfg.stagger_horizon_s, 1e-3},
        {"ga.elite_fraction", &cfg.ga.elite_fraction, 1.0},
        {"ga.crossover_fraction", &cfg.ga.crossover_fraction, 1.0},
        {"ga.mutation_rate", &cfg.ga.mutation_rate, 1.0},
    };
    for (const DoubleKey& dk : double_keys) {
        if (key == dk.name) {
            double d;
            if (!detail::parse_double(value, d)) return bad(value);
            *dk.field = d * dk.scale;
            return "";
        }
    }

    struct IntKey {
        const char* name;
        int* field;
    };
    const IntKey int_keys[] = {
        {"topology.max_hops", &cfg.max_hops},
        {"channel.subcarriers_per_resource", &cfg.subcarriers_per_resource},
        {"ga.population", &cfg.ga.population},
        {"ga.generations", &cfg.ga.generations},
    };
    for (const IntKey& ik : int_keys) {
        if (key == ik.name) {
            double d;
            if (!detail::parse_double(value, d) || d != std::floor(d)) return bad(value);
            *ik.field = static_cast<int>(d);
            return "";
        }
    }

    if (key == "channel.max_slots") {
        double d;
        if (!detail::parse_double(value, d) || d != std::floor(d) || d < 1) return bad(value);
        cfg.max_slots = static_cast<std::int64_t>(d);
        return "";
    }
    if (key == "workload.origin_mix") {
        auto items = detail::split_list(value);
        double a, b, c;
        if (items.size() != 3 || !detail::parse_double(items[0], a) ||
            !detail::parse_double(items[1], b) || !detail::parse_double(items[2], c)) {
            return bad(value);
        }
        cfg.sensor_fraction = a;
        cfg.ecu_fraction = b;
        cfg.hpcu_fraction = c;
        return "";
    }
    if (key == "workload.demand_mcycles") {
        double lo, hi;
        if (!detail::parse_range(value, lo, hi)) return bad(value);
        cfg.demand_cycles_lo = lo * 1e6;
        cfg.demand_cycles_hi = hi * 1e6;
        return "";
    }
    if (key == "workload.size_mbits") {
        double lo, hi;
        if (!detail::parse_range(value, lo, hi)) return bad(value);
        cfg.size_bits_lo = lo * 1e6;
        cfg.size_bits_hi = hi * 1e6;
        return "";
    }
    if (key == "workload.deadline_ms") {
        double lo, hi;
        if (!detail::parse_range(value, lo, hi)) return bad(value);
        cfg.deadline_s_lo = lo * 1e-3;
        cfg.deadline_s_hi = hi * 1e-3;
        return "";
    }
    if (key == "scheduling.unit_queue") {
        auto d = detail::parse_discipline(value);
        if (!d) return bad(value);
        cfg.discipline = *d;
        return "";
    }
    if (key == "oracle.max_enumerable") {
        std::uint64_t u;
        if (!detail::parse_u64(value, u) || u < 1) return bad(value);
        cfg.oracle_max_enumerable = u;
        return "";
    }
    if (key == "report.wall_time") {
        if (value == "real") {
            cfg.wall_time_real = true;
        } else if (value == "zero") {
            cfg.wall_time_real = false;
        } else {
            return bad(value);
        }
        return "";
    }
    return "unknown key: " + key;
}

inline ExperimentConfig parse_config_text(const std::string& text,
                                          std::vector<ConfigDiagnostic>& diagnostics) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string stripped = line;
        std::size_t hash = stripped.find('#');
        if (hash != std::string::npos) stripped = stripped.substr(0, hash);
        stripped = detail::trim(stripped);
        if (stripped.empty()) continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            diagnostics.push_back({lineno, "expected key=value"});
            continue;
        }
        std::string key = detail::trim(stripped.substr(0, eq));
        std::string value = detail::trim(stripped.substr(eq + 1));
        std::string err = apply_config_key(cfg, key, value);
        if (!err.empty()) diagnostics.push_back({lineno, err});
    }
    for (const std::string& v : cfg.validate()) diagnostics.push_back({0, v});
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path,
                                          std::vector<ConfigDiagnostic>& diagnostics) {
    std::ifstream in(path);
    if (!in) {
        diagnostics.push_back({0, "cannot open config file: " + path});
        return ExperimentConfig{};
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), diagnostics);
}

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

struct RunReport {
    SchedulerKind scheme;
    TopologyKind topology;
    MediumMode medium;
    int n_tasks = 0;
    std::uint64_t seed = 0;
    double satisfaction = 0.0;
    double usage[kZoneCount + 1] = {0, 0, 0, 0, 0};  // ecu1..ecu4, hpcu
    LatencyStats latency;
    double objective = 0.0;
    bool feasible = false;
    double wall_ms = 0.0;
    std::vector<double> ga_trace;  // empty for the baseline scheme
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct CellCoord {
    TopologyKind topology;
    MediumMode medium;
    SchedulerKind scheme;
    int n_tasks;
    int replication;
};

struct PerTaskRow {
    int task_id;
    std::string origin;
    std::string unit;
    double t_comm_fwd_ms, t_unit_ms, t_comm_ret_ms, total_ms, deadline_ms;
    bool satisfied;
    double selected_reliability;
    double forward_distance;
};

struct CellOutput {
    RunReport report;
    std::vector<PerTaskRow> per_task;
};

}  // namespace detail

// Runs one sweep cell. Exposed for reuse by the acceptance suite.
inline detail::CellOutput run_cell(const ExperimentConfig& cfg, TopologyKind topology,
                                   MediumMode medium, SchedulerKind scheme, int n_tasks,
                                   int replication) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t rep_seed = cfg.base_seed + static_cast<std::uint64_t>(replication);

    Topology topo = build_topology(topology, cfg.sensors_per_zone, medium,
                                   cfg.topology_params(derive_key(rep_seed, 0x2e1u)));
    std::vector<Task> tasks = generate_tasks(
        cfg.workload_config(n_tasks, derive_key(rep_seed, 0x70a5u)), topo);

    ChannelConfig channel = cfg.channel_config();
    FadingProcess fading = FadingProcess::rayleigh(cfg.mean_sinr_db, derive_key(rep_seed, 0xfadu));
    DeliveryRng delivery{derive_key(rep_seed, 0xde1u)};
    EvalContext ctx(topo, channel, fading, delivery, SimOptions{cfg.discipline});

    Schedule schedule;
    bool feasible;
    double objective;
    std::vector<double> trace;
    if (scheme == SchedulerKind::Baseline) {
        schedule = baseline_schedule(tasks, topo);
    } else {
        DecodeSpace space = DecodeSpace::build(topo, tasks, cfg.max_hops);
        GaParams ga = cfg.ga;
        ga.seed = derive_key(rep_seed, 0x9au, static_cast<std::uint64_t>(topology),
                             static_cast<std::uint64_t>(medium), static_cast<std::uint64_t>(scheme),
                             static_cast<std::uint64_t>(n_tasks));
        GaResult res = solve(space, tasks, ctx, scheme, ga);
        schedule = std::move(res.schedule);
        trace = std::move(res.trace);
    }

    EvaluatedSchedule ev = evaluate_schedule(schedule, tasks, ctx);
    auto violations = check_constraints(schedule, ev, topo);
    if (scheme == SchedulerKind::Baseline) {
        // The static mapping is exempt from the processing-capacity
        // constraint; it has no scheduling freedom to honor it with.
        feasible = std::none_of(violations.begin(), violations.end(), [](const auto& v) {
            return v.kind != ConstraintKind::ComputeCapacity;
        });
        objective = objective_deterministic(ev, tasks);
    } else {
        feasible = violations.empty();
        switch (scheme) {
            case SchedulerKind::Deterministic: objective = objective_deterministic(ev, tasks); break;
            case SchedulerKind::Minimum: objective = objective_minimum(ev); break;
            default: objective = objective_shortest(schedule); break;
        }
    }

    detail::CellOutput out;
    RunReport& r = out.report;
    r.scheme = scheme;
    r.topology = topology;
    r.medium = medium;
    r.n_tasks = n_tasks;
    r.seed = rep_seed;
    r.satisfaction = satisfaction_ratio(ev);
    for (int z = 1; z <= kZoneCount; ++z) {
        r.usage[z - 1] = usage_ratio(ev, topo, NodeId::zone_ecu(z));
    }
    r.usage[kZoneCount] = usage_ratio(ev, topo, NodeId::hpcu());
    r.latency = latency_stats(ev);
    r.objective = objective;
    r.feasible = feasible;
    r.ga_trace = std::move(trace);

    out.per_task.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const EvaluatedTask& et = ev.tasks[i];
        out.per_task.push_back(detail::PerTaskRow{
            tasks[i].id, tasks[i].origin.to_string(), et.unit.to_string(),
            et.t_comm_forward * 1e3, et.t_unit * 1e3, et.t_comm_return * 1e3, et.total * 1e3,
            tasks[i].deadline_s * 1e3, et.satisfied, et.selected_reliability,
            et.forward_distance});
    }

    auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = cfg.wall_time_real
                    ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                    : 0.0;
    return out;
}

// Runs the full sweep. Writes summary.csv, per_task.csv, convergence.csv and
// aggregate.csv into cfg.out_dir (unless write_files is false) and returns
// the per-cell reports in sweep order.
inline std::vector<RunReport> run_experiment(const ExperimentConfig& cfg, bool write_files = true,
                                             int threads = 0) {
    std::vector<std::string> errs = cfg.validate();
    if (!errs.empty()) throw std::invalid_argument("invalid config: " + errs.front());

    std::vector<detail::CellCoord> cells;
    for (TopologyKind t : cfg.topologies) {
        for (MediumMode m : cfg.media) {
            for (SchedulerKind s : cfg.schemes) {
                for (int n : cfg.task_counts) {
                    for (int rep = 0; rep < cfg.replications; ++rep) {
                        cells.push_back({t, m, s, n, rep});
                    }
                }
            }
        }
    }

    std::vector<detail::CellOutput> outputs(cells.size());
    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(cells.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) break;
            const detail::CellCoord& c = cells[i];
            outputs[i] = run_cell(cfg, c.topology, c.medium, c.scheme, c.n_tasks, c.replication);
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();

    std::vector<RunReport> reports;
    reports.reserve(outputs.size());
    for (const detail::CellOutput& o : outputs) reports.push_back(o.report);

    if (write_files) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        auto open = [&](const char* name) {
            std::ofstream f(fs::path(cfg.out_dir) / name, std::ios::binary);
            if (!f) throw std::runtime_error(std::string("cannot write to ") + cfg.out_dir);
            return f;
        };
        using detail::fmt_double;

        std::ofstream summary = open("summary.csv");
        summary << "scheme,topology,medium,n_tasks,seed,satisfaction_ratio,usage_ecu1,usage_ecu2,"
                   "usage_ecu3,usage_ecu4,usage_hpcu,latency_mean_ms,latency_p50_ms,"
                   "latency_p95_ms,latency_max_ms,objective,feasible,wall_time_ms\n";
        for (const RunReport& r : reports) {
            summary << to_string(r.scheme) << ',' << to_string(r.topology) << ','
                    << to_string(r.medium) << ',' << r.n_tasks << ',' << r.seed << ','
                    << fmt_double(r.satisfaction);
            for (double u : r.usage) summary << ',' << fmt_double(u);
            summary << ',' << fmt_double(r.latency.mean * 1e3) << ','
                    << fmt_double(r.latency.p50 * 1e3) << ',' << fmt_double(r.latency.p95 * 1e3)
                    << ',' << fmt_double(r.latency.max * 1e3) << ',' << fmt_double(r.objective)
                    << ',' << (r.feasible ? 1 : 0) << ',' << fmt_double(r.wall_ms) << '\n';
        }

        std::ofstream per_task = open("per_task.csv");
        per_task << "scheme,topology,medium,n_tasks,seed,task_id,origin,unit,t_comm_fwd_ms,"
                    "t_unit_ms,t_comm_ret_ms,total_ms,deadline_ms,satisfied,"
                    "selected_reliability,forward_distance\n";
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            const RunReport& r = outputs[i].report;
            for (const detail::PerTaskRow& row : outputs[i].per_task) {
                per_task << to_string(r.scheme) << ',' << to_string(r.topology) << ','
                         << to_string(r.medium) << ',' << r.n_tasks << ',' << r.seed << ','
                         << row.task_id << ',' << row.origin << ',' << row.unit << ','
                         << fmt_double(row.t_comm_fwd_ms) << ',' << fmt_double(row.t_unit_ms)
                         << ',' << fmt_double(row.t_comm_ret_ms) << ','
                         << fmt_double(row.total_ms) << ',' << fmt_double(row.deadline_ms) << ','
                         << (row.satisfied ? 1 : 0) << ','
                         << fmt_double(row.selected_reliability) << ','
                         << fmt_double(row.forward_distance) << '\n';
            }
        }

        std::ofstream convergence = open("convergence.csv");
        convergence << "scheme,topology,medium,n_tasks,seed,generation,best_fitness\n";
        for (const RunReport& r : reports) {
            for (std::size_t g = 0; g < r.ga_trace.size(); ++g) {
                convergence << to_string(r.scheme) << ',' << to_string(r.topology) << ','
                            << to_string(r.medium) << ',' << r.n_tasks << ',' << r.seed << ','
                            << g << ',' << fmt_double(r.ga_trace[g]) << '\n';
            }
        }

        // Mean across replications per (scheme, topology, medium, n_tasks),
        // emitted in sweep order.
        std::ofstream aggregate = open("aggregate.csv");
        aggregate << "scheme,topology,medium,n_tasks,replications,satisfaction_ratio,usage_ecu1,"
                     "usage_ecu2,usage_ecu3,usage_ecu4,usage_hpcu,latency_mean_ms,latency_p50_ms,"
                     "latency_p95_ms,latency_max_ms,objective,feasible_fraction\n";
        for (std::size_t i = 0; i < reports.size(); i += cfg.replications) {
            double n = static_cast<double>(cfg.replications);
            double sat = 0, usage[kZoneCount + 1] = {0, 0, 0, 0, 0};
            double lmean = 0, lp50 = 0, lp95 = 0, lmax = 0, obj = 0, feas = 0;
            for (int k = 0; k < cfg.replications; ++k) {
                const RunReport& r = reports[i + k];
                sat += r.satisfaction;
                for (int u = 0; u <= kZoneCount; ++u) usage[u] += r.usage[u];
                lmean += r.latency.mean;
                lp50 += r.latency.p50;
                lp95 += r.latency.p95;
                lmax += r.latency.max;
                obj += r.objective;
                feas += r.feasible ? 1 : 0;
            }
            const RunReport& r0 = reports[i];
            aggregate << to_string(r0.scheme) << ',' << to_string(r0.topology) << ','
                      << to_string(r0.medium) << ',' << r0.n_tasks << ',' << cfg.replications
                      << ',' << fmt_double(sat / n);
            for (int u = 0; u <= kZoneCount; ++u) aggregate << ',' << fmt_double(usage[u] / n);
            aggregate << ',' << fmt_double(lmean / n * 1e3) << ',' << fmt_double(lp50 / n * 1e3)
                      << ',' << fmt_double(lp95 / n * 1e3) << ',' << fmt_double(lmax / n * 1e3)
                      << ',' << fmt_double(obj / n) << ',' << fmt_double(feas / n) << '\n';
        }
    }

    return reports;
}

}  // namespace ivnsim
