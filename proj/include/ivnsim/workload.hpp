// Task batch generation and per-link reliability sampling.
//
// Sampling is stream-stable: task i draws from a substream keyed by (seed,
// i), so growing n_tasks extends the batch without disturbing the prefix.
// That property is what makes load sweeps paired experiments.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ivnsim/rng.hpp"
#include "ivnsim/topology.hpp"
#include "ivnsim/types.hpp"

namespace ivnsim {

// One task: where it originates, how much compute it needs, how big it and
// its result are, when it appears and by when it must complete.
struct Task {
    int id = 0;
    NodeId origin;
    double compute_cycles = 0.0;
    double size_bits = 0.0;
    double result_bits = 0.0;
    double gen_time_s = 0.0;
    double deadline_s = 0.0;  // relative to gen_time
};

struct WorkloadConfig {
    int n_tasks = 0;
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
    // 0 = all tasks appear at t = 0; otherwise generation times are uniform
    // over [0, stagger_horizon_s).
    double stagger_horizon_s = 0.0;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_tasks < 0) throw std::invalid_argument("n_tasks must be nonnegative");
        double mix = sensor_fraction + ecu_fraction + hpcu_fraction;
        if (std::abs(mix - 1.0) > 1e-9) throw std::invalid_argument("origin mix must sum to 1");
        if (sensor_fraction < 0 || ecu_fraction < 0 || hpcu_fraction < 0) {
            throw std::invalid_argument("origin mix fractions must be nonnegative");
        }
        if (demand_cycles_lo <= 0 || demand_cycles_hi < demand_cycles_lo) {
            throw std::invalid_argument("bad demand range");
        }
        if (size_bits_lo <= 0 || size_bits_hi < size_bits_lo) {
            throw std::invalid_argument("bad size range");
        }
        if (result_fraction < 0) throw std::invalid_argument("bad result fraction");
        if (deadline_s_lo <= 0 || deadline_s_hi < deadline_s_lo) {
            throw std::invalid_argument("bad deadline range");
        }
        if (stagger_horizon_s < 0) throw std::invalid_argument("bad stagger horizon");
    }
};

// Reliability of a link of the given class: wired links are perfect,
// in-zone sensor links draw from (0.95, 1) and cross-zone or HPCU-facing
// sensor links from (0.90, 1).
inline double sample_link_reliability(LinkClass cls, CounterRng& rng) {
    switch (cls) {
        case LinkClass::Wired: return 1.0;
        case LinkClass::InZoneSensor: return rng.uniform(0.95, 1.0);
        case LinkClass::CrossZoneOrHpcu: return rng.uniform(0.90, 1.0);
    }
    throw std::invalid_argument("unknown link class");
}

// Sampler for build_topology. Keyed by the link endpoints so a given link
// draws the same reliability regardless of topology kind or build order;
// the same physical link then behaves identically across topology variants
// within one replication.
inline ReliabilitySampler make_reliability_sampler(std::uint64_t seed) {
    return [seed](LinkClass cls, NodeId a, NodeId b) {
        if (b < a) std::swap(a, b);
        CounterRng rng(derive_key(seed, 0x4e11abu, static_cast<std::uint64_t>(cls), a.key(),
                                  b.key()));
        return sample_link_reliability(cls, rng);
    };
}

namespace detail {

inline NodeId sample_origin(const WorkloadConfig& cfg, const Topology& topo, CounterRng& rng) {
    double u = rng.next_unit();
    NodeKind kind;
    if (u < cfg.sensor_fraction) {
        kind = NodeKind::SensorActuator;
    } else if (u < cfg.sensor_fraction + cfg.ecu_fraction) {
        kind = NodeKind::ZoneEcu;
    } else {
        kind = NodeKind::Hpcu;
    }
    std::vector<NodeId> pool;
    for (const NodeId& n : topo.nodes) {
        if (n.kind == kind) pool.push_back(n);
    }
    if (pool.empty()) throw std::runtime_error("origin class has no nodes in topology");
    return pool[rng.uniform_index(pool.size())];
}

}  // namespace detail

// Generates the task batch for one run. Deterministic in (config, topology).
inline std::vector<Task> generate_tasks(const WorkloadConfig& cfg, const Topology& topo) {
    cfg.validate();
    std::vector<Task> tasks;
    tasks.reserve(cfg.n_tasks);
    for (int i = 0; i < cfg.n_tasks; ++i) {
        CounterRng rng(derive_key(cfg.seed, 0x7a5cu, static_cast<std::uint64_t>(i)));
        Task t;
        t.id = i;
        t.origin = detail::sample_origin(cfg, topo, rng);
        t.compute_cycles = rng.uniform(cfg.demand_cycles_lo, cfg.demand_cycles_hi);
        t.size_bits = rng.uniform(cfg.size_bits_lo, cfg.size_bits_hi);
        t.result_bits = cfg.result_fraction * t.size_bits;
        t.deadline_s = rng.uniform(cfg.deadline_s_lo, cfg.deadline_s_hi);
        t.gen_time_s = cfg.stagger_horizon_s > 0 ? rng.uniform(0.0, cfg.stagger_horizon_s) : 0.0;
        tasks.push_back(t);
    }
    return tasks;
}

}  // namespace ivnsim
