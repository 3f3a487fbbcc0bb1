// In-vehicle network topologies: node/link graph construction for the four
// reference layouts (tree, basic mesh, cross-zone mesh, centralized mesh),
// plus simple-path enumeration used by the schedulers.
//
// A topology is immutable after construction and safe to share across
// threads without synchronization.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivnsim/types.hpp"

namespace ivnsim {

enum class TopologyKind { Tree, BasicMesh, CrossZoneMesh, CentralizedMesh };
enum class MediumMode { Wired, Hybrid };

inline const char* to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::Tree: return "tree";
        case TopologyKind::BasicMesh: return "basic_mesh";
        case TopologyKind::CrossZoneMesh: return "cross_zone_mesh";
        case TopologyKind::CentralizedMesh: return "centralized_mesh";
    }
    return "?";
}

inline const char* to_string(MediumMode m) {
    return m == MediumMode::Wired ? "wired" : "hybrid";
}

// Reliability class of a link; drives how per-link reliability is sampled.
enum class LinkClass { Wired, InZoneSensor, CrossZoneOrHpcu };

enum class LinkMedium : std::uint8_t { Wired, Wireless };

struct Link {
    int id = -1;
    NodeId a;
    NodeId b;
    LinkMedium medium = LinkMedium::Wired;
    LinkClass link_class = LinkClass::Wired;
    double wired_rate_bps = 0.0;  // valid for wired links
    BandId band;                  // valid for wireless links
    double reliability = 1.0;     // 1.0 for wired, (0, 1] for wireless
    double distance = 1.0;

    bool touches(NodeId n) const { return a == n || b == n; }
    NodeId other(NodeId n) const { return a == n ? b : a; }
};

// Processing capability of a computing unit. Capacity is defined over a
// fixed time window: max_capacity_cycles = speed_hz * capacity_window_s.
struct ComputeSpec {
    NodeId unit;
    double speed_hz = 0.0;
    double capacity_window_s = 0.0;
    double max_capacity_cycles = 0.0;
};

// An ordered, self-contained walk through the network. Links are stored by
// value so a path can be inspected without the owning topology. The empty
// path (src == dst) models local processing.
struct Path {
    NodeId src;
    NodeId dst;
    std::vector<Link> links;

    bool empty() const { return links.empty(); }
    std::size_t hops() const { return links.size(); }

    // Node sequence src, ..., dst implied by the link order.
    std::vector<NodeId> node_sequence() const {
        std::vector<NodeId> seq{src};
        NodeId cur = src;
        for (const Link& l : links) {
            cur = l.other(cur);
            seq.push_back(cur);
        }
        return seq;
    }

    Path reversed() const {
        Path r;
        r.src = dst;
        r.dst = src;
        r.links.assign(links.rbegin(), links.rend());
        return r;
    }
};

// Sum of per-link distance weights; 0 for the empty path.
inline double path_distance(const Path& p) {
    double d = 0.0;
    for (const Link& l : p.links) d += l.distance;
    return d;
}

// Product of per-link reliabilities; 1.0 for the empty path.
inline double path_reliability(const Path& p) {
    double r = 1.0;
    for (const Link& l : p.links) r *= l.reliability;
    return r;
}

// Samples the reliability of a wireless link given its class and endpoints.
// Must be deterministic in its arguments for reproducible builds.
using ReliabilitySampler = std::function<double(LinkClass, NodeId, NodeId)>;

struct TopologyParams {
    double wired_rate_bps = 1e9;
    double link_distance = 1.0;
    double ecu_speed_hz = 1e9;
    double hpcu_speed_hz = 4e9;
    double capacity_window_s = 0.100;
    ReliabilitySampler reliability_sampler;  // required for MediumMode::Hybrid
};

struct Topology {
    TopologyKind kind = TopologyKind::Tree;
    MediumMode medium_mode = MediumMode::Wired;
    std::vector<int> sensors_per_zone;  // size kZoneCount
    std::vector<NodeId> nodes;          // sorted by NodeId ordering
    std::vector<Link> links;            // id == position
    std::vector<ComputeSpec> compute_specs;  // ecu1..ecu4 then hpcu

    const std::vector<int>& adjacent_links(NodeId n) const {
        static const std::vector<int> kNone;
        auto it = adjacency_.find(n);
        return it == adjacency_.end() ? kNone : it->second;
    }

    bool has_node(NodeId n) const { return adjacency_.count(n) != 0; }

    // The five computing units in spec order (zone ECUs by zone, then HPCU).
    std::vector<NodeId> computing_units() const {
        std::vector<NodeId> us;
        for (const ComputeSpec& s : compute_specs) us.push_back(s.unit);
        return us;
    }

    const ComputeSpec& spec_for(NodeId unit) const {
        for (const ComputeSpec& s : compute_specs) {
            if (s.unit == unit) return s;
        }
        throw std::invalid_argument("not a computing unit: " + unit.to_string());
    }

    // Direct link between two nodes, or -1.
    int direct_link(NodeId a, NodeId b) const {
        for (int li : adjacent_links(a)) {
            if (links[li].touches(b)) return li;
        }
        return -1;
    }

    void finalize() {
        adjacency_.clear();
        for (const Link& l : links) {
            adjacency_[l.a].push_back(l.id);
            adjacency_[l.b].push_back(l.id);
        }
    }

private:
    std::map<NodeId, std::vector<int>> adjacency_;
};

namespace detail {

inline void add_link(Topology& topo, NodeId a, NodeId b, LinkClass cls, BandId band,
                     const TopologyParams& params) {
    if (a == b) throw std::invalid_argument("self-loop link");
    Link l;
    l.id = static_cast<int>(topo.links.size());
    l.a = a;
    l.b = b;
    l.distance = params.link_distance;
    l.link_class = cls;
    // Only links with a sensor endpoint go wireless in hybrid mode; the
    // ECU/HPCU backbone stays wired either way.
    bool sensor_edge = a.kind == NodeKind::SensorActuator || b.kind == NodeKind::SensorActuator;
    if (topo.medium_mode == MediumMode::Hybrid && sensor_edge) {
        l.medium = LinkMedium::Wireless;
        l.band = band;
        if (!params.reliability_sampler) {
            throw std::invalid_argument("hybrid topology requires a reliability sampler");
        }
        l.reliability = params.reliability_sampler(cls, a, b);
        if (!(l.reliability > 0.0 && l.reliability <= 1.0)) {
            throw std::invalid_argument("sampled reliability outside (0, 1]");
        }
    } else {
        l.medium = LinkMedium::Wired;
        l.link_class = LinkClass::Wired;
        l.wired_rate_bps = params.wired_rate_bps;
        l.reliability = 1.0;
    }
    topo.links.push_back(l);
}

}  // namespace detail

// Builds one of the four reference topologies.
//
// Link sets by kind:
//   Tree            sensors to their own zone ECU, zone ECUs to the HPCU.
//   BasicMesh       Tree + ECU backbone ring (front pair, rear pair, left
//                   pair, right pair; diagonal pairs reach each other via
//                   the HPCU, so no diagonal ECU-ECU links).
//   CrossZoneMesh   BasicMesh + a second link per sensor to the zone ECU on
//                   the opposite side of the same half (left <-> right).
//   CentralizedMesh CrossZoneMesh + a direct sensor-HPCU link per sensor.
//
// In hybrid mode exactly the sensor<->{ECU, HPCU} links are wireless; each
// wireless sensor-ECU link uses the band of the ECU's zone and sensor-HPCU
// links use the dedicated HPCU band.
inline Topology build_topology(TopologyKind kind, const std::vector<int>& zone_sensor_counts,
                               MediumMode medium_mode, const TopologyParams& params) {
    if (zone_sensor_counts.size() != static_cast<std::size_t>(kZoneCount)) {
        throw std::invalid_argument("expected one sensor count per zone");
    }
    for (int c : zone_sensor_counts) {
        if (c <= 0) throw std::invalid_argument("zone sensor count must be positive");
    }
    if (params.wired_rate_bps <= 0 || params.ecu_speed_hz <= 0 || params.hpcu_speed_hz <= 0 ||
        params.capacity_window_s <= 0 || params.link_distance <= 0) {
        throw std::invalid_argument("topology params must be positive");
    }

    Topology topo;
    topo.kind = kind;
    topo.medium_mode = medium_mode;
    topo.sensors_per_zone = zone_sensor_counts;

    for (int z = 1; z <= kZoneCount; ++z) {
        for (int s = 1; s <= zone_sensor_counts[z - 1]; ++s) {
            topo.nodes.push_back(NodeId::sensor(z, s));
        }
    }
    for (int z = 1; z <= kZoneCount; ++z) topo.nodes.push_back(NodeId::zone_ecu(z));
    topo.nodes.push_back(NodeId::hpcu());
    std::sort(topo.nodes.begin(), topo.nodes.end());

    // Sensor access links.
    for (int z = 1; z <= kZoneCount; ++z) {
        for (int s = 1; s <= zone_sensor_counts[z - 1]; ++s) {
            detail::add_link(topo, NodeId::sensor(z, s), NodeId::zone_ecu(z),
                             LinkClass::InZoneSensor, BandId::zone_band(z), params);
        }
    }
    // ECU uplinks to the HPCU.
    for (int z = 1; z <= kZoneCount; ++z) {
        detail::add_link(topo, NodeId::zone_ecu(z), NodeId::hpcu(), LinkClass::Wired,
                         BandId::hpcu_band(), params);
    }
    // ECU backbone ring.
    if (kind != TopologyKind::Tree) {
        const std::pair<int, int> ring[] = {{1, 2}, {3, 4}, {1, 3}, {2, 4}};
        for (auto [za, zb] : ring) {
            detail::add_link(topo, NodeId::zone_ecu(za), NodeId::zone_ecu(zb), LinkClass::Wired,
                             BandId::hpcu_band(), params);
        }
    }
    // Cross-zone sensor links (left <-> right within the same half).
    if (kind == TopologyKind::CrossZoneMesh || kind == TopologyKind::CentralizedMesh) {
        for (int z = 1; z <= kZoneCount; ++z) {
            int oz = opposite_zone(z);
            for (int s = 1; s <= zone_sensor_counts[z - 1]; ++s) {
                detail::add_link(topo, NodeId::sensor(z, s), NodeId::zone_ecu(oz),
                                 LinkClass::CrossZoneOrHpcu, BandId::zone_band(oz), params);
            }
        }
    }
    // Direct sensor-HPCU links.
    if (kind == TopologyKind::CentralizedMesh) {
        for (int z = 1; z <= kZoneCount; ++z) {
            for (int s = 1; s <= zone_sensor_counts[z - 1]; ++s) {
                detail::add_link(topo, NodeId::sensor(z, s), NodeId::hpcu(),
                                 LinkClass::CrossZoneOrHpcu, BandId::hpcu_band(), params);
            }
        }
    }

    for (int z = 1; z <= kZoneCount; ++z) {
        topo.compute_specs.push_back(ComputeSpec{NodeId::zone_ecu(z), params.ecu_speed_hz,
                                                 params.capacity_window_s,
                                                 params.ecu_speed_hz * params.capacity_window_s});
    }
    topo.compute_specs.push_back(ComputeSpec{NodeId::hpcu(), params.hpcu_speed_hz,
                                             params.capacity_window_s,
                                             params.hpcu_speed_hz * params.capacity_window_s});

    topo.finalize();
    return topo;
}

// All simple paths from src to dst with at most max_hops links, sorted by
// (hop count, lexicographic node sequence) so downstream consumers can rely
// on a stable index space. src == dst yields the single empty path; an
// unreachable dst yields an empty list.
inline std::vector<Path> enumerate_paths(const Topology& topo, NodeId src, NodeId dst,
                                         int max_hops) {
    if (!topo.has_node(src) || !topo.has_node(dst)) {
        throw std::invalid_argument("path endpoints must be topology nodes");
    }
    if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");

    std::vector<Path> out;
    if (src == dst) {
        out.push_back(Path{src, dst, {}});
        return out;
    }

    std::vector<Link> stack;
    std::vector<NodeId> visited{src};
    auto on_stack = [&](NodeId n) {
        return std::find(visited.begin(), visited.end(), n) != visited.end();
    };

    std::function<void(NodeId)> dfs = [&](NodeId cur) {
        for (int li : topo.adjacent_links(cur)) {
            const Link& l = topo.links[li];
            NodeId nxt = l.other(cur);
            if (on_stack(nxt)) continue;
            stack.push_back(l);
            if (nxt == dst) {
                out.push_back(Path{src, dst, stack});
            } else if (static_cast<int>(stack.size()) < max_hops) {
                visited.push_back(nxt);
                dfs(nxt);
                visited.pop_back();
            }
            stack.pop_back();
        }
    };
    dfs(src);

    std::sort(out.begin(), out.end(), [](const Path& x, const Path& y) {
        if (x.hops() != y.hops()) return x.hops() < y.hops();
        return x.node_sequence() < y.node_sequence();
    });
    return out;
}

}  // namespace ivnsim
