#include <catch2/catch_amalgamated.hpp>

#include "ivnsim/topology.hpp"
#include "ivnsim/workload.hpp"

using namespace ivnsim;

namespace {

TopologyParams wired_params() {
    TopologyParams p;
    return p;
}

TopologyParams hybrid_params(std::uint64_t seed = 7) {
    TopologyParams p;
    p.reliability_sampler = make_reliability_sampler(seed);
    return p;
}

int count_links(const Topology& t, NodeKind ka, NodeKind kb) {
    int n = 0;
    for (const Link& l : t.links) {
        if ((l.a.kind == ka && l.b.kind == kb) || (l.a.kind == kb && l.b.kind == ka)) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("tree topology with nine sensors per zone") {
    Topology t = build_topology(TopologyKind::Tree, {9, 9, 9, 9}, MediumMode::Wired,
                                wired_params());
    CHECK(t.nodes.size() == 41);  // 36 sensors + 4 ECUs + HPCU
    CHECK(count_links(t, NodeKind::SensorActuator, NodeKind::ZoneEcu) == 36);
    CHECK(count_links(t, NodeKind::ZoneEcu, NodeKind::Hpcu) == 4);
    CHECK(t.links.size() == 40);
    CHECK(t.compute_specs.size() == 5);
    CHECK(t.spec_for(NodeId::zone_ecu(1)).speed_hz == 1e9);
    CHECK(t.spec_for(NodeId::hpcu()).speed_hz == 4e9);
    CHECK(t.spec_for(NodeId::hpcu()).max_capacity_cycles == Catch::Approx(4e8));
}

TEST_CASE("tree topology with one sensor per zone has eight links") {
    Topology t = build_topology(TopologyKind::Tree, {1, 1, 1, 1}, MediumMode::Wired,
                                wired_params());
    CHECK(t.links.size() == 8);
}

TEST_CASE("basic mesh ring connects zone pairs but not diagonals") {
    Topology t = build_topology(TopologyKind::BasicMesh, {2, 2, 2, 2}, MediumMode::Wired,
                                wired_params());
    CHECK(t.direct_link(NodeId::zone_ecu(1), NodeId::zone_ecu(2)) >= 0);
    CHECK(t.direct_link(NodeId::zone_ecu(3), NodeId::zone_ecu(4)) >= 0);
    CHECK(t.direct_link(NodeId::zone_ecu(1), NodeId::zone_ecu(3)) >= 0);
    CHECK(t.direct_link(NodeId::zone_ecu(2), NodeId::zone_ecu(4)) >= 0);
    // Diagonal pairs route via the HPCU.
    CHECK(t.direct_link(NodeId::zone_ecu(1), NodeId::zone_ecu(4)) < 0);
    CHECK(t.direct_link(NodeId::zone_ecu(2), NodeId::zone_ecu(3)) < 0);
}

TEST_CASE("cross-zone mesh links sensors to the opposite-side zone ECU") {
    Topology t = build_topology(TopologyKind::CrossZoneMesh, {2, 2, 2, 2}, MediumMode::Wired,
                                wired_params());
    CHECK(t.direct_link(NodeId::sensor(1, 1), NodeId::zone_ecu(2)) >= 0);
    CHECK(t.direct_link(NodeId::sensor(2, 1), NodeId::zone_ecu(1)) >= 0);
    CHECK(t.direct_link(NodeId::sensor(3, 2), NodeId::zone_ecu(4)) >= 0);
    // Not to the other half of the vehicle.
    CHECK(t.direct_link(NodeId::sensor(1, 1), NodeId::zone_ecu(3)) < 0);
    CHECK(t.direct_link(NodeId::sensor(1, 1), NodeId::zone_ecu(4)) < 0);
    CHECK(t.direct_link(NodeId::sensor(1, 1), NodeId::hpcu()) < 0);
}

TEST_CASE("centralized mesh gives every sensor a direct HPCU link") {
    Topology t = build_topology(TopologyKind::CentralizedMesh, {3, 3, 3, 3}, MediumMode::Wired,
                                wired_params());
    for (const NodeId& n : t.nodes) {
        if (n.kind == NodeKind::SensorActuator) {
            CHECK(t.direct_link(n, NodeId::hpcu()) >= 0);
        }
    }
}

TEST_CASE("builder rejects bad inputs") {
    CHECK_THROWS_AS(build_topology(TopologyKind::Tree, {0, 1, 1, 1}, MediumMode::Wired,
                                   wired_params()),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_topology(TopologyKind::Tree, {1, 1, 1}, MediumMode::Wired,
                                   wired_params()),
                    std::invalid_argument);
    // Hybrid requires a reliability sampler.
    CHECK_THROWS_AS(build_topology(TopologyKind::Tree, {1, 1, 1, 1}, MediumMode::Hybrid,
                                   wired_params()),
                    std::invalid_argument);
}

TEST_CASE("hybrid mode makes exactly the sensor-facing links wireless") {
    Topology t = build_topology(TopologyKind::CentralizedMesh, {2, 2, 2, 2}, MediumMode::Hybrid,
                                hybrid_params());
    for (const Link& l : t.links) {
        bool sensor_edge = l.a.kind == NodeKind::SensorActuator ||
                           l.b.kind == NodeKind::SensorActuator;
        if (sensor_edge) {
            CHECK(l.medium == LinkMedium::Wireless);
            CHECK(l.reliability > 0.0);
            CHECK(l.reliability <= 1.0);
            if (l.touches(NodeId::hpcu())) {
                CHECK(l.band == BandId::hpcu_band());
                CHECK(l.link_class == LinkClass::CrossZoneOrHpcu);
                CHECK(l.reliability >= 0.90);
            } else {
                // Zone band of the ECU side.
                NodeId ecu = l.a.kind == NodeKind::ZoneEcu ? l.a : l.b;
                CHECK(l.band == BandId::zone_band(ecu.zone));
            }
        } else {
            CHECK(l.medium == LinkMedium::Wired);
            CHECK(l.reliability == 1.0);
        }
    }
    // In-zone sensor links draw from the tighter range.
    for (const Link& l : t.links) {
        if (l.link_class == LinkClass::InZoneSensor) CHECK(l.reliability >= 0.95);
    }
}

TEST_CASE("topology build is deterministic") {
    Topology a = build_topology(TopologyKind::CentralizedMesh, {3, 2, 4, 1}, MediumMode::Hybrid,
                                hybrid_params(42));
    Topology b = build_topology(TopologyKind::CentralizedMesh, {3, 2, 4, 1}, MediumMode::Hybrid,
                                hybrid_params(42));
    REQUIRE(a.links.size() == b.links.size());
    for (std::size_t i = 0; i < a.links.size(); ++i) {
        CHECK(a.links[i].a == b.links[i].a);
        CHECK(a.links[i].b == b.links[i].b);
        CHECK(a.links[i].reliability == b.links[i].reliability);
    }
}

TEST_CASE("path enumeration on the tree finds the single sensor-HPCU route") {
    Topology t = build_topology(TopologyKind::Tree, {2, 2, 2, 2}, MediumMode::Wired,
                                wired_params());
    auto paths = enumerate_paths(t, NodeId::sensor(1, 1), NodeId::hpcu(), 4);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].hops() == 2);
    CHECK(paths[0].node_sequence() ==
          std::vector<NodeId>{NodeId::sensor(1, 1), NodeId::zone_ecu(1), NodeId::hpcu()});
}

TEST_CASE("centralized mesh offers several sensor-HPCU routes") {
    Topology t = build_topology(TopologyKind::CentralizedMesh, {2, 2, 2, 2}, MediumMode::Wired,
                                wired_params());
    auto paths = enumerate_paths(t, NodeId::sensor(1, 1), NodeId::hpcu(), 4);
    CHECK(paths.size() >= 2);
    // Sorted by hop count: the direct link comes first.
    CHECK(paths[0].hops() == 1);
}

TEST_CASE("same endpoints yield the single empty path") {
    Topology t = build_topology(TopologyKind::Tree, {1, 1, 1, 1}, MediumMode::Wired,
                                wired_params());
    auto paths = enumerate_paths(t, NodeId::hpcu(), NodeId::hpcu(), 4);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].empty());
}

TEST_CASE("every sensor reaches every computing unit within four hops") {
    for (TopologyKind kind : {TopologyKind::Tree, TopologyKind::BasicMesh,
                              TopologyKind::CrossZoneMesh, TopologyKind::CentralizedMesh}) {
        Topology t = build_topology(kind, {2, 2, 2, 2}, MediumMode::Wired, wired_params());
        for (const NodeId& n : t.nodes) {
            if (n.kind != NodeKind::SensorActuator) continue;
            for (const NodeId& unit : t.computing_units()) {
                CHECK(!enumerate_paths(t, n, unit, 4).empty());
            }
        }
    }
}

TEST_CASE("route diversity grows with topology richness") {
    std::size_t previous = 0;
    for (TopologyKind kind : {TopologyKind::Tree, TopologyKind::BasicMesh,
                              TopologyKind::CrossZoneMesh, TopologyKind::CentralizedMesh}) {
        Topology t = build_topology(kind, {2, 2, 2, 2}, MediumMode::Wired, wired_params());
        std::size_t count = enumerate_paths(t, NodeId::sensor(1, 1), NodeId::hpcu(), 4).size();
        CHECK(count >= previous);
        previous = count;
    }
}

TEST_CASE("paths are simple and deterministic in order") {
    Topology t = build_topology(TopologyKind::CentralizedMesh, {2, 2, 2, 2}, MediumMode::Wired,
                                wired_params());
    auto paths = enumerate_paths(t, NodeId::sensor(2, 1), NodeId::zone_ecu(3), 4);
    auto again = enumerate_paths(t, NodeId::sensor(2, 1), NodeId::zone_ecu(3), 4);
    REQUIRE(paths.size() == again.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        CHECK(paths[i].node_sequence() == again[i].node_sequence());
        auto seq = paths[i].node_sequence();
        std::sort(seq.begin(), seq.end());
        CHECK(std::adjacent_find(seq.begin(), seq.end()) == seq.end());  // no repeated node
        if (i > 0) CHECK(paths[i - 1].hops() <= paths[i].hops());
    }
}

TEST_CASE("path distance and reliability") {
    Link l1{0, NodeId::sensor(1, 1), NodeId::zone_ecu(1), LinkMedium::Wireless,
            LinkClass::InZoneSensor, 0.0, BandId::zone_band(1), 0.95, 1.0};
    Link l2{1, NodeId::zone_ecu(1), NodeId::hpcu(), LinkMedium::Wireless,
            LinkClass::CrossZoneOrHpcu, 0.0, BandId::hpcu_band(), 0.90, 1.0};
    Path two{NodeId::sensor(1, 1), NodeId::hpcu(), {l1, l2}};
    CHECK(path_distance(two) == 2.0);
    CHECK(path_reliability(two) == Catch::Approx(0.855));

    Path empty{NodeId::hpcu(), NodeId::hpcu(), {}};
    CHECK(path_distance(empty) == 0.0);
    CHECK(path_reliability(empty) == 1.0);

    Link l3 = l1;
    l3.reliability = 1.0;
    Path three{NodeId::sensor(1, 1), NodeId::hpcu(), {l3, l3, l3}};
    CHECK(path_distance(three) == 3.0);

    // All-wired paths are perfectly reliable.
    Topology t = build_topology(TopologyKind::Tree, {1, 1, 1, 1}, MediumMode::Wired,
                                wired_params());
    auto paths = enumerate_paths(t, NodeId::sensor(1, 1), NodeId::hpcu(), 4);
    REQUIRE(!paths.empty());
    CHECK(path_reliability(paths[0]) == 1.0);
}

TEST_CASE("path concatenation composes distance additively and reliability multiplicatively") {
    Topology t = build_topology(TopologyKind::CentralizedMesh, {2, 2, 2, 2}, MediumMode::Hybrid,
                                hybrid_params(3));
    auto first = enumerate_paths(t, NodeId::sensor(1, 1), NodeId::zone_ecu(2), 2);
    auto second = enumerate_paths(t, NodeId::zone_ecu(2), NodeId::hpcu(), 2);
    REQUIRE(!first.empty());
    REQUIRE(!second.empty());
    for (const Path& a : first) {
        for (const Path& b : second) {
            Path joined{a.src, b.dst, a.links};
            joined.links.insert(joined.links.end(), b.links.begin(), b.links.end());
            CHECK(path_distance(joined) == Catch::Approx(path_distance(a) + path_distance(b)));
            CHECK(path_reliability(joined) ==
                  Catch::Approx(path_reliability(a) * path_reliability(b)));
        }
    }
}
