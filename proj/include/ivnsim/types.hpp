// Shared identifier types for the zonal in-vehicle network model.

#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ivnsim {

// The vehicle is split into four zones: 1 = front-left, 2 = front-right,
// 3 = rear-left, 4 = rear-right. Each zone hosts one zone ECU.
inline constexpr int kZoneCount = 4;

// Zone on the other side of the vehicle within the same front/rear half
// (left <-> right).
inline constexpr int opposite_zone(int zone) {
    switch (zone) {
        case 1: return 2;
        case 2: return 1;
        case 3: return 4;
        case 4: return 3;
        default: throw std::invalid_argument("zone out of range");
    }
}

enum class NodeKind : std::uint8_t { SensorActuator = 0, ZoneEcu = 1, Hpcu = 2 };

// Identity of a network element. Ordering is (kind, zone, index), which
// gives every algorithm in the library a fixed, platform-independent
// node order to sort by.
struct NodeId {
    NodeKind kind = NodeKind::Hpcu;
    std::uint8_t zone = 0;   // 1..4 for sensors and zone ECUs, 0 for the HPCU
    std::uint16_t index = 0; // 1..S_m for sensors, 0 otherwise

    static NodeId sensor(int zone, int index) {
        return NodeId{NodeKind::SensorActuator, static_cast<std::uint8_t>(zone),
                      static_cast<std::uint16_t>(index)};
    }
    static NodeId zone_ecu(int zone) {
        return NodeId{NodeKind::ZoneEcu, static_cast<std::uint8_t>(zone), 0};
    }
    static NodeId hpcu() { return NodeId{NodeKind::Hpcu, 0, 0}; }

    bool is_computing_unit() const { return kind != NodeKind::SensorActuator; }

    friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;

    // Stable 64-bit label for hashing into RNG streams.
    std::uint64_t key() const {
        return (static_cast<std::uint64_t>(kind) << 32) |
               (static_cast<std::uint64_t>(zone) << 16) | index;
    }

    std::string to_string() const {
        switch (kind) {
            case NodeKind::SensorActuator:
                return "sna" + std::to_string(zone) + "_" + std::to_string(index);
            case NodeKind::ZoneEcu:
                return "ecu" + std::to_string(zone);
            case NodeKind::Hpcu:
                return "hpcu";
        }
        return "?";
    }
};

// OFDMA band: one dedicated band per zone plus one for direct HPCU links.
struct BandId {
    int zone = 0;  // 1..4 = zone band, 0 = HPCU band

    static BandId hpcu_band() { return BandId{0}; }
    static BandId zone_band(int zone) { return BandId{zone}; }

    bool is_hpcu_band() const { return zone == 0; }

    // Dense index 0..kZoneCount (zone bands first, HPCU band last).
    int array_index() const { return zone == 0 ? kZoneCount : zone - 1; }

    friend constexpr auto operator<=>(const BandId&, const BandId&) = default;

    std::string to_string() const {
        return zone == 0 ? std::string("band_h") : "band_z" + std::to_string(zone);
    }
};

inline constexpr int kBandCount = kZoneCount + 1;

}  // namespace ivnsim
