// Link-level transmission timing.
//
// Wired links move bits at a fixed rate. Wireless links are OFDMA bands
// split into equal frequency resources; a transmission occupies a set of
// resources over whole 0.5 ms-class slots, with the per-slot rate drawn
// from a Rayleigh-faded SINR around a configured mean. Link reliability is
// applied as a per-slot delivery trial: a failed slot is wasted airtime and
// is retried, which is what makes unreliable links slow rather than lossy.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ivnsim/rng.hpp"
#include "ivnsim/types.hpp"

namespace ivnsim {

// Frequency layout of one band.
struct BandPlan {
    BandId band;
    double bandwidth_hz = 20e6;
    double resource_bandwidth_hz = 360e3;  // 12 subcarriers x 30 kHz
    int resource_count = 55;
    double slot_duration_s = 0.5e-3;

    static BandPlan make(BandId band, double bandwidth_hz, double resource_bandwidth_hz,
                         double slot_duration_s) {
        if (bandwidth_hz <= 0 || resource_bandwidth_hz <= 0 || slot_duration_s <= 0) {
            throw std::invalid_argument("band plan values must be positive");
        }
        BandPlan p;
        p.band = band;
        p.bandwidth_hz = bandwidth_hz;
        p.resource_bandwidth_hz = resource_bandwidth_hz;
        p.resource_count = static_cast<int>(bandwidth_hz / resource_bandwidth_hz);
        p.slot_duration_s = slot_duration_s;
        if (p.resource_count < 1) {
            throw std::invalid_argument("band narrower than one resource");
        }
        return p;
    }
};

enum class FadingModel {
    Constant,  // SINR pinned at the mean; used for closed-form checks
    Rayleigh,  // exponentially distributed power around the mean
};

// Per-(link, resource, slot) SINR stream. Samples are pure functions of
// (seed, link, resource, slot), so concurrent evaluations of different
// schedules over the same channel realization agree exactly.
struct FadingProcess {
    FadingModel model = FadingModel::Rayleigh;
    double mean_sinr = 1000.0;  // linear
    std::uint64_t seed = 0;

    static FadingProcess rayleigh(double mean_sinr_db, std::uint64_t seed) {
        return FadingProcess{FadingModel::Rayleigh, std::pow(10.0, mean_sinr_db / 10.0), seed};
    }
    static FadingProcess constant(double mean_sinr_linear) {
        return FadingProcess{FadingModel::Constant, mean_sinr_linear, 0};
    }

    double sample(int link_id, int resource, std::int64_t slot) const {
        if (model == FadingModel::Constant) return mean_sinr;
        double u = unit_double_at(derive_key(seed, 0x5a17u, static_cast<std::uint64_t>(link_id),
                                             static_cast<std::uint64_t>(resource),
                                             static_cast<std::uint64_t>(slot)));
        // Rayleigh amplitude fading -> exponentially distributed power.
        return mean_sinr * (-std::log1p(-u));
    }
};

struct ChannelConfig {
    double ber = 1e-5;
    double mean_sinr_db = 30.0;
    double slot_duration_s = 0.5e-3;
    std::int64_t max_slots = 4000;  // scheduling horizon; transmissions may not cross it
    std::vector<BandPlan> band_plans;  // indexed by BandId::array_index()

    static ChannelConfig make_default() {
        ChannelConfig c;
        c.band_plans.resize(kBandCount);
        for (int z = 1; z <= kZoneCount; ++z) {
            c.band_plans[BandId::zone_band(z).array_index()] =
                BandPlan::make(BandId::zone_band(z), 20e6, 360e3, c.slot_duration_s);
        }
        c.band_plans[BandId::hpcu_band().array_index()] =
            BandPlan::make(BandId::hpcu_band(), 20e6, 360e3, c.slot_duration_s);
        return c;
    }

    const BandPlan& plan(BandId band) const { return band_plans.at(band.array_index()); }

    double mean_sinr_linear() const { return std::pow(10.0, mean_sinr_db / 10.0); }
};

// Transmission time of `size_bits` over a wired link.
inline double wired_tx_time(double size_bits, double rate_bps) {
    if (rate_bps <= 0) throw std::invalid_argument("wired rate must be positive");
    if (size_bits < 0) throw std::invalid_argument("size must be nonnegative");
    return size_bits / rate_bps;
}

// Shannon-style rate of one frequency resource, derated by the bit error rate.
inline double instantaneous_rate(double resource_bandwidth_hz, double sinr, double ber) {
    if (ber >= 1.0) return 0.0;
    return resource_bandwidth_hz * std::log2(1.0 + sinr) * (1.0 - ber);
}

// Total rate over a set of resources given their current SINR samples.
inline double link_rate(const BandPlan& plan, std::span<const int> resources,
                        std::span<const double> sinr_samples, double ber) {
    if (resources.size() != sinr_samples.size()) {
        throw std::invalid_argument("one SINR sample per allocated resource");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < resources.size(); ++i) {
        if (resources[i] < 0 || resources[i] >= plan.resource_count) {
            throw std::invalid_argument("resource index out of range");
        }
        total += instantaneous_rate(plan.resource_bandwidth_hz, sinr_samples[i], ber);
    }
    return total;
}

// Bits a link moves in one slot over the given resources (before the
// delivery trial).
inline double slot_bits(const BandPlan& plan, int link_id, std::span<const int> resources,
                        const FadingProcess& fading, std::int64_t slot, double ber) {
    double rate = 0.0;
    for (int r : resources) {
        if (r < 0 || r >= plan.resource_count) {
            throw std::invalid_argument("resource index out of range");
        }
        rate += instantaneous_rate(plan.resource_bandwidth_hz, fading.sample(link_id, r, slot), ber);
    }
    return rate * plan.slot_duration_s;
}

// Per-slot Bernoulli delivery stream for unreliable links.
struct DeliveryRng {
    std::uint64_t seed = 0;

    bool delivered(int link_id, std::int64_t slot, double reliability) const {
        if (reliability >= 1.0) return true;
        double u = unit_double_at(
            derive_key(seed, 0xde11u, static_cast<std::uint64_t>(link_id),
                       static_cast<std::uint64_t>(slot)));
        return u < reliability;
    }
};

struct TransmissionOutcome {
    bool completed = false;
    std::int64_t start_slot = 0;
    std::int64_t slots_used = 0;           // whole slots from start to completion
    std::int64_t retransmission_slots = 0; // wasted (undelivered) slots among them
    double duration_s = 0.0;               // slots_used * slot_duration
};

// Steps slot by slot from start_slot until the accumulated delivered bits
// reach size_bits, or the slot limit is hit. Durations are whole slots; the
// final partial slot is charged in full.
inline TransmissionOutcome wireless_tx_time(double size_bits, int link_id, const BandPlan& plan,
                                            std::span<const int> resources,
                                            const FadingProcess& fading, std::int64_t start_slot,
                                            double reliability, const DeliveryRng& delivery,
                                            double ber, std::int64_t slot_limit) {
    if (resources.empty()) throw std::invalid_argument("no resources allocated");
    if (size_bits <= 0) throw std::invalid_argument("size must be positive");

    TransmissionOutcome out;
    out.start_slot = start_slot;
    double acc = 0.0;
    for (std::int64_t slot = start_slot; slot < slot_limit; ++slot) {
        ++out.slots_used;
        if (delivery.delivered(link_id, slot, reliability)) {
            acc += slot_bits(plan, link_id, resources, fading, slot, ber);
        } else {
            ++out.retransmission_slots;
        }
        if (acc >= size_bits) {
            out.completed = true;
            break;
        }
    }
    out.duration_s = static_cast<double>(out.slots_used) * plan.slot_duration_s;
    return out;
}

}  // namespace ivnsim
