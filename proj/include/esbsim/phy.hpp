#pragma once

#include "esbsim/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace esbsim {

/// Physical-layer mode. BLE tops out at 2 Mbps; the proprietary ESB PHY
/// reaches 4 Mbps.
enum class PhyMode : std::uint8_t { Ble1M, Ble2M, Esb1M, Esb2M, Esb4M };

const char* to_string(PhyMode m);
PhyMode phy_from_string(const std::string& name);

constexpr bool is_ble(PhyMode m) { return m == PhyMode::Ble1M || m == PhyMode::Ble2M; }

/// Link bit rate in bits per microsecond (1, 2 or 4).
constexpr std::uint32_t bits_per_us(PhyMode m) {
    switch (m) {
        case PhyMode::Ble1M:
        case PhyMode::Esb1M: return 1;
        case PhyMode::Ble2M:
        case PhyMode::Esb2M: return 2;
        case PhyMode::Esb4M: return 4;
    }
    return 1;
}

constexpr std::uint32_t kBleMaxAppPayload = 244;
constexpr std::uint32_t kEsbMaxPayload = 252;

constexpr std::uint32_t max_payload_bytes(PhyMode m) {
    return is_ble(m) ? kBleMaxAppPayload : kEsbMaxPayload;
}

/// Frame framing costs around the application payload.
/// upper_stack_bytes models protocol headers above the link layer that
/// travel inside the payload field (L2CAP + ATT for BLE notifications);
/// ESB forwards the payload directly and carries none.
struct FrameOverhead {
    std::uint32_t preamble_bits = 0;
    std::uint32_t address_bits = 0;
    std::uint32_t header_bits = 0;
    std::uint32_t crc_bits = 0;
    std::uint32_t upper_stack_bytes = 0;
    std::uint32_t ifs_or_turnaround_us = 0;

    std::uint32_t framing_bits() const {
        return preamble_bits + address_bits + header_bits + crc_bits;
    }
    void validate() const {
        if (framing_bits() >= 8 * 300) {
            throw std::invalid_argument("FrameOverhead: framing exceeds sane bound");
        }
    }

    static FrameOverhead ble_default();  // 2B preamble, 4B AA, 2B header, 3B CRC, 7B stack, 150us IFS
    static FrameOverhead esb_default();  // 2B preamble, 5B addr, 9-bit PCF, 2B CRC, 40us turnaround
};

/// On-air duration of one frame, rounded up to whole microseconds.
/// Throws if the payload exceeds the protocol maximum for the PHY family.
std::uint32_t on_air_time_us(PhyMode phy, std::uint32_t payload_bytes, const FrameOverhead& ov);

/// Logistic packet-error curve: PER(rssi) = 1 / (1 + exp((rssi - rssi50) / width)).
/// Non-increasing in RSSI; PER = 0.5 at rssi50.
struct PerCurve {
    double rssi50_dbm = -90.0;
    double width_db = 2.0;

    double per(double rssi_dbm) const;
};

enum class DeliveryOutcome : std::uint8_t { Delivered, Lost };

/// Shared-medium state owned by one simulation instance: an RSSI
/// operating point, per-PHY error curves and a seeded loss stream.
/// Explicit PER overrides (per direction) serve forced-loss tests.
class ChannelState {
public:
    ChannelState(double rssi_dbm, RngStream loss_rng)
        : rssi_dbm_(rssi_dbm), rng_(loss_rng) {}

    void set_curve(PhyMode m, PerCurve c) { curves_[m] = c; }
    const PerCurve& curve(PhyMode m) const;

    void set_rssi(double rssi_dbm) { rssi_dbm_ = rssi_dbm; }
    double rssi() const { return rssi_dbm_; }

    /// Force a fixed PER for data frames / ack(response) frames,
    /// bypassing the RSSI curve. Used by tests and property sweeps.
    void force_data_per(std::optional<double> p) { forced_data_per_ = p; }
    void force_ack_per(std::optional<double> p) { forced_ack_per_ = p; }

    double data_per(PhyMode m) const;
    double ack_per(PhyMode m) const;

    DeliveryOutcome deliver_data(PhyMode m) { return draw(data_per(m)); }
    DeliveryOutcome deliver_ack(PhyMode m) { return draw(ack_per(m)); }

private:
    DeliveryOutcome draw(double per) {
        return rng_.bernoulli(per) ? DeliveryOutcome::Lost : DeliveryOutcome::Delivered;
    }

    double rssi_dbm_;
    RngStream rng_;
    std::map<PhyMode, PerCurve> curves_;
    std::optional<double> forced_data_per_;
    std::optional<double> forced_ack_per_;
};

} // namespace esbsim
