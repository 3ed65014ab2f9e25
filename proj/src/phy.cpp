#include "esbsim/phy.hpp"

#include <cmath>

namespace esbsim {

const char* to_string(PhyMode m) {
    switch (m) {
        case PhyMode::Ble1M: return "BLE-1M";
        case PhyMode::Ble2M: return "BLE-2M";
        case PhyMode::Esb1M: return "ESB-1M";
        case PhyMode::Esb2M: return "ESB-2M";
        case PhyMode::Esb4M: return "ESB-4M";
    }
    return "?";
}

PhyMode phy_from_string(const std::string& name) {
    if (name == "BLE-1M") return PhyMode::Ble1M;
    if (name == "BLE-2M") return PhyMode::Ble2M;
    if (name == "ESB-1M") return PhyMode::Esb1M;
    if (name == "ESB-2M") return PhyMode::Esb2M;
    if (name == "ESB-4M") return PhyMode::Esb4M;
    throw std::invalid_argument("unknown PHY mode: " + name + " (note: BLE has no 4M PHY)");
}

FrameOverhead FrameOverhead::ble_default() {
    FrameOverhead ov;
    ov.preamble_bits = 16;
    ov.address_bits = 32;
    ov.header_bits = 16;
    ov.crc_bits = 24;
    ov.upper_stack_bytes = 7; // L2CAP 4 + ATT 3
    ov.ifs_or_turnaround_us = 150;
    return ov;
}

FrameOverhead FrameOverhead::esb_default() {
    FrameOverhead ov;
    ov.preamble_bits = 16;
    ov.address_bits = 40;
    ov.header_bits = 9; // packet control field
    ov.crc_bits = 16;
    ov.upper_stack_bytes = 0;
    ov.ifs_or_turnaround_us = 40;
    return ov;
}

std::uint32_t on_air_time_us(PhyMode phy, std::uint32_t payload_bytes, const FrameOverhead& ov) {
    if (payload_bytes > max_payload_bytes(phy)) {
        throw std::invalid_argument("payload exceeds protocol maximum for " +
                                    std::string(to_string(phy)));
    }
    ov.validate();
    std::uint64_t bits =
        ov.framing_bits() + 8ull * (payload_bytes + ov.upper_stack_bytes);
    std::uint32_t rate = bits_per_us(phy);
    return static_cast<std::uint32_t>((bits + rate - 1) / rate);
}

double PerCurve::per(double rssi_dbm) const {
    return 1.0 / (1.0 + std::exp((rssi_dbm - rssi50_dbm) / width_db));
}

const PerCurve& ChannelState::curve(PhyMode m) const {
    auto it = curves_.find(m);
    if (it == curves_.end()) {
        throw std::invalid_argument("no PER curve configured for PHY");
    }
    return it->second;
}

double ChannelState::data_per(PhyMode m) const {
    if (forced_data_per_) return *forced_data_per_;
    if (rssi_dbm_ < -120.0 || rssi_dbm_ > 0.0) {
        throw std::invalid_argument("rssi outside [-120, 0] dBm");
    }
    return curve(m).per(rssi_dbm_);
}

double ChannelState::ack_per(PhyMode m) const {
    if (forced_ack_per_) return *forced_ack_per_;
    // Symmetric link: ack/response frames see the same curve as data.
    if (forced_data_per_) return *forced_data_per_;
    if (rssi_dbm_ < -120.0 || rssi_dbm_ > 0.0) {
        throw std::invalid_argument("rssi outside [-120, 0] dBm");
    }
    return curve(m).per(rssi_dbm_);
}

} // namespace esbsim
