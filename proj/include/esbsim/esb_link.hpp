#pragma once

#include "esbsim/calibration.hpp"
#include "esbsim/phy.hpp"
#include "esbsim/power.hpp"
#include "esbsim/scheduler.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace esbsim {

/// Crc16-CCITT over the payload bytes; duplicate detection keys on
/// (pid, crc), never on payload content.
std::uint16_t crc16_ccitt(const std::vector<std::uint8_t>& data);

struct EsbPacket {
    std::uint64_t address = 0xE7E7E7E7E7ull; // single pipe
    std::uint8_t pid = 0;                    // 2-bit sequence counter
    bool no_ack = false;
    std::vector<std::uint8_t> payload;       // 0..252 bytes
    std::uint16_t crc = 0;
};

/// Transmission profile: a duty-cycled transmitter gates the radio off
/// after each event; a streaming transmitter keeps it armed between
/// back-to-back packets and pays a hot ramp per packet instead.
enum class EsbTxProfile : std::uint8_t { DutyCycled, Streaming };

struct EsbConfig {
    PhyMode phy = PhyMode::Esb4M;
    std::uint32_t ard_us = 600;
    std::uint32_t arc = 15;
    int tx_power_dbm = 8;
    std::uint32_t ack_queue_depth = 8;
    EsbTxProfile profile = EsbTxProfile::DutyCycled;

    void validate(const FrameOverhead& ov, std::uint32_t max_ack_payload) const {
        if (ard_us < on_air_time_us(phy, max_ack_payload, ov)) {
            throw std::invalid_argument(
                "ard_us must cover the on-air time of a maximal ack");
        }
    }
};

struct TransactionResult {
    bool acked = false;
    std::uint32_t attempts = 0;
    std::uint64_t duration_us = 0; // transmit start to ack received (or final timeout)
    std::vector<std::uint8_t> ack_payload;
    SimTime event_begin{0}; // power-event envelope, including pre/tail
    SimTime event_end{0};
};

/// Primary receiver: accepts frames on the pipe, deduplicates
/// retransmissions by (pid, crc), acknowledges everything, and
/// piggybacks queued reverse payloads on ack frames (FIFO order).
class EsbPrx {
public:
    using DeliverFn = std::function<void(const std::vector<std::uint8_t>&, SimTime)>;

    EsbPrx(const CalibrationSet& cal, DeliverFn on_deliver)
        : cal_(cal), on_deliver_(std::move(on_deliver)) {}

    /// Queue a payload for the next ack. Returns queue depth after the
    /// push. On overflow the oldest entry is rejected (dropped and
    /// counted) so the freshest data rides the ack.
    std::size_t queue_ack_payload(std::vector<std::uint8_t> payload, std::uint32_t depth_limit);

    /// Handle an arriving data frame; returns the ack payload to send
    /// (empty when the queue is empty). Duplicate frames are discarded
    /// without re-delivery but still acknowledged.
    std::vector<std::uint8_t> receive(const EsbPacket& pkt, SimTime deliver_at);

    std::uint64_t duplicates_discarded() const { return duplicates_; }
    std::uint64_t ack_payloads_rejected() const { return rejected_; }
    std::size_t ack_queue_size() const { return ack_queue_.size(); }

private:
    const CalibrationSet& cal_;
    DeliverFn on_deliver_;
    std::deque<std::vector<std::uint8_t>> ack_queue_;
    std::optional<std::pair<std::uint8_t, std::uint16_t>> last_accepted_;
    std::uint64_t duplicates_ = 0;
    std::uint64_t rejected_ = 0;
};

/// Primary transmitter: synchronous transaction walker over the shared
/// scheduler clock. A transaction is an atomic timed sequence (pre
/// phase, data on-air, turnaround, ack window, retries at ard spacing),
/// so the walk advances the scheduler to the transaction end.
class EsbPtx {
public:
    EsbPtx(Scheduler& sched, ChannelState& channel, EsbPrx& prx, const CalibrationSet& cal,
           EsbConfig cfg, PowerTrace* trace = nullptr);

    /// Run one complete transaction starting at the scheduler clock.
    /// Duration is measured from first transmit start; the power-event
    /// envelope additionally spans the profile's pre/tail phases.
    TransactionResult transact(std::vector<std::uint8_t> payload);

    /// Application-level one-way latency (send request to delivery at
    /// the receiver) for a payload of this size on a lossless channel.
    std::uint64_t lossless_latency_us(std::uint32_t payload_bytes) const;

    const EsbConfig& config() const { return cfg_; }
    std::uint64_t ack_payload_losses() const { return ack_losses_; }
    std::uint64_t transactions_failed() const { return failed_; }

private:
    void trace_state(SimTime t, PowerState s);

    Scheduler& sched_;
    ChannelState& channel_;
    EsbPrx& prx_;
    const CalibrationSet& cal_;
    EsbConfig cfg_;
    PowerTrace* trace_;
    std::uint8_t pid_ = 0;
    std::uint64_t ack_losses_ = 0;
    std::uint64_t failed_ = 0;
};

} // namespace esbsim
