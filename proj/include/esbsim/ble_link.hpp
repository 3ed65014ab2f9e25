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

enum class BleSide : std::uint8_t { Central, Peripheral };
enum class BlePhase : std::uint8_t { Standby, Advertising, Connected };

struct BleLinkOptions {
    PhyMode phy = PhyMode::Ble2M;
    BleSide traced_side = BleSide::Central; // where the power probe sits
    std::size_t tx_queue_depth = 64;
    bool scanner_always_catches = false; // deterministic discovery (tests)
    bool zero_adv_jitter = false;
};

struct ConnectionEventReport {
    SimTime ce_start{0};
    std::uint32_t frames_m2s = 0; // data PDUs accepted per direction
    std::uint32_t frames_s2m = 0;
    std::uint64_t airtime_us = 0; // first preamble to last bit
    bool empty_pdu = false;       // both queues empty at event start
    bool closed_by_loss = false;
};

struct BleWarmupReport {
    std::uint64_t t_established_us = 0;
    double boot_energy_uj = 0.0;
    double advertising_energy_uj = 0.0;
    double connection_energy_uj = 0.0;
    std::uint32_t adv_events = 0;
};

struct BleDelivery {
    BleSide from;
    std::uint32_t payload_bytes = 0;
    SimTime enqueued{0};
    SimTime delivered{0};
    std::uint64_t payload_id = 0;
};

/// Connection-oriented link pair simulated as one actor: both ends'
/// queues and sequence state live here, frames cross the shared loss
/// channel, and connection events are walked synchronously at exact
/// conn-interval anchors. The traced side's power states are recorded.
class BleConnection {
public:
    using DeliveryFn = std::function<void(const BleDelivery&)>;
    using CeBeginFn = std::function<void()>;

    BleConnection(Scheduler& sched, ChannelState& channel, const CalibrationSet& cal,
                  BleLinkOptions opt, PowerTrace* trace = nullptr);

    /// Start in Standby and run discovery: boot, jittered advertising
    /// events caught by the scanner with the calibrated probability,
    /// then connection setup. Connection events begin at the returned
    /// establishment time.
    BleWarmupReport advertise_and_connect(RngStream rng);

    /// Skip discovery: consider the link established at time t (the CE
    /// anchor). Used by steady-state experiments.
    void establish_at(SimTime t);

    /// Queue an application payload. Returns false on backpressure
    /// (queue full) or when not connected; oversize payloads throw.
    bool notify(BleSide from, std::uint32_t payload_bytes);

    void set_delivery_callback(DeliveryFn fn) { on_delivery_ = std::move(fn); }
    void set_ce_begin_callback(CeBeginFn fn) { on_ce_begin_ = std::move(fn); }

    BlePhase phase() const { return phase_; }
    const std::vector<ConnectionEventReport>& reports() const { return reports_; }
    std::uint64_t duplicates_discarded() const { return duplicates_; }
    SimTime ce_anchor() const { return anchor_; }

    /// Stop scheduling further connection events (end of scenario).
    void shutdown();

    std::size_t queue_size(BleSide side) const {
        return side == BleSide::Central ? m2s_.size() : s2m_.size();
    }

private:
    struct QueuedPayload {
        std::uint32_t bytes = 0;
        SimTime enqueued{0};
        std::uint64_t id = 0;
        bool in_flight = false;
        std::uint8_t sn = 0;
    };
    struct SeqState {
        std::uint8_t sn = 0;   // sequence for the next new data PDU
        std::uint8_t nesn = 0; // sequence expected next from the peer
    };

    void schedule_next_ce();
    void run_connection_event();
    void trace_state(SimTime t, PowerState s);
    std::uint32_t data_air_us(std::uint32_t payload_bytes) const;
    std::uint32_t empty_air_us() const;

    Scheduler& sched_;
    ChannelState& channel_;
    const CalibrationSet& cal_;
    BleLinkOptions opt_;
    PowerTrace* trace_;

    BlePhase phase_ = BlePhase::Standby;
    SimTime anchor_{0};
    std::uint64_t ce_index_ = 0;
    EventHandle ce_handle_{};
    bool running_ = false;

    std::deque<QueuedPayload> m2s_;
    std::deque<QueuedPayload> s2m_;
    SeqState central_;
    SeqState peripheral_;

    std::uint32_t silent_ces_ = 0;
    std::uint64_t next_payload_id_ = 1;
    std::uint64_t duplicates_ = 0;
    SimTime last_trace_t_{0};

    DeliveryFn on_delivery_;
    CeBeginFn on_ce_begin_;
    std::vector<ConnectionEventReport> reports_;
    bool keep_reports_ = true;

public:
    /// Long scenarios disable per-CE report retention.
    void set_keep_reports(bool keep) { keep_reports_ = keep; }
};

} // namespace esbsim
