#pragma once

#include "esbsim/phy.hpp"
#include "esbsim/power.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace esbsim {

/// BLE timing and firmware-cost constants. Durations in microseconds.
struct BleConstants {
    std::uint32_t conn_interval_us = 7500;
    std::uint32_t adv_interval_us = 20000;
    std::uint32_t adv_jitter_max_us = 10000;
    std::uint32_t scan_interval_us = 2500;
    std::uint32_t ce_guard_us = 300;
    std::uint32_t tifs_us = 150;
    std::uint64_t supervision_timeout_us = 4000000;

    /// Stack cost to stage one data PDU inside a connection event.
    std::uint32_t frame_prep_us = 300;
    /// Receiver-side processing between last bit and app delivery.
    std::uint32_t rx_proc_us = 100;
    /// Keep-alive bookkeeping per idle connection event.
    std::uint32_t keepalive_cpu_us = 100;

    // Envelope of a solitary data event as seen on a power trace:
    // wake burst + settle before the connection event, wind-down after.
    std::uint32_t event_pre_cpu_us = 40;
    std::uint32_t event_pre_idle_us = 360;
    std::uint32_t event_post_cpu_us = 40;
    std::uint32_t event_post_idle_us = 618;

    // Warm-up path: program/controller boot, advertising, connection.
    std::uint32_t boot_cpu_us = 42810;
    std::uint32_t boot_ctrl_us = 20450;
    std::uint32_t adv_tx_per_ch_us = 32;   // one advertising PDU per channel
    std::uint32_t adv_rx_per_ch_us = 180;  // response window per channel
    std::uint32_t adv_event_cpu_us = 300;
    double discovery_catch_prob = 0.2;     // scanner catches a given adv event
    std::uint32_t conn_rx_us = 180;        // connect indication reception
    std::uint32_t conn_cpu_us = 29620;     // connection setup processing

    std::uint32_t adv_event_duration_us() const {
        return 3 * (adv_tx_per_ch_us + adv_rx_per_ch_us) + adv_event_cpu_us;
    }
};

/// ESB timing and firmware-cost constants.
struct EsbConstants {
    std::uint32_t ard_us = 600;
    std::uint32_t arc = 15;
    std::uint32_t turnaround_us = 40;
    std::uint32_t ack_queue_depth = 8;

    /// Receiver-side processing between last bit and app delivery.
    std::uint32_t prx_proc_us = 71;

    // Duty-cycled profile: the radio is gated off after each event and
    // the tail winds down through low-power housekeeping.
    std::uint32_t duty_pre_cpu_us = 30;
    std::uint32_t duty_pre_ramp_us = 20;
    std::uint32_t duty_pre_arm_us = 50;   // idle wait for the TX slot
    std::uint32_t duty_tail_cpu_us = 30;
    std::uint32_t duty_tail_idle_us = 580;

    // Streaming profile: back-to-back transactions keep the radio armed;
    // every packet pays a hot ramp-in and hot teardown instead.
    std::uint32_t stream_pre_ramp_us = 150;
    std::uint32_t stream_post_ramp_us = 240;

    // Cold-boot path (wake from power-off to ready-to-transmit).
    std::uint32_t boot_cpu_us = 21000;
    std::uint32_t boot_radio_us = 1410;

    std::uint32_t duty_pre_total_us() const {
        return duty_pre_cpu_us + duty_pre_ramp_us + duty_pre_arm_us;
    }
    std::uint32_t duty_tail_total_us() const {
        return duty_tail_cpu_us + duty_tail_idle_us;
    }
};

/// Loop-recorder node constants (sampling, FIFO service, per-mode
/// firmware costs fitted to the measured power-vs-threshold curves).
struct NodeConstants {
    std::uint32_t sample_rate_hz = 128;
    std::uint32_t fifo_depth_words = 32;
    std::uint32_t word_bytes = 3;
    std::uint32_t spi_read_us_per_word = 8;

    // Per-interrupt service CPU cost, per communication mode.
    std::uint32_t ble_irq_cpu_us = 7310;
    std::uint32_t esb_irq_cpu_us = 4371;

    // Elevated sleep floor while a recording session holds SPI/GPIO/RTC
    // infrastructure powered (added to the protocol idle draw).
    std::uint64_t ble_recording_uplift_uw = 489;
    std::uint64_t esb_recording_uplift_uw = 39;

    // ESB on/off mode: GPIO wake, re-init, teardown back to System OFF.
    std::uint32_t onoff_wake_cpu_us = 11000;
    std::uint32_t onoff_wake_radio_us = 2000;
    std::uint32_t onoff_teardown_us = 8000;

    // Sensor rail (separately powered and separately traced).
    std::uint64_t sensor_base_uw = 485;
    std::uint64_t sensor_read_uw = 640;
};

/// Full calibration set: every constant fitted against the reference
/// hardware measurements, plus the structural defaults they adjust.
struct CalibrationSet {
    int version = 1;

    PowerTable ble_power;  // idle_standby holds the connected sleep floor
    PowerTable esb_power;

    BleConstants ble;
    EsbConstants esb;
    NodeConstants node;

    FrameOverhead ble_overhead;
    FrameOverhead esb_overhead;

    PerCurve per_curves[5]; // indexed by PhyMode

    int tx_power_dbm = 8;

    static CalibrationSet calibrated_defaults();

    const PerCurve& curve(PhyMode m) const { return per_curves[static_cast<int>(m)]; }
    PerCurve& curve(PhyMode m) { return per_curves[static_cast<int>(m)]; }

    void validate() const;

    std::string to_json() const;
    static CalibrationSet from_json(const std::string& text);
    static CalibrationSet load_file(const std::string& path);
    void save_file(const std::string& path) const;

    /// Version-prefixed FNV-1a hash over the canonical JSON dump; tags
    /// every result row so outputs are traceable to the constants.
    std::string hash() const;
};

/// One calibration anchor: a scenario metric with a measured target.
struct CalibrationAnchor {
    std::string name;
    double target = 0.0;
    double tolerance_rel = 0.05;
    std::function<double(const CalibrationSet&)> evaluate;
};

/// A scalar degree of freedom the fitter may adjust.
struct CalibrationParam {
    std::string name;
    std::function<double(const CalibrationSet&)> get;
    std::function<void(CalibrationSet&, double)> set;
    double lo = 0.0;
    double hi = 1.0;
    double initial_step = 0.0; // 0 => 10% of range
};

struct CalibrationReportEntry {
    std::string anchor;
    double target = 0.0;
    double fitted = 0.0;
    double residual_rel = 0.0;
    double tolerance_rel = 0.0;
    bool within = false;
};

struct CalibrationResult {
    CalibrationSet set;
    std::vector<CalibrationReportEntry> report;
    bool converged = true;
    std::string worst_anchor;
    double worst_residual = 0.0;

    std::string report_text() const;
};

/// Deterministic coordinate-descent fit minimizing the maximum relative
/// residual across anchors. Fixed parameter order and step schedule, no
/// randomness: the same inputs always produce the same fitted set.
/// An empty anchor list returns `start` unchanged.
CalibrationResult calibrate(const CalibrationSet& start,
                            const std::vector<CalibrationAnchor>& anchors,
                            const std::vector<CalibrationParam>& params,
                            int max_sweeps = 40);

} // namespace esbsim
