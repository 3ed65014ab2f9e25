#pragma once

#include "esbsim/sim_time.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace esbsim {

enum class PowerState : std::uint8_t {
    SystemOff,
    IdleStandby,
    CpuActive,
    RadioRamp,
    RadioTx,
    RadioRx,
    SensorRead,
};

const char* to_string(PowerState s);

/// Per-state draw in microwatts. Integer microwatts keep every energy
/// integral exact: dwell_us * power_uw is an exact picojoule count.
struct PowerTable {
    std::uint64_t system_off_uw = 5;
    std::uint64_t idle_standby_uw = 1150;
    std::uint64_t cpu_active_uw = 4000;
    std::uint64_t radio_ramp_uw = 20000;
    std::uint64_t radio_tx_uw = 33500;
    std::uint64_t radio_rx_uw = 10000;
    std::uint64_t sensor_read_uw = 4500;

    std::uint64_t lookup_uw(PowerState s) const;

    /// SystemOff < IdleStandby < CpuActive < RadioTx must hold.
    void validate() const;
};

/// Time-ordered sequence of power-state dwells. Segments are
/// non-overlapping and gap-free between the first annotation and the
/// trace end; each segment implicitly ends where the next starts.
class PowerTrace {
public:
    explicit PowerTrace(PowerTable table) : table_(table) {}

    /// Enter `state` at time t. Consecutive annotations must be
    /// non-decreasing in time; zero-length dwells are dropped.
    void set_state(SimTime t, PowerState state);

    /// Close the trace at time t (no further annotations accepted).
    void finish(SimTime t);

    bool empty() const { return segments_.empty(); }
    SimTime coverage_begin() const;
    SimTime coverage_end() const;

    /// Exact integral of power over [t0, t1], in picojoules.
    /// The window must lie inside the annotated coverage.
    std::uint64_t integrate_pj(SimTime t0, SimTime t1) const;

    double integrate_uj(SimTime t0, SimTime t1) const {
        return static_cast<double>(integrate_pj(t0, t1)) / 1e6;
    }

    /// Mean power over [t0, t1] in milliwatts; t1 must exceed t0.
    double average_mw(SimTime t0, SimTime t1) const;

    /// Highest state draw observed in [t0, t1], in milliwatts.
    double peak_mw(SimTime t0, SimTime t1) const;

    /// Rows of (t_us, state, power_mw), one per segment, for export.
    std::string to_csv() const;

    const PowerTable& table() const { return table_; }

private:
    struct Segment {
        SimTime start;
        PowerState state;
    };

    std::vector<Segment> segments_;
    PowerTable table_;
    bool finished_ = false;
    SimTime end_{0};
};

} // namespace esbsim
