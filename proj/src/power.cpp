#include "esbsim/power.hpp"

#include <algorithm>
#include <cstdio>

namespace esbsim {

const char* to_string(PowerState s) {
    switch (s) {
        case PowerState::SystemOff: return "SystemOff";
        case PowerState::IdleStandby: return "IdleStandby";
        case PowerState::CpuActive: return "CpuActive";
        case PowerState::RadioRamp: return "RadioRamp";
        case PowerState::RadioTx: return "RadioTx";
        case PowerState::RadioRx: return "RadioRx";
        case PowerState::SensorRead: return "SensorRead";
    }
    return "?";
}

std::uint64_t PowerTable::lookup_uw(PowerState s) const {
    switch (s) {
        case PowerState::SystemOff: return system_off_uw;
        case PowerState::IdleStandby: return idle_standby_uw;
        case PowerState::CpuActive: return cpu_active_uw;
        case PowerState::RadioRamp: return radio_ramp_uw;
        case PowerState::RadioTx: return radio_tx_uw;
        case PowerState::RadioRx: return radio_rx_uw;
        case PowerState::SensorRead: return sensor_read_uw;
    }
    return 0;
}

void PowerTable::validate() const {
    if (!(system_off_uw < idle_standby_uw && idle_standby_uw < cpu_active_uw &&
          cpu_active_uw < radio_tx_uw)) {
        throw std::invalid_argument(
            "PowerTable: require SystemOff < IdleStandby < CpuActive < RadioTx");
    }
}

void PowerTrace::set_state(SimTime t, PowerState state) {
    if (finished_) throw std::logic_error("PowerTrace: annotation after finish()");
    if (!segments_.empty()) {
        if (t < segments_.back().start) {
            throw std::logic_error("PowerTrace: annotations must be time-ordered");
        }
        if (t == segments_.back().start) {
            segments_.back().state = state; // zero-length dwell collapses
            return;
        }
        if (segments_.back().state == state) {
            return; // merge equal adjacent states
        }
    }
    segments_.push_back({t, state});
}

void PowerTrace::finish(SimTime t) {
    if (segments_.empty()) throw std::logic_error("PowerTrace: finish on empty trace");
    if (t < segments_.back().start) {
        throw std::logic_error("PowerTrace: finish precedes last annotation");
    }
    end_ = t;
    finished_ = true;
}

SimTime PowerTrace::coverage_begin() const {
    if (segments_.empty()) throw std::logic_error("PowerTrace: empty");
    return segments_.front().start;
}

SimTime PowerTrace::coverage_end() const {
    if (!finished_) throw std::logic_error("PowerTrace: not finished");
    return end_;
}

std::uint64_t PowerTrace::integrate_pj(SimTime t0, SimTime t1) const {
    if (t0 > t1) throw std::invalid_argument("integrate: t0 > t1");
    if (segments_.empty() || !finished_) {
        throw std::out_of_range("integrate: trace has no coverage");
    }
    if (t0 < coverage_begin() || t1 > end_) {
        throw std::out_of_range("integrate: window outside trace coverage");
    }
    std::uint64_t total_pj = 0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        std::uint64_t seg_begin = segments_[i].start.us;
        std::uint64_t seg_end = (i + 1 < segments_.size()) ? segments_[i + 1].start.us : end_.us;
        std::uint64_t lo = std::max(seg_begin, t0.us);
        std::uint64_t hi = std::min(seg_end, t1.us);
        if (hi > lo) {
            total_pj += (hi - lo) * table_.lookup_uw(segments_[i].state);
        }
    }
    return total_pj;
}

double PowerTrace::average_mw(SimTime t0, SimTime t1) const {
    if (t1 <= t0) throw std::invalid_argument("average_power: empty window");
    double uj = integrate_uj(t0, t1);
    double ms = static_cast<double>(t1.us - t0.us) / 1000.0;
    return uj / ms;
}

double PowerTrace::peak_mw(SimTime t0, SimTime t1) const {
    if (t0 > t1) throw std::invalid_argument("peak: t0 > t1");
    if (segments_.empty() || !finished_) throw std::out_of_range("peak: no coverage");
    std::uint64_t peak_uw = 0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        std::uint64_t seg_begin = segments_[i].start.us;
        std::uint64_t seg_end = (i + 1 < segments_.size()) ? segments_[i + 1].start.us : end_.us;
        if (seg_end > t0.us && seg_begin < t1.us) {
            peak_uw = std::max(peak_uw, table_.lookup_uw(segments_[i].state));
        }
    }
    return static_cast<double>(peak_uw) / 1000.0;
}

std::string PowerTrace::to_csv() const {
    std::string out = "t_us,state,power_mw\n";
    char buf[96];
    for (const auto& seg : segments_) {
        std::snprintf(buf, sizeof(buf), "%llu,%s,%.3f\n",
                      static_cast<unsigned long long>(seg.start.us), to_string(seg.state),
                      static_cast<double>(table_.lookup_uw(seg.state)) / 1000.0);
        out += buf;
    }
    return out;
}

} // namespace esbsim
