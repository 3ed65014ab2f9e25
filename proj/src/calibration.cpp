#include "esbsim/calibration.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace esbsim {

using nlohmann::json;

CalibrationSet CalibrationSet::calibrated_defaults() {
    CalibrationSet c;

    c.ble_power.system_off_uw = 5;
    c.ble_power.idle_standby_uw = 901; // keep-alive exchanges lift the observed average to 1.41 mW
    c.ble_power.cpu_active_uw = 4000;
    c.ble_power.radio_ramp_uw = 20000;
    c.ble_power.radio_tx_uw = 33500;
    c.ble_power.radio_rx_uw = 10000;
    c.ble_power.sensor_read_uw = 4500;

    c.esb_power = c.ble_power;
    c.esb_power.idle_standby_uw = 1150;

    c.ble_overhead = FrameOverhead::ble_default();
    c.esb_overhead = FrameOverhead::esb_default();

    c.curve(PhyMode::Ble1M) = {-93.0, 1.2};
    c.curve(PhyMode::Ble2M) = {-90.0, 1.2};
    c.curve(PhyMode::Esb1M) = {-91.0, 1.5};
    c.curve(PhyMode::Esb2M) = {-87.0, 1.8};
    c.curve(PhyMode::Esb4M) = {-83.0, 2.0};

    return c;
}

void CalibrationSet::validate() const {
    ble_power.validate();
    esb_power.validate();
    ble_overhead.validate();
    esb_overhead.validate();
    if (ble.conn_interval_us < 7500) {
        throw std::invalid_argument("conn_interval below 7.5 ms spec minimum");
    }
    // The faster PHY must be the less sensitive one.
    if (!(curve(PhyMode::Esb4M).rssi50_dbm > curve(PhyMode::Ble2M).rssi50_dbm)) {
        throw std::invalid_argument("require rssi50(ESB-4M) > rssi50(BLE-2M)");
    }
}

namespace {

json power_to_json(const PowerTable& p) {
    return json{{"system_off_uw", p.system_off_uw},
                {"idle_standby_uw", p.idle_standby_uw},
                {"cpu_active_uw", p.cpu_active_uw},
                {"radio_ramp_uw", p.radio_ramp_uw},
                {"radio_tx_uw", p.radio_tx_uw},
                {"radio_rx_uw", p.radio_rx_uw},
                {"sensor_read_uw", p.sensor_read_uw}};
}

void power_from_json(const json& j, PowerTable& p) {
    j.at("system_off_uw").get_to(p.system_off_uw);
    j.at("idle_standby_uw").get_to(p.idle_standby_uw);
    j.at("cpu_active_uw").get_to(p.cpu_active_uw);
    j.at("radio_ramp_uw").get_to(p.radio_ramp_uw);
    j.at("radio_tx_uw").get_to(p.radio_tx_uw);
    j.at("radio_rx_uw").get_to(p.radio_rx_uw);
    j.at("sensor_read_uw").get_to(p.sensor_read_uw);
}

json overhead_to_json(const FrameOverhead& o) {
    return json{{"preamble_bits", o.preamble_bits},
                {"address_bits", o.address_bits},
                {"header_bits", o.header_bits},
                {"crc_bits", o.crc_bits},
                {"upper_stack_bytes", o.upper_stack_bytes},
                {"ifs_or_turnaround_us", o.ifs_or_turnaround_us}};
}

void overhead_from_json(const json& j, FrameOverhead& o) {
    j.at("preamble_bits").get_to(o.preamble_bits);
    j.at("address_bits").get_to(o.address_bits);
    j.at("header_bits").get_to(o.header_bits);
    j.at("crc_bits").get_to(o.crc_bits);
    j.at("upper_stack_bytes").get_to(o.upper_stack_bytes);
    j.at("ifs_or_turnaround_us").get_to(o.ifs_or_turnaround_us);
}

} // namespace

std::string CalibrationSet::to_json() const {
    json j;
    j["version"] = version;
    j["tx_power_dbm"] = tx_power_dbm;
    j["ble_power"] = power_to_json(ble_power);
    j["esb_power"] = power_to_json(esb_power);
    j["ble_overhead"] = overhead_to_json(ble_overhead);
    j["esb_overhead"] = overhead_to_json(esb_overhead);

    j["ble"] = json{{"conn_interval_us", ble.conn_interval_us},
                    {"adv_interval_us", ble.adv_interval_us},
                    {"adv_jitter_max_us", ble.adv_jitter_max_us},
                    {"scan_interval_us", ble.scan_interval_us},
                    {"ce_guard_us", ble.ce_guard_us},
                    {"tifs_us", ble.tifs_us},
                    {"supervision_timeout_us", ble.supervision_timeout_us},
                    {"frame_prep_us", ble.frame_prep_us},
                    {"rx_proc_us", ble.rx_proc_us},
                    {"keepalive_cpu_us", ble.keepalive_cpu_us},
                    {"event_pre_cpu_us", ble.event_pre_cpu_us},
                    {"event_pre_idle_us", ble.event_pre_idle_us},
                    {"event_post_cpu_us", ble.event_post_cpu_us},
                    {"event_post_idle_us", ble.event_post_idle_us},
                    {"boot_cpu_us", ble.boot_cpu_us},
                    {"boot_ctrl_us", ble.boot_ctrl_us},
                    {"adv_tx_per_ch_us", ble.adv_tx_per_ch_us},
                    {"adv_rx_per_ch_us", ble.adv_rx_per_ch_us},
                    {"adv_event_cpu_us", ble.adv_event_cpu_us},
                    {"discovery_catch_prob", ble.discovery_catch_prob},
                    {"conn_rx_us", ble.conn_rx_us},
                    {"conn_cpu_us", ble.conn_cpu_us}};

    j["esb"] = json{{"ard_us", esb.ard_us},
                    {"arc", esb.arc},
                    {"turnaround_us", esb.turnaround_us},
                    {"ack_queue_depth", esb.ack_queue_depth},
                    {"prx_proc_us", esb.prx_proc_us},
                    {"duty_pre_cpu_us", esb.duty_pre_cpu_us},
                    {"duty_pre_ramp_us", esb.duty_pre_ramp_us},
                    {"duty_pre_arm_us", esb.duty_pre_arm_us},
                    {"duty_tail_cpu_us", esb.duty_tail_cpu_us},
                    {"duty_tail_idle_us", esb.duty_tail_idle_us},
                    {"stream_pre_ramp_us", esb.stream_pre_ramp_us},
                    {"stream_post_ramp_us", esb.stream_post_ramp_us},
                    {"boot_cpu_us", esb.boot_cpu_us},
                    {"boot_radio_us", esb.boot_radio_us}};

    j["node"] = json{{"sample_rate_hz", node.sample_rate_hz},
                     {"fifo_depth_words", node.fifo_depth_words},
                     {"word_bytes", node.word_bytes},
                     {"spi_read_us_per_word", node.spi_read_us_per_word},
                     {"ble_irq_cpu_us", node.ble_irq_cpu_us},
                     {"esb_irq_cpu_us", node.esb_irq_cpu_us},
                     {"ble_recording_uplift_uw", node.ble_recording_uplift_uw},
                     {"esb_recording_uplift_uw", node.esb_recording_uplift_uw},
                     {"onoff_wake_cpu_us", node.onoff_wake_cpu_us},
                     {"onoff_wake_radio_us", node.onoff_wake_radio_us},
                     {"onoff_teardown_us", node.onoff_teardown_us},
                     {"sensor_base_uw", node.sensor_base_uw},
                     {"sensor_read_uw", node.sensor_read_uw}};

    json curves;
    for (PhyMode m : {PhyMode::Ble1M, PhyMode::Ble2M, PhyMode::Esb1M, PhyMode::Esb2M, PhyMode::Esb4M}) {
        curves[to_string(m)] = json{{"rssi50_dbm", curve(m).rssi50_dbm},
                                    {"width_db", curve(m).width_db}};
    }
    j["per_curves"] = curves;

    return j.dump(2);
}

CalibrationSet CalibrationSet::from_json(const std::string& text) {
    json j = json::parse(text);
    CalibrationSet c = calibrated_defaults();
    j.at("version").get_to(c.version);
    j.at("tx_power_dbm").get_to(c.tx_power_dbm);
    power_from_json(j.at("ble_power"), c.ble_power);
    power_from_json(j.at("esb_power"), c.esb_power);
    overhead_from_json(j.at("ble_overhead"), c.ble_overhead);
    overhead_from_json(j.at("esb_overhead"), c.esb_overhead);

    const json& b = j.at("ble");
    b.at("conn_interval_us").get_to(c.ble.conn_interval_us);
    b.at("adv_interval_us").get_to(c.ble.adv_interval_us);
    b.at("adv_jitter_max_us").get_to(c.ble.adv_jitter_max_us);
    b.at("scan_interval_us").get_to(c.ble.scan_interval_us);
    b.at("ce_guard_us").get_to(c.ble.ce_guard_us);
    b.at("tifs_us").get_to(c.ble.tifs_us);
    b.at("supervision_timeout_us").get_to(c.ble.supervision_timeout_us);
    b.at("frame_prep_us").get_to(c.ble.frame_prep_us);
    b.at("rx_proc_us").get_to(c.ble.rx_proc_us);
    b.at("keepalive_cpu_us").get_to(c.ble.keepalive_cpu_us);
    b.at("event_pre_cpu_us").get_to(c.ble.event_pre_cpu_us);
    b.at("event_pre_idle_us").get_to(c.ble.event_pre_idle_us);
    b.at("event_post_cpu_us").get_to(c.ble.event_post_cpu_us);
    b.at("event_post_idle_us").get_to(c.ble.event_post_idle_us);
    b.at("boot_cpu_us").get_to(c.ble.boot_cpu_us);
    b.at("boot_ctrl_us").get_to(c.ble.boot_ctrl_us);
    b.at("adv_tx_per_ch_us").get_to(c.ble.adv_tx_per_ch_us);
    b.at("adv_rx_per_ch_us").get_to(c.ble.adv_rx_per_ch_us);
    b.at("adv_event_cpu_us").get_to(c.ble.adv_event_cpu_us);
    b.at("discovery_catch_prob").get_to(c.ble.discovery_catch_prob);
    b.at("conn_rx_us").get_to(c.ble.conn_rx_us);
    b.at("conn_cpu_us").get_to(c.ble.conn_cpu_us);

    const json& e = j.at("esb");
    e.at("ard_us").get_to(c.esb.ard_us);
    e.at("arc").get_to(c.esb.arc);
    e.at("turnaround_us").get_to(c.esb.turnaround_us);
    e.at("ack_queue_depth").get_to(c.esb.ack_queue_depth);
    e.at("prx_proc_us").get_to(c.esb.prx_proc_us);
    e.at("duty_pre_cpu_us").get_to(c.esb.duty_pre_cpu_us);
    e.at("duty_pre_ramp_us").get_to(c.esb.duty_pre_ramp_us);
    e.at("duty_pre_arm_us").get_to(c.esb.duty_pre_arm_us);
    e.at("duty_tail_cpu_us").get_to(c.esb.duty_tail_cpu_us);
    e.at("duty_tail_idle_us").get_to(c.esb.duty_tail_idle_us);
    e.at("stream_pre_ramp_us").get_to(c.esb.stream_pre_ramp_us);
    e.at("stream_post_ramp_us").get_to(c.esb.stream_post_ramp_us);
    e.at("boot_cpu_us").get_to(c.esb.boot_cpu_us);
    e.at("boot_radio_us").get_to(c.esb.boot_radio_us);

    const json& n = j.at("node");
    n.at("sample_rate_hz").get_to(c.node.sample_rate_hz);
    n.at("fifo_depth_words").get_to(c.node.fifo_depth_words);
    n.at("word_bytes").get_to(c.node.word_bytes);
    n.at("spi_read_us_per_word").get_to(c.node.spi_read_us_per_word);
    n.at("ble_irq_cpu_us").get_to(c.node.ble_irq_cpu_us);
    n.at("esb_irq_cpu_us").get_to(c.node.esb_irq_cpu_us);
    n.at("ble_recording_uplift_uw").get_to(c.node.ble_recording_uplift_uw);
    n.at("esb_recording_uplift_uw").get_to(c.node.esb_recording_uplift_uw);
    n.at("onoff_wake_cpu_us").get_to(c.node.onoff_wake_cpu_us);
    n.at("onoff_wake_radio_us").get_to(c.node.onoff_wake_radio_us);
    n.at("onoff_teardown_us").get_to(c.node.onoff_teardown_us);
    n.at("sensor_base_uw").get_to(c.node.sensor_base_uw);
    n.at("sensor_read_uw").get_to(c.node.sensor_read_uw);

    const json& curves = j.at("per_curves");
    for (PhyMode m : {PhyMode::Ble1M, PhyMode::Ble2M, PhyMode::Esb1M, PhyMode::Esb2M, PhyMode::Esb4M}) {
        const json& cj = curves.at(to_string(m));
        cj.at("rssi50_dbm").get_to(c.curve(m).rssi50_dbm);
        cj.at("width_db").get_to(c.curve(m).width_db);
    }

    c.validate();
    return c;
}

CalibrationSet CalibrationSet::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open calibration file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void CalibrationSet::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write calibration file: " + path);
    out << to_json() << "\n";
}

std::string CalibrationSet::hash() const {
    std::uint64_t h = RngStream::fnv1a(to_json());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "v%d:%016llx", version,
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string CalibrationResult::report_text() const {
    std::string out;
    char buf[256];
    out += "anchor                                  target      fitted    residual  tol    status\n";
    for (const auto& e : report) {
        std::snprintf(buf, sizeof(buf), "%-38s %11.4f %11.4f %8.2f%% %5.1f%%  %s\n",
                      e.anchor.c_str(), e.target, e.fitted, e.residual_rel * 100.0,
                      e.tolerance_rel * 100.0, e.within ? "ok" : "FAIL");
        out += buf;
    }
    if (!converged) {
        std::snprintf(buf, sizeof(buf),
                      "calibration failure: worst anchor '%s' residual %.2f%% above tolerance\n",
                      worst_anchor.c_str(), worst_residual * 100.0);
        out += buf;
    }
    return out;
}

namespace {

double objective(const CalibrationSet& c, const std::vector<CalibrationAnchor>& anchors,
                 std::vector<double>* values = nullptr) {
    double worst = 0.0;
    for (const auto& a : anchors) {
        double v = a.evaluate(c);
        if (values) values->push_back(v);
        double res = a.target == 0.0 ? std::fabs(v) : std::fabs(v - a.target) / std::fabs(a.target);
        // Residuals are compared in units of each anchor's tolerance so
        // a 5% anchor and a 15% anchor weigh equally.
        worst = std::max(worst, res / a.tolerance_rel);
    }
    return worst;
}

} // namespace

CalibrationResult calibrate(const CalibrationSet& start,
                            const std::vector<CalibrationAnchor>& anchors,
                            const std::vector<CalibrationParam>& params,
                            int max_sweeps) {
    CalibrationResult result;
    result.set = start;
    if (anchors.empty()) {
        result.converged = true;
        return result;
    }

    CalibrationSet best = start;
    double best_obj = objective(best, anchors);

    if (!params.empty()) {
        std::vector<double> steps;
        steps.reserve(params.size());
        for (const auto& p : params) {
            steps.push_back(p.initial_step > 0 ? p.initial_step : 0.1 * (p.hi - p.lo));
        }
        for (int sweep = 0; sweep < max_sweeps && best_obj > 1.0; ++sweep) {
            bool improved = false;
            for (std::size_t i = 0; i < params.size(); ++i) {
                const auto& p = params[i];
                double base = p.get(best);
                for (double dir : {+1.0, -1.0}) {
                    double trial_v = base + dir * steps[i];
                    if (trial_v < p.lo || trial_v > p.hi) continue;
                    CalibrationSet trial = best;
                    p.set(trial, trial_v);
                    double obj = objective(trial, anchors);
                    if (obj < best_obj) {
                        best = trial;
                        best_obj = obj;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) {
                bool any = false;
                for (auto& s : steps) {
                    s *= 0.5;
                    if (s > 1e-9) any = true;
                }
                if (!any) break;
            }
        }
    }

    result.set = best;
    std::vector<double> values;
    objective(best, anchors, &values);
    result.converged = true;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        CalibrationReportEntry e;
        e.anchor = anchors[i].name;
        e.target = anchors[i].target;
        e.fitted = values[i];
        e.residual_rel = anchors[i].target == 0.0
                             ? std::fabs(values[i])
                             : std::fabs(values[i] - anchors[i].target) / std::fabs(anchors[i].target);
        e.tolerance_rel = anchors[i].tolerance_rel;
        e.within = e.residual_rel <= e.tolerance_rel;
        if (!e.within) {
            result.converged = false;
            if (e.residual_rel > result.worst_residual) {
                result.worst_residual = e.residual_rel;
                result.worst_anchor = e.anchor;
            }
        }
        result.report.push_back(e);
    }
    return result;
}

} // namespace esbsim
