#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "abrsim/analytic.hpp"
#include "abrsim/scenario.hpp"

namespace abrsim {
namespace csv {

// Fixed formats throughout so identical runs serialize to identical bytes.

inline std::string format_micros(SimTime t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", t.micros());
    return buf;
}

inline std::string format_ratio(double r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", r);
    return buf;
}

inline std::string trace_csv(const RunResult& r) {
    std::string out = "time_us,queue_cells\n";
    for (const TracePoint& p : r.trace) {
        out += format_micros(p.at);
        out += ',';
        out += std::to_string(p.queue_cells);
        out += '\n';
    }
    return out;
}

inline analytic::Inputs analytic_inputs(const ScenarioConfig& cfg) {
    analytic::Inputs in;
    in.n = cfg.n_sources;
    in.mss = cfg.mss;
    in.t_us = cfg.segment_period.ps / 1'000'000;
    in.g_us = cfg.source_stagger.ps / 1'000'000;
    in.cwnd_max = cfg.cwnd_max;
    return in;
}

inline const char* summary_header() {
    return "n,mss,t_us,g_us,d_km,q_max_cells,q_max_time_us,analytic_cells,ratio\n";
}

inline std::string summary_row(const RunResult& r) {
    const ScenarioConfig& cfg = r.config;
    std::int64_t predicted = analytic::predict(analytic_inputs(cfg));
    double ratio = static_cast<double>(r.q_max) / static_cast<double>(predicted);
    std::string out;
    out += std::to_string(cfg.n_sources);
    out += ',';
    out += std::to_string(cfg.mss);
    out += ',';
    out += std::to_string(cfg.segment_period.ps / 1'000'000);
    out += ',';
    out += std::to_string(cfg.source_stagger.ps / 1'000'000);
    out += ',';
    out += std::to_string(static_cast<std::int64_t>(cfg.hop_km));
    out += ',';
    out += std::to_string(r.q_max);
    out += ',';
    out += format_micros(r.q_max_time);
    out += ',';
    out += std::to_string(predicted);
    out += ',';
    out += format_ratio(ratio);
    out += '\n';
    return out;
}

inline std::string summary_csv(const RunResult& r) {
    return summary_header() + summary_row(r);
}

}  // namespace csv
}  // namespace abrsim
