#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "abrsim/analytic.hpp"
#include "abrsim/config_file.hpp"
#include "abrsim/csv.hpp"
#include "abrsim/scenario.hpp"

namespace abrsim {
namespace cli {

struct Options {
    std::vector<int> sources;
    int mss = 512;
    double t_ms = 1.0;
    std::int64_t g_us = 50;
    double distance_km = 1000.0;
    std::int64_t cwnd_max = 65536;
    int build_segments = 1000;
    double duration_ms = 0.0;  // 0: derived from the scenario
    int nrm = 32;
    double erica_t0_us = 500.0;
    double erica_a = 1.15;
    double erica_b = 1.05;
    double erica_qdlf = 0.5;
    double erica_interval_us = 1000.0;
    std::string trace_path;
    std::string output_path;
    std::string config_path;
    int jobs = 1;
};

inline ScenarioConfig to_scenario_config(const Options& o, int n) {
    ScenarioConfig cfg;
    cfg.n_sources = n;
    cfg.mss = o.mss;
    cfg.segment_period = from_seconds(o.t_ms * 1e-3);
    cfg.source_stagger = usec(o.g_us);
    cfg.hop_km = o.distance_km;
    cfg.cwnd_max = o.cwnd_max;
    cfg.rcvwnd = std::max<std::int64_t>(o.cwnd_max, 65536);
    cfg.build_segments = o.build_segments;
    cfg.duration = from_seconds(o.duration_ms * 1e-3);
    cfg.nrm = o.nrm;
    cfg.erica.t0 = from_seconds(o.erica_t0_us * 1e-6);
    cfg.erica.a = o.erica_a;
    cfg.erica.b = o.erica_b;
    cfg.erica.qdlf = o.erica_qdlf;
    cfg.erica.interval = from_seconds(o.erica_interval_us * 1e-6);
    return cfg;
}

inline analytic::Inputs to_analytic_inputs(const Options& o, int n) {
    analytic::Inputs in;
    in.n = n;
    in.mss = o.mss;
    in.t_us = std::llround(o.t_ms * 1000.0);
    in.g_us = o.g_us;
    in.cwnd_max = o.cwnd_max;
    return in;
}

namespace detail {

inline void apply_config_value(Options& o, const std::string& key,
                               const std::string& value) {
    auto as_int = [&] { return std::stoll(value); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "sources") {
        o.sources.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) o.sources.push_back(static_cast<int>(std::stoll(item)));
    } else if (key == "mss") {
        o.mss = static_cast<int>(as_int());
    } else if (key == "t-ms") {
        o.t_ms = as_double();
    } else if (key == "g-us") {
        o.g_us = as_int();
    } else if (key == "distance-km") {
        o.distance_km = as_double();
    } else if (key == "cwnd-max") {
        o.cwnd_max = as_int();
    } else if (key == "build-segments") {
        o.build_segments = static_cast<int>(as_int());
    } else if (key == "duration-ms") {
        o.duration_ms = as_double();
    } else if (key == "nrm") {
        o.nrm = static_cast<int>(as_int());
    } else if (key == "erica-t0-us") {
        o.erica_t0_us = as_double();
    } else if (key == "erica-a") {
        o.erica_a = as_double();
    } else if (key == "erica-b") {
        o.erica_b = as_double();
    } else if (key == "erica-qdlf") {
        o.erica_qdlf = as_double();
    } else if (key == "erica-interval-us") {
        o.erica_interval_us = as_double();
    } else if (key == "trace") {
        o.trace_path = value;
    } else if (key == "output") {
        o.output_path = value;
    } else if (key == "jobs") {
        o.jobs = static_cast<int>(as_int());
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

inline void load_config_if_given(Options& o, int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string path;
        if (arg == "--config") {
            if (i + 1 >= argc)
                throw std::invalid_argument("--config needs a file path");
            path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            path = arg.substr(9);
        } else {
            continue;
        }
        for (const auto& [k, v] : parse_config_file(path))
            apply_config_value(o, k, v);
        return;
    }
}

inline void add_scenario_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--sources", o.sources,
                    "connection count(s), comma separated where a list is accepted")
        ->delimiter(',');
    cmd->add_option("--mss", o.mss, "TCP segment payload bytes");
    cmd->add_option("--t-ms", o.t_ms, "gap between one source's writes, ms");
    cmd->add_option("--g-us", o.g_us, "stagger between adjacent sources, us");
    cmd->add_option("--distance-km", o.distance_km, "length of every hop, km");
    cmd->add_option("--cwnd-max", o.cwnd_max, "window cap dumped at burst time, bytes");
    cmd->add_option("--build-segments", o.build_segments, "writes before the burst");
    cmd->add_option("--duration-ms", o.duration_ms,
                    "simulated time; 0 runs to burst + 5 round trips");
    cmd->add_option("--nrm", o.nrm, "cell slots per forward RM cell");
    cmd->add_option("--erica-t0-us", o.erica_t0_us, "switch target queueing delay, us");
    cmd->add_option("--erica-a", o.erica_a, "queue control over-allocation at zero queue");
    cmd->add_option("--erica-b", o.erica_b, "queue control drain slope above target");
    cmd->add_option("--erica-qdlf", o.erica_qdlf, "queue control floor");
    cmd->add_option("--erica-interval-us", o.erica_interval_us,
                    "switch measurement interval, us");
    cmd->add_option("--config", o.config_path,
                    "defaults file, one key = value per line (flags win)");
}

inline int single_n(const Options& o) {
    if (o.sources.size() != 1)
        throw std::invalid_argument("expected exactly one --sources value");
    return o.sources.front();
}

inline std::vector<int> n_list_or_reference(const Options& o) {
    return o.sources.empty() ? analytic::reference_n_values() : o.sources;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

}  // namespace detail

// One simulation; summary CSV on stdout, optionally to --output, cell-level
// bottleneck queue trace to --trace.
inline int cmd_run(const Options& o, std::ostream& out) {
    RunResult r = run_scenario(to_scenario_config(o, detail::single_n(o)));
    std::string summary = csv::summary_csv(r);
    out << summary;
    if (!o.output_path.empty()) detail::write_file(o.output_path, summary);
    if (!o.trace_path.empty()) detail::write_file(o.trace_path, csv::trace_csv(r));
    return 0;
}

// Closed-form predictions only: the reference N grid when --sources is
// omitted, otherwise the given list.
inline int cmd_analytic(const Options& o, std::ostream& out) {
    std::string text = "n,analytic_cells\n";
    for (int n : detail::n_list_or_reference(o)) {
        text += std::to_string(n);
        text += ',';
        text += std::to_string(analytic::predict(to_analytic_inputs(o, n)));
        text += '\n';
    }
    out << text;
    if (!o.output_path.empty()) detail::write_file(o.output_path, text);
    return 0;
}

// Simulated peak queue next to the closed-form value, one row per N.
inline int cmd_compare(const Options& o, std::ostream& out) {
    std::string text = "n,q_max_sim,q_max_analytic\n";
    for (int n : detail::n_list_or_reference(o)) {
        RunResult r = run_scenario(to_scenario_config(o, n));
        text += std::to_string(n);
        text += ',';
        text += std::to_string(r.q_max);
        text += ',';
        text += std::to_string(analytic::predict(to_analytic_inputs(o, n)));
        text += '\n';
    }
    out << text;
    if (!o.output_path.empty()) detail::write_file(o.output_path, text);
    return 0;
}

// Full 16-row parameter grid; one column of peak queue sizes per N.
inline int cmd_sweep(const Options& o, std::ostream& out) {
    if (o.sources.empty())
        throw std::invalid_argument("sweep needs --sources");
    ScenarioConfig base = to_scenario_config(o, 1);
    auto results = run_sweep(base, o.sources, o.jobs);
    auto rows = sweep_grid();
    std::string text = "mss,g_us,t_ms,d_km";
    for (int n : o.sources) text += ",n" + std::to_string(n);
    text += '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        text += std::to_string(rows[r].mss);
        text += ',';
        text += std::to_string(rows[r].g_us);
        text += ',';
        text += std::to_string(rows[r].t_ms);
        text += ',';
        text += std::to_string(rows[r].d_km);
        for (const RunResult& res : results[r]) {
            text += ',';
            text += std::to_string(res.q_max);
        }
        text += '\n';
    }
    out << text;
    if (!o.output_path.empty()) detail::write_file(o.output_path, text);
    return 0;
}

// Exit codes: 0 success, 1 bad usage or config, 2 violated run invariant.
inline int run_cli(int argc, const char* const* argv,
                   std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Options o;
    try {
        detail::load_config_if_given(o, argc, argv);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"TCP-over-ABR bottleneck queue simulator"};
    app.require_subcommand(1);
    CLI::App* c_run = app.add_subcommand("run", "simulate one configuration");
    CLI::App* c_sweep = app.add_subcommand("sweep", "peak queue across the parameter grid");
    CLI::App* c_analytic = app.add_subcommand("analytic", "closed-form predictions");
    CLI::App* c_compare = app.add_subcommand("compare", "simulation next to the model");
    for (CLI::App* c : {c_run, c_sweep, c_analytic, c_compare}) {
        detail::add_scenario_flags(c, o);
        c->add_option("--output", o.output_path, "also write the CSV here");
    }
    c_run->add_option("--trace", o.trace_path, "write bottleneck queue trace CSV here");
    c_sweep->add_option("--jobs", o.jobs, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (c_run->parsed()) return cmd_run(o, out);
        if (c_sweep->parsed()) return cmd_sweep(o, out);
        if (c_analytic->parsed()) return cmd_analytic(o, out);
        return cmd_compare(o, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "invariant violated: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace cli
}  // namespace abrsim
