#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "abrsim/abr.hpp"
#include "abrsim/cell.hpp"
#include "abrsim/erica.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/link.hpp"
#include "abrsim/port.hpp"
#include "abrsim/tcp.hpp"
#include "abrsim/time.hpp"

namespace abrsim {

// N sources feed switch 1, whose single output port is the bottleneck; a
// second switch fans back out to N destinations. Every hop is the same
// link. Source i+1 starts its build-up one stagger after source i; after
// build_segments writes, every source writes a full window in the same
// instant.
struct ScenarioConfig {
    int n_sources = 1;
    int mss = 512;
    SimDuration segment_period = msec(1);    // gap between one source's writes
    SimDuration source_stagger = usec(50);   // offset between adjacent sources
    double hop_km = 1000.0;
    std::int64_t cwnd_max = 65536;
    std::int64_t rcvwnd = 65536;
    int build_segments = 1000;
    SimDuration duration{};                  // 0: burst time + 5 round trips
    int nrm = 32;
    SimDuration rto = msec(500);
    EricaParams erica{};
    LinkParams link{};                       // length_km taken from hop_km

    void validate() const {
        if (n_sources < 1) throw std::invalid_argument("config: n_sources < 1");
        if (mss < 1) throw std::invalid_argument("config: mss < 1");
        if (segment_period.ps <= 0) throw std::invalid_argument("config: period <= 0");
        if (source_stagger.ps < 0) throw std::invalid_argument("config: stagger < 0");
        if (hop_km < 0) throw std::invalid_argument("config: negative distance");
        if (cwnd_max < mss) throw std::invalid_argument("config: cwnd_max < mss");
        if (build_segments < 0) throw std::invalid_argument("config: build_segments < 0");
        if (nrm < 2) throw std::invalid_argument("config: nrm < 2");
    }
};

inline LinkParams hop_params(const ScenarioConfig& cfg) {
    LinkParams lp = cfg.link;
    lp.length_km = cfg.hop_km;
    return lp;
}

// Three hops each way.
inline SimDuration round_trip_time(const ScenarioConfig& cfg) {
    return propagation_delay(hop_params(cfg)) * 6;
}

inline SimTime burst_time(const ScenarioConfig& cfg) {
    return SimTime{} + cfg.segment_period * cfg.build_segments;
}

inline SimDuration effective_duration(const ScenarioConfig& cfg) {
    if (cfg.duration.ps > 0) return cfg.duration;
    return cfg.segment_period * cfg.build_segments + round_trip_time(cfg) * 5;
}

// Build-up write schedule for one source (0-based index).
inline std::vector<SimTime> app_write_times(const ScenarioConfig& cfg, int source) {
    std::vector<SimTime> out;
    out.reserve(static_cast<std::size_t>(cfg.build_segments));
    SimTime start = SimTime{} + cfg.source_stagger * source;
    for (int j = 0; j < cfg.build_segments; ++j)
        out.push_back(start + cfg.segment_period * j);
    return out;
}

struct TracePoint {
    SimTime at{};
    std::int64_t queue_cells = 0;
};

struct RunResult {
    std::int64_t q_max = 0;
    SimTime q_max_time{};
    std::vector<TracePoint> trace;
    std::vector<double> final_cwnd;
    std::int64_t total_retransmits = 0;
    bool ledger_balanced = true;
    std::int64_t ledger_checks = 0;
    std::int64_t forward_cells_emitted = 0;
    std::int64_t forward_cells_delivered = 0;
    std::int64_t reverse_cells_emitted = 0;
    std::int64_t reverse_cells_delivered = 0;
    std::uint64_t events_dispatched = 0;
    ScenarioConfig config;
};

class Simulation {
  public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg),
          sw1_out_(q_, hop_params(cfg), cfg.n_sources),
          sw2_rev_(q_, hop_params(cfg), cfg.n_sources) {
        cfg_.validate();
        build();
    }

    RunResult run() {
        schedule_app_writes();
        schedule_tick();
        RunStats st = q_.run_until(SimTime{} + effective_duration(cfg_));
        check_ledger();
        return collect(st);
    }

    EventQueue& queue() { return q_; }

  private:
    void build() {
        int n = cfg_.n_sources;
        LinkParams hop = hop_params(cfg_);

        sw1_out_.attach_erica(cfg_.erica);
        sw1_out_.set_queue_observer([this](std::int64_t q) {
            if (q > q_max_) {
                q_max_ = q;
                q_max_time_ = q_.now();
                trace_.push_back({q_max_time_, q});
            }
        });
        sw1_out_.set_deliver([this](Cell&& c) {
            sw2_out_[static_cast<std::size_t>(c.vc)]->enqueue(std::move(c));
        });

        sw2_rev_.set_deliver([this](Cell&& c) {
            if (c.kind == CellKind::Brm) sw1_out_.erica()->on_brm(c.vc, c.rm);
            sw1_rev_[static_cast<std::size_t>(c.vc)]->enqueue(std::move(c));
        });

        for (int i = 0; i < n; ++i) {
            access_.push_back(std::make_unique<Link>(q_, hop, n));
            access_[i]->set_deliver([this](Cell&& c) { sw1_out_.enqueue(std::move(c)); });

            sw2_out_.push_back(std::make_unique<OutPort>(q_, hop, n));
            sw2_out_[i]->attach_erica(cfg_.erica);
            sw2_out_[i]->set_deliver([this, i](Cell&& c) {
                abr_dst_[static_cast<std::size_t>(i)]->on_cell(std::move(c));
            });

            dest_rev_.push_back(std::make_unique<OutPort>(q_, hop, n));
            dest_rev_[i]->set_deliver([this](Cell&& c) {
                if (c.kind == CellKind::Brm)
                    sw2_out_[static_cast<std::size_t>(c.vc)]->erica()->on_brm(c.vc, c.rm);
                sw2_rev_.enqueue(std::move(c));
            });

            sw1_rev_.push_back(std::make_unique<OutPort>(q_, hop, n));
            sw1_rev_[i]->set_deliver([this, i](Cell&& c) { source_reverse_in(i, std::move(c)); });

            AbrParams ap;
            ap.nrm = cfg_.nrm;
            abr_src_.push_back(std::make_unique<AbrSource>(q_, i, ap, *access_[i]));

            TcpParams tp;
            tp.mss = cfg_.mss;
            tp.cwnd_max = cfg_.cwnd_max;
            tp.rcvwnd = cfg_.rcvwnd;
            tp.rto = cfg_.rto;
            tcp_tx_.push_back(std::make_unique<TcpSender>(
                q_, i, tp,
                [this, i](const TcpSegment& seg) {
                    abr_src_[static_cast<std::size_t>(i)]->enqueue_segment(seg);
                }));

            abr_dst_.push_back(std::make_unique<AbrDest>(
                i,
                [this, i](const TcpSegment& seg) {
                    tcp_rx_[static_cast<std::size_t>(i)]->on_segment(seg);
                },
                [this, i](Cell&& c) {
                    dest_rev_[static_cast<std::size_t>(i)]->enqueue(std::move(c));
                }));
            tcp_rx_.push_back(std::make_unique<TcpReceiver>(
                i, [this, i](const TcpSegment& ack) {
                    abr_dst_[static_cast<std::size_t>(i)]->send_ack(ack);
                }));

            ack_rx_.emplace_back();
            rev_delivered_.push_back(0);
        }
    }

    void source_reverse_in(int i, Cell&& c) {
        ++rev_delivered_[static_cast<std::size_t>(i)];
        if (c.kind == CellKind::Brm) {
            abr_src_[static_cast<std::size_t>(i)]->on_brm(c.rm);
        } else if (c.kind == CellKind::Data) {
            if (auto seg = ack_rx_[static_cast<std::size_t>(i)].feed(c))
                tcp_tx_[static_cast<std::size_t>(i)]->on_ack(seg->ack_byte);
        } else {
            throw std::logic_error("Simulation: forward RM cell on reverse path");
        }
    }

    void schedule_app_writes() {
        for (int i = 0; i < cfg_.n_sources; ++i) {
            for (SimTime at : app_write_times(cfg_, i)) {
                q_.schedule(at, [this, i] {
                    tcp_tx_[static_cast<std::size_t>(i)]->app_write(cfg_.mss);
                });
            }
        }
        if (cfg_.build_segments > 0) {
            SimTime at = burst_time(cfg_);
            for (int i = 0; i < cfg_.n_sources; ++i) {
                q_.schedule(at, [this, i] {
                    tcp_tx_[static_cast<std::size_t>(i)]->app_write(cfg_.cwnd_max);
                });
            }
        }
    }

    void schedule_tick() {
        q_.schedule_in(cfg_.erica.interval, [this] { tick(); });
    }

    void tick() {
        sw1_out_.end_interval();
        for (auto& p : sw2_out_) p->end_interval();
        trace_.push_back({q_.now(), sw1_out_.queue_len()});
        check_ledger();
        schedule_tick();
    }

    void check_ledger() {
        ++ledger_checks_;
        for (int i = 0; i < cfg_.n_sources; ++i) {
            auto vc = static_cast<std::size_t>(i);
            std::int64_t fwd_out = abr_src_[vc]->cells_emitted();
            std::int64_t fwd_in = abr_dst_[vc]->cells_received();
            std::int64_t fwd_between = access_[vc]->in_flight_for(i) +
                                       sw1_out_.queued_for(i) +
                                       sw1_out_.link().in_flight_for(i) +
                                       sw2_out_[vc]->queue_len() +
                                       sw2_out_[vc]->link().in_flight_for(i);
            std::int64_t rev_out = abr_dst_[vc]->reverse_cells_emitted();
            std::int64_t rev_in = rev_delivered_[vc];
            std::int64_t rev_between = dest_rev_[vc]->queue_len() +
                                       dest_rev_[vc]->link().in_flight_for(i) +
                                       sw2_rev_.queued_for(i) +
                                       sw2_rev_.link().in_flight_for(i) +
                                       sw1_rev_[vc]->queue_len() +
                                       sw1_rev_[vc]->link().in_flight_for(i);
            if (fwd_out != fwd_in + fwd_between || rev_out != rev_in + rev_between)
                ledger_balanced_ = false;
        }
    }

    RunResult collect(const RunStats& st) {
        RunResult r;
        r.q_max = q_max_;
        r.q_max_time = q_max_time_;
        r.trace = std::move(trace_);
        r.ledger_balanced = ledger_balanced_;
        r.ledger_checks = ledger_checks_;
        for (int i = 0; i < cfg_.n_sources; ++i) {
            auto vc = static_cast<std::size_t>(i);
            r.final_cwnd.push_back(tcp_tx_[vc]->cwnd());
            r.total_retransmits += tcp_tx_[vc]->retransmit_count();
            r.forward_cells_emitted += abr_src_[vc]->cells_emitted();
            r.forward_cells_delivered += abr_dst_[vc]->cells_received();
            r.reverse_cells_emitted += abr_dst_[vc]->reverse_cells_emitted();
            r.reverse_cells_delivered += rev_delivered_[vc];
        }
        r.events_dispatched = st.events_dispatched;
        r.config = cfg_;
        return r;
    }

    ScenarioConfig cfg_;
    EventQueue q_;

    std::vector<std::unique_ptr<Link>> access_;      // source i -> switch 1
    OutPort sw1_out_;                                // the bottleneck port
    std::vector<std::unique_ptr<OutPort>> sw2_out_;  // switch 2 -> dest i
    std::vector<std::unique_ptr<OutPort>> dest_rev_; // dest i -> switch 2
    OutPort sw2_rev_;                                // switch 2 -> switch 1
    std::vector<std::unique_ptr<OutPort>> sw1_rev_;  // switch 1 -> source i

    std::vector<std::unique_ptr<TcpSender>> tcp_tx_;
    std::vector<std::unique_ptr<AbrSource>> abr_src_;
    std::vector<Reassembler> ack_rx_;
    std::vector<std::unique_ptr<AbrDest>> abr_dst_;
    std::vector<std::unique_ptr<TcpReceiver>> tcp_rx_;
    std::vector<std::int64_t> rev_delivered_;

    std::int64_t q_max_ = 0;
    SimTime q_max_time_{};
    std::vector<TracePoint> trace_;
    bool ledger_balanced_ = true;
    std::int64_t ledger_checks_ = 0;
};

inline RunResult run_scenario(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    return sim.run();
}

// Parameter grid for the sensitivity sweep, in fixed row order:
// mss outermost, then stagger, then period, then distance.
struct SweepRow {
    int mss;
    std::int64_t g_us;
    std::int64_t t_ms;
    int d_km;
};

inline std::vector<SweepRow> sweep_grid() {
    std::vector<SweepRow> rows;
    for (int mss : {512, 1024})
        for (std::int64_t g : {50, 100})
            for (std::int64_t t : {1, 10})
                for (int d : {1000, 2000})
                    rows.push_back({mss, g, t, d});
    return rows;
}

inline ScenarioConfig apply_sweep_row(ScenarioConfig base, const SweepRow& row) {
    base.mss = row.mss;
    base.source_stagger = usec(row.g_us);
    base.segment_period = msec(row.t_ms);
    base.hop_km = static_cast<double>(row.d_km);
    base.duration = SimDuration{};  // re-derive from period and distance
    return base;
}

// Runs rows x n_values; jobs > 1 farms runs out to worker threads. Results
// land in a fixed (row-major) order, so the job count never changes output.
inline std::vector<std::vector<RunResult>> run_sweep(const ScenarioConfig& base,
                                                     const std::vector<int>& n_values,
                                                     int jobs = 1) {
    auto rows = sweep_grid();
    std::vector<std::vector<RunResult>> results(rows.size());
    for (auto& r : results) r.resize(n_values.size());

    struct Task {
        std::size_t row, col;
    };
    std::vector<Task> tasks;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < n_values.size(); ++c) tasks.push_back({r, c});

    auto run_task = [&](const Task& t) {
        ScenarioConfig cfg = apply_sweep_row(base, rows[t.row]);
        cfg.n_sources = n_values[t.col];
        results[t.row][t.col] = run_scenario(cfg);
    };

    if (jobs <= 1) {
        for (const Task& t : tasks) run_task(t);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    int workers = std::min<int>(jobs, static_cast<int>(tasks.size()));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t k = next.fetch_add(1);
                if (k >= tasks.size()) break;
                run_task(tasks[k]);
            }
        });
    for (auto& th : pool) th.join();
    return results;
}

}  // namespace abrsim
