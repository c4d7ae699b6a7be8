#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "abrsim/cell.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/time.hpp"

namespace abrsim {

// TCP/IP over AAL5 with LLC/SNAP adds 56 bytes to every segment:
// 20 (TCP) + 20 (IP) + 8 (LLC/SNAP) + 8 (AAL5 trailer).
inline constexpr int kEncapsOverheadBytes = 56;
inline constexpr int kCellPayloadBytes = 48;
inline constexpr int kCellBits = 424;

// Cells needed to carry one data segment, padding included.
// 512 payload bytes -> 12 cells, 1024 -> 23.
inline int cells_for_segment(int payload_bytes) {
    if (payload_bytes <= 0)
        throw std::invalid_argument("cells_for_segment: payload must be positive");
    return (payload_bytes + kEncapsOverheadBytes + kCellPayloadBytes - 1) /
           kCellPayloadBytes;
}

// A zero-payload ACK still carries the 56 overhead bytes: 2 cells.
inline constexpr int ack_cell_count() {
    return (kEncapsOverheadBytes + kCellPayloadBytes - 1) / kCellPayloadBytes;
}

// OC-3: 155.52 Mb/s line, 149.76 Mb/s left for cells after SONET overhead.
struct LinkParams {
    double line_rate_bps = 155.52e6;
    double payload_rate_bps = 149.76e6;
    double length_km = 1000.0;
    SimDuration per_km_delay = usec(5);

    double cell_rate() const { return payload_rate_bps / kCellBits; }
};

// 424 bits / 149.76 Mb/s = 2831197 ps (nearest).
inline SimDuration cell_service_time(const LinkParams& p) {
    return {std::llround(static_cast<double>(kCellBits) / p.payload_rate_bps * 1e12)};
}

inline SimDuration propagation_delay(const LinkParams& p) {
    return {std::llround(p.length_km * static_cast<double>(p.per_km_delay.ps))};
}

// Unidirectional point-to-point wire. Serialization spacing is the sender's
// job (pacer or port service loop); the link only delays and preserves order.
class Link {
  public:
    Link(EventQueue& q, LinkParams params, int n_vcs = 1)
        : q_(&q), params_(params),
          in_flight_vc_(static_cast<std::size_t>(n_vcs), 0) {}

    void set_deliver(std::function<void(Cell&&)> fn) { deliver_ = std::move(fn); }
    const LinkParams& params() const { return params_; }

    std::int64_t in_flight() const { return in_flight_; }
    std::int64_t in_flight_for(int vc) const {
        return in_flight_vc_[static_cast<std::size_t>(vc)];
    }

    // Arrival fires at now + cell_service_time + propagation_delay.
    void transmit(Cell cell) {
        SimTime arrival = q_->now() + cell_service_time(params_) + propagation_delay(params_);
        if (arrival < last_arrival_)
            throw std::logic_error("Link: reordered arrival");
        last_arrival_ = arrival;
        ++in_flight_;
        ++in_flight_vc_[static_cast<std::size_t>(cell.vc)];
        q_->schedule(arrival, [this, c = std::move(cell)]() mutable {
            --in_flight_;
            --in_flight_vc_[static_cast<std::size_t>(c.vc)];
            deliver_(std::move(c));
        });
    }

  private:
    EventQueue* q_;
    LinkParams params_;
    std::function<void(Cell&&)> deliver_;
    SimTime last_arrival_{};
    std::int64_t in_flight_ = 0;
    std::vector<std::int64_t> in_flight_vc_;
};

}  // namespace abrsim
