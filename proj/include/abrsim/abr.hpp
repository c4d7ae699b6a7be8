#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>

#include "abrsim/cell.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/link.hpp"
#include "abrsim/time.hpp"

namespace abrsim {

struct AbrParams {
    double pcr = 0.0;  // cells/s; 0 means "use the access link cell rate"
    double mcr = 0.0;
    double icr = 0.0;  // 0 means "start at pcr"
    int nrm = 32;      // one forward RM cell per nrm cell slots
};

// Rebuilds segments from an in-order cell stream, one frame at a time.
class Reassembler {
  public:
    std::optional<TcpSegment> feed(const Cell& c) {
        if (c.kind != CellKind::Data)
            throw std::logic_error("Reassembler: non-data cell");
        if (count_ == 0) {
            seg_id_ = c.seg_id;
            expected_ = c.seg_cells;
        } else if (c.seg_id != seg_id_) {
            throw std::logic_error("Reassembler: interleaved frames on one VC");
        }
        ++count_;
        if (count_ > expected_)
            throw std::logic_error("Reassembler: more cells than frame length");
        if (c.last_of_frame) {
            if (count_ != expected_)
                throw std::logic_error("Reassembler: short frame at last cell");
            count_ = 0;
            return c.seg;
        }
        return std::nullopt;
    }

  private:
    std::int64_t seg_id_ = 0;
    int expected_ = 0;
    int count_ = 0;
};

// ABR source end system. TCP segments queue here and leave as cells paced at
// the current allowed cell rate, with a forward RM cell taking every nrm-th
// slot. BRMs arriving from the network adjust the rate.
class AbrSource {
  public:
    AbrSource(EventQueue& q, int vc, AbrParams params, Link& access_link)
        : q_(&q), vc_(vc), p_(params), link_(&access_link) {
        if (p_.pcr <= 0.0) p_.pcr = access_link.params().cell_rate();
        acr_ = p_.icr > 0.0 ? std::min(p_.icr, p_.pcr) : p_.pcr;
        cells_since_frm_ = p_.nrm - 1;  // first slot carries an FRM
    }

    double acr() const { return acr_; }
    double pcr() const { return p_.pcr; }
    std::int64_t cells_emitted() const { return cells_emitted_; }
    std::int64_t frm_emitted() const { return frm_emitted_; }
    std::size_t queued_segments() const { return q_segs_.size(); }

    void enqueue_segment(const TcpSegment& seg) {
        Pending p;
        p.seg = seg;
        p.seg_id = next_seg_id_++;
        p.cells_total = seg.is_ack ? ack_cell_count() : cells_for_segment(seg.length);
        q_segs_.push_back(p);
        if (!armed_) arm(std::max(q_->now(), next_send_));
    }

    // New allowed rate takes effect from the next emission onward.
    void on_brm(const RmFields& rm) {
        acr_ = std::min(p_.pcr, std::max(p_.mcr, rm.er));
    }

  private:
    struct Pending {
        TcpSegment seg;
        std::int64_t seg_id = 0;
        int cells_total = 0;
        int cells_done = 0;
    };

    void arm(SimTime at) {
        armed_ = true;
        q_->schedule(at, [this] { emit_next(); });
    }

    void emit_next() {
        if (cells_since_frm_ >= p_.nrm - 1) {
            link_->transmit(Cell::frm(vc_, p_.pcr, acr_));
            cells_since_frm_ = 0;
            ++frm_emitted_;
        } else {
            Pending& head = q_segs_.front();
            ++head.cells_done;
            bool last = head.cells_done == head.cells_total;
            link_->transmit(Cell::data(vc_, head.seg_id, head.cells_total, last, head.seg));
            if (last) q_segs_.pop_front();
            ++cells_since_frm_;
        }
        ++cells_emitted_;
        next_send_ = q_->now() + SimDuration{std::llround(1e12 / acr_)};
        if (!q_segs_.empty())
            arm(next_send_);
        else
            armed_ = false;
    }

    EventQueue* q_;
    int vc_;
    AbrParams p_;
    Link* link_;

    double acr_ = 0.0;
    int cells_since_frm_ = 0;
    std::deque<Pending> q_segs_;
    std::int64_t next_seg_id_ = 0;
    SimTime next_send_{};
    bool armed_ = false;
    std::int64_t cells_emitted_ = 0;
    std::int64_t frm_emitted_ = 0;
};

// ABR destination end system: turns FRMs around as BRMs, reassembles data
// segments for the receiver, and encapsulates the receiver's ACKs onto the
// reverse path. The reverse path is uncongested, so ACK and BRM cells go out
// at line rate through the node's reverse port, not through a rate pacer.
class AbrDest {
  public:
    AbrDest(int vc,
            std::function<void(const TcpSegment&)> deliver,
            std::function<void(Cell&&)> send_reverse)
        : vc_(vc), deliver_(std::move(deliver)), send_reverse_(std::move(send_reverse)) {}

    std::int64_t cells_received() const { return cells_received_; }
    std::int64_t reverse_cells_emitted() const { return reverse_cells_emitted_; }

    void on_cell(Cell&& c) {
        ++cells_received_;
        switch (c.kind) {
            case CellKind::Frm:
                ++reverse_cells_emitted_;
                send_reverse_(Cell::brm_from(c));
                break;
            case CellKind::Data:
                if (auto seg = rx_.feed(c)) deliver_(*seg);
                break;
            case CellKind::Brm:
                throw std::logic_error("AbrDest: BRM arrived at destination");
        }
    }

    void send_ack(const TcpSegment& ack) {
        int cells = ack_cell_count();
        std::int64_t id = next_ack_seg_id_++;
        for (int i = 0; i < cells; ++i) {
            ++reverse_cells_emitted_;
            send_reverse_(Cell::data(vc_, id, cells, i + 1 == cells, ack));
        }
    }

  private:
    int vc_;
    std::function<void(const TcpSegment&)> deliver_;
    std::function<void(Cell&&)> send_reverse_;
    Reassembler rx_;
    std::int64_t next_ack_seg_id_ = 0;
    std::int64_t cells_received_ = 0;
    std::int64_t reverse_cells_emitted_ = 0;
};

}  // namespace abrsim
