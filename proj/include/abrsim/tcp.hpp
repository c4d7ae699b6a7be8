#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "abrsim/cell.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/time.hpp"

namespace abrsim {

enum class TcpPhase { SlowStart, CongestionAvoidance };

struct TcpParams {
    int mss = 512;
    std::int64_t cwnd_max = 65536;
    std::int64_t rcvwnd = 65536;
    std::int64_t initial_ssthresh = 65536;
    SimDuration rto = msec(500);
};

// Sender side of one connection: slow start / congestion avoidance growth,
// sliding window, fixed RTO with go-back-n. Loss never happens on a lossless
// ATM path, so in practice the timer is armed and re-armed but never fires.
class TcpSender {
  public:
    TcpSender(EventQueue& q, int vc, TcpParams p,
              std::function<void(const TcpSegment&)> emit)
        : q_(&q), vc_(vc), p_(p), emit_(std::move(emit)),
          cwnd_(static_cast<double>(p.mss)), ssthresh_(p.initial_ssthresh) {}

    // cwnd < ssthresh means slow start; at or above means avoidance.
    TcpPhase phase() const {
        return cwnd_ < static_cast<double>(ssthresh_) ? TcpPhase::SlowStart
                                                      : TcpPhase::CongestionAvoidance;
    }

    double cwnd() const { return cwnd_; }
    std::int64_t ssthresh() const { return ssthresh_; }
    std::int64_t snd_una() const { return snd_una_; }
    std::int64_t snd_nxt() const { return snd_nxt_; }
    std::int64_t app_backlog() const { return app_backlog_; }
    std::int64_t outstanding() const { return snd_nxt_ - snd_una_; }
    std::int64_t retransmit_count() const { return retransmit_count_; }

    void app_write(std::int64_t bytes) {
        if (bytes <= 0) throw std::invalid_argument("app_write: bytes must be positive");
        app_backlog_ += bytes;
        try_send();
    }

    // Emits segments of min(mss, backlog) bytes while the window has room.
    void try_send() {
        while (app_backlog_ > 0) {
            int seg_len = static_cast<int>(std::min<std::int64_t>(p_.mss, app_backlog_));
            double window = std::min(cwnd_, static_cast<double>(p_.rcvwnd));
            if (static_cast<double>(outstanding() + seg_len) > window) break;
            TcpSegment seg;
            seg.vc = vc_;
            seg.offset = snd_nxt_;
            seg.length = seg_len;
            snd_nxt_ += seg_len;
            app_backlog_ -= seg_len;
            arm_timer();
            emit_(seg);
        }
    }

    void on_ack(std::int64_t ack_byte) {
        if (ack_byte <= snd_una_)
            throw std::logic_error("TcpSender: stale or duplicate ack on lossless path");
        if (ack_byte > snd_nxt_)
            throw std::logic_error("TcpSender: ack beyond snd_nxt");
        snd_una_ = ack_byte;
        if (phase() == TcpPhase::SlowStart)
            cwnd_ += static_cast<double>(p_.mss);
        else
            cwnd_ += static_cast<double>(p_.mss) * p_.mss / cwnd_;
        cwnd_ = std::min(cwnd_, static_cast<double>(p_.cwnd_max));
        if (outstanding() > 0)
            arm_timer(true);
        else
            disarm_timer();
        try_send();
    }

    // ssthresh = max(2 mss, min(cwnd/2, rcvwnd)), cwnd back to one segment,
    // everything past snd_una is sent again.
    void on_timeout() {
        timer_armed_ = false;
        ssthresh_ = std::max<std::int64_t>(
            2 * p_.mss,
            std::min(static_cast<std::int64_t>(cwnd_ / 2), p_.rcvwnd));
        cwnd_ = static_cast<double>(p_.mss);
        app_backlog_ += snd_nxt_ - snd_una_;
        snd_nxt_ = snd_una_;
        ++retransmit_count_;
        try_send();
    }

  private:
    void arm_timer(bool restart = false) {
        if (timer_armed_) {
            if (!restart) return;
            q_->cancel(timer_);
        }
        timer_ = q_->schedule_in(p_.rto, [this] { on_timeout(); });
        timer_armed_ = true;
    }

    void disarm_timer() {
        if (!timer_armed_) return;
        q_->cancel(timer_);
        timer_armed_ = false;
    }

    EventQueue* q_;
    int vc_;
    TcpParams p_;
    std::function<void(const TcpSegment&)> emit_;

    double cwnd_;
    std::int64_t ssthresh_;
    std::int64_t snd_una_ = 0;
    std::int64_t snd_nxt_ = 0;
    std::int64_t app_backlog_ = 0;
    std::int64_t retransmit_count_ = 0;
    EventQueue::Handle timer_ = 0;
    bool timer_armed_ = false;
};

// Receiver side: in-order delivery only (the network cannot reorder), one
// immediate cumulative ACK per data segment. No delayed ACK, no Nagle.
class TcpReceiver {
  public:
    TcpReceiver(int vc, std::function<void(const TcpSegment&)> emit_ack)
        : vc_(vc), emit_ack_(std::move(emit_ack)) {}

    std::int64_t rcv_nxt() const { return rcv_nxt_; }

    void on_segment(const TcpSegment& seg) {
        if (seg.offset != rcv_nxt_)
            throw std::logic_error("TcpReceiver: out-of-order segment on FIFO path");
        rcv_nxt_ += seg.length;
        TcpSegment ack;
        ack.vc = vc_;
        ack.length = 0;
        ack.is_ack = true;
        ack.ack_byte = rcv_nxt_;
        emit_ack_(ack);
    }

  private:
    int vc_;
    std::function<void(const TcpSegment&)> emit_ack_;
    std::int64_t rcv_nxt_ = 0;
};

}  // namespace abrsim
