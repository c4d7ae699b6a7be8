#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "abrsim/cell.hpp"
#include "abrsim/erica.hpp"
#include "abrsim/event_queue.hpp"
#include "abrsim/link.hpp"

namespace abrsim {

// FIFO output port feeding one link: one cell leaves per cell service time.
// A cell under transmission is already counted on the link, so queue_len is
// the cells still waiting. Forward switch ports carry an ERICA unit that
// taps every enqueue; a queue observer lets the run record high-water marks.
class OutPort {
  public:
    OutPort(EventQueue& q, LinkParams link_params, int n_vcs)
        : q_(&q), link_(q, link_params, n_vcs),
          per_vc_(static_cast<std::size_t>(n_vcs), 0) {}

    void set_deliver(std::function<void(Cell&&)> fn) { link_.set_deliver(std::move(fn)); }
    void set_queue_observer(std::function<void(std::int64_t)> fn) {
        observer_ = std::move(fn);
    }

    void attach_erica(EricaParams params) {
        erica_ = std::make_unique<EricaPort>(static_cast<int>(per_vc_.size()),
                                             link_.params().cell_rate(), params);
    }
    EricaPort* erica() { return erica_.get(); }
    const EricaPort* erica() const { return erica_.get(); }

    Link& link() { return link_; }
    std::int64_t queue_len() const { return static_cast<std::int64_t>(fifo_.size()); }
    std::int64_t queued_for(int vc) const { return per_vc_[static_cast<std::size_t>(vc)]; }

    void enqueue(Cell&& c) {
        if (erica_) erica_->on_enqueue(c);
        ++per_vc_[static_cast<std::size_t>(c.vc)];
        fifo_.push_back(std::move(c));
        if (observer_) observer_(queue_len());
        if (!busy_) {
            busy_ = true;
            serve_one();
        }
    }

    void end_interval() {
        if (erica_) erica_->end_interval(queue_len());
    }

  private:
    void serve_one() {
        Cell c = std::move(fifo_.front());
        fifo_.pop_front();
        --per_vc_[static_cast<std::size_t>(c.vc)];
        link_.transmit(std::move(c));
        if (observer_) observer_(queue_len());
        q_->schedule_in(cell_service_time(link_.params()), [this] {
            if (fifo_.empty())
                busy_ = false;
            else
                serve_one();
        });
    }

    EventQueue* q_;
    Link link_;
    std::deque<Cell> fifo_;
    std::vector<std::int64_t> per_vc_;
    bool busy_ = false;
    std::unique_ptr<EricaPort> erica_;
    std::function<void(std::int64_t)> observer_;
};

}  // namespace abrsim
