#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "abrsim/time.hpp"

namespace abrsim {

struct RunStats {
    std::uint64_t events_dispatched = 0;
    SimTime end_time{};
};

// Deterministic event scheduler. Events fire in (time, insertion sequence)
// order, so two runs of the same topology dispatch in exactly the same order.
class EventQueue {
  public:
    using Handle = std::uint64_t;

    SimTime now() const { return now_; }

    Handle schedule(SimTime at, std::function<void()> fn) {
        if (at < now_)
            throw std::logic_error("EventQueue: scheduling into the past");
        Handle id = ++last_id_;
        heap_.push_back(Entry{at, id, std::move(fn)});
        std::push_heap(heap_.begin(), heap_.end(), Later{});
        live_.insert(id);
        return id;
    }

    Handle schedule_in(SimDuration d, std::function<void()> fn) {
        return schedule(now_ + d, std::move(fn));
    }

    // Cancelling an already-fired or unknown handle is a no-op. Cancelled
    // entries stay in the heap and are dropped when they surface.
    void cancel(Handle h) {
        if (auto it = live_.find(h); it != live_.end()) {
            live_.erase(it);
            cancelled_.insert(h);
        }
    }

    // Dispatches every event with fire_time <= t_end, then leaves the clock
    // at t_end. Events scheduled during dispatch join the same run if due.
    RunStats run_until(SimTime t_end) {
        RunStats st;
        while (!heap_.empty() && heap_.front().at <= t_end) {
            std::pop_heap(heap_.begin(), heap_.end(), Later{});
            Entry e = std::move(heap_.back());
            heap_.pop_back();
            if (auto it = cancelled_.find(e.seq); it != cancelled_.end()) {
                cancelled_.erase(it);
                continue;
            }
            live_.erase(e.seq);
            now_ = e.at;
            e.fn();
            ++st.events_dispatched;
        }
        now_ = std::max(now_, t_end);
        st.end_time = now_;
        return st;
    }

    bool empty() const { return live_.empty(); }
    std::size_t pending() const { return live_.size(); }

  private:
    struct Entry {
        SimTime at;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    std::vector<Entry> heap_;
    std::unordered_set<Handle> live_;
    std::unordered_set<Handle> cancelled_;
    std::uint64_t last_id_ = 0;
    SimTime now_{};
};

}  // namespace abrsim
