#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "abrsim/cell.hpp"
#include "abrsim/time.hpp"

namespace abrsim {

struct EricaParams {
    SimDuration t0 = usec(500);       // target queueing delay
    double a = 1.15;                  // over-allocation at empty queue
    double b = 1.05;                  // drain pressure above t0
    double qdlf = 0.5;                // queue drain limit factor (floor of f)
    SimDuration interval = msec(1);   // measurement interval
    double alpha_n = 0.2;             // active-count averaging weight
    double alpha_z = 0.2;             // overload averaging weight
};

// Queue control function: a hyperbola through f(0) = a and f(t0) = 1 that
// keeps falling toward 0 above t0 (slope set by b) until the qdlf floor.
inline double queue_fraction(double q_delay_s, const EricaParams& p) {
    double t0 = p.t0.seconds();
    double f;
    if (q_delay_s <= t0)
        f = p.a * t0 / ((p.a - 1.0) * q_delay_s + t0);
    else
        f = p.b * t0 / ((p.b - 1.0) * q_delay_s + t0);
    return std::max(f, p.qdlf);
}

// Per-output-port measurement and explicit-rate feedback. Forward cells are
// counted on enqueue; every interval the port recomputes its target capacity
// from the queue length and refreshes the averaged load figures; backward RM
// cells passing the switch get their ER stamped down from those figures.
class EricaPort {
  public:
    EricaPort(int n_vcs, double abr_capacity, EricaParams params)
        : p_(params), abr_capacity_(abr_capacity),
          ccr_(static_cast<std::size_t>(n_vcs), 0.0),
          seen_(static_cast<std::size_t>(n_vcs), 0) {}

    const EricaParams& params() const { return p_; }
    double abr_capacity() const { return abr_capacity_; }
    double z_avg() const { return z_avg_; }
    double n_avg() const { return n_avg_; }
    double fairshare() const { return fairshare_; }
    double target_capacity() const { return target_capacity_; }
    bool has_measurement() const { return have_interval_; }

    void on_enqueue(const Cell& c) {
        ++cells_received_;
        auto vc = static_cast<std::size_t>(c.vc);
        if (!seen_[vc]) {
            seen_[vc] = 1;
            ++n_now_;
        }
        if (c.kind == CellKind::Frm) ccr_[vc] = c.rm.ccr;
    }

    void end_interval(std::int64_t q_len_cells) {
        double interval_s = p_.interval.seconds();
        double input_rate = static_cast<double>(cells_received_) / interval_s;
        double q_delay = static_cast<double>(q_len_cells) / abr_capacity_;
        target_capacity_ = queue_fraction(q_delay, p_) * abr_capacity_;
        double z_now = input_rate / target_capacity_;
        double n_now = static_cast<double>(std::max(n_now_, 1));
        n_avg_ = p_.alpha_n * n_now + (1.0 - p_.alpha_n) * n_avg_;
        z_avg_ = p_.alpha_z * z_now + (1.0 - p_.alpha_z) * z_avg_;
        fairshare_ = target_capacity_ / n_avg_;
        cells_received_ = 0;
        n_now_ = 0;
        std::fill(seen_.begin(), seen_.end(), 0);
        have_interval_ = true;
    }

    // ER can only shrink on the way through a switch. Before the first
    // completed interval the BRM passes untouched.
    void on_brm(int vc, RmFields& rm) const {
        if (!have_interval_) return;
        double vcshare = ccr_[static_cast<std::size_t>(vc)] / std::max(z_avg_, 0.01);
        double er_calc = std::min(std::max(fairshare_, vcshare), target_capacity_);
        rm.er = std::min(rm.er, er_calc);
    }

  private:
    EricaParams p_;
    double abr_capacity_;
    std::vector<double> ccr_;
    std::vector<char> seen_;
    int n_now_ = 0;
    std::int64_t cells_received_ = 0;
    double n_avg_ = 1.0;
    double z_avg_ = 0.0;
    double fairshare_ = 0.0;
    double target_capacity_ = 0.0;
    bool have_interval_ = false;
};

}  // namespace abrsim
