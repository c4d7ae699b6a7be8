#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "abrsim/link.hpp"

namespace abrsim {
namespace analytic {

// The closed-form model works in round figures: 2.83 us per cell slot, so a
// saturated source pushes floor(1e6 / 2.83) = 353356 cells/s. The simulator
// itself uses the exact 149.76 Mb/s payload rate; only the model rounds.
inline constexpr double kCellTimeUs = 2.83;
inline constexpr std::int64_t kBurstCellsPerSecond = 353356;

struct Inputs {
    int n = 1;                       // synchronized connections
    int mss = 512;                   // bytes per build-up segment
    std::int64_t t_us = 1000;        // gap between one source's segments
    std::int64_t g_us = 50;          // stagger between consecutive sources
    std::int64_t cwnd_max = 65536;   // window each source dumps at burst time
};

// Largest N that stays underloaded: one more and the staggered build-up
// streams overlap faster than the bottleneck drains them.
inline std::int64_t overload_threshold(std::int64_t t_us, std::int64_t g_us) {
    if (t_us <= 0 || g_us <= 0)
        throw std::invalid_argument("overload_threshold: times must be positive");
    return t_us / g_us;
}

// Underloaded case: every source's full window lands in the queue at once.
// Only the 48 payload bytes per cell figure in the window-to-cells division.
inline std::int64_t queue_under(int n, std::int64_t cwnd_max) {
    return static_cast<std::int64_t>(n) * (cwnd_max / kCellPayloadBytes);
}

// Overloaded case: rates are cut before the burst, so the peak is what each
// source can push through one inter-segment gap. Per-source floor first.
inline std::int64_t queue_over(int n, std::int64_t t_us) {
    return static_cast<std::int64_t>(n) * (kBurstCellsPerSecond * t_us / 1'000'000);
}

// Slow-start doublings until one source's round burst outgrows the cells a
// saturated link moves in one inter-segment gap.
inline int rounds_to_overload(std::int64_t t_us, int mss) {
    if (t_us <= 0)
        throw std::invalid_argument("rounds_to_overload: t must be positive");
    double x = static_cast<double>(t_us) /
               (kCellTimeUs * static_cast<double>(cells_for_segment(mss)));
    return static_cast<int>(std::ceil(std::log2(x)));
}

inline std::int64_t predict(const Inputs& in) {
    if (in.n <= 0) throw std::invalid_argument("predict: n must be positive");
    return in.n <= overload_threshold(in.t_us, in.g_us)
               ? queue_under(in.n, in.cwnd_max)
               : queue_over(in.n, in.t_us);
}

inline const std::vector<int>& reference_n_values() {
    static const std::vector<int> ns = {2,  3,  5,  10, 20,  30,  40,  50,
                                        60, 70, 80, 90, 100, 110, 120, 130,
                                        140, 150, 160, 170, 180, 190, 200};
    return ns;
}

// Model predictions at the baseline configuration over the reference N grid.
inline std::vector<std::pair<int, std::int64_t>> reference_predictions() {
    std::vector<std::pair<int, std::int64_t>> out;
    for (int n : reference_n_values()) {
        Inputs in;
        in.n = n;
        out.emplace_back(n, predict(in));
    }
    return out;
}

}  // namespace analytic
}  // namespace abrsim
