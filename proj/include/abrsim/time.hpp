#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace abrsim {

// Integer picosecond clock. Picoseconds keep cell pacing exact: one OC-3
// payload cell time is 2831196.58 ps, which a nanosecond clock would smear.
struct SimDuration {
    std::int64_t ps = 0;

    constexpr auto operator<=>(const SimDuration&) const = default;
    constexpr SimDuration operator+(SimDuration o) const { return {ps + o.ps}; }
    constexpr SimDuration operator-(SimDuration o) const { return {ps - o.ps}; }
    constexpr SimDuration operator*(std::int64_t k) const { return {ps * k}; }

    constexpr double seconds() const { return static_cast<double>(ps) * 1e-12; }
    constexpr double micros() const { return static_cast<double>(ps) * 1e-6; }
};

struct SimTime {
    std::int64_t ps = 0;

    constexpr auto operator<=>(const SimTime&) const = default;
    constexpr SimTime operator+(SimDuration d) const { return {ps + d.ps}; }
    constexpr SimTime operator-(SimDuration d) const { return {ps - d.ps}; }
    constexpr SimDuration operator-(SimTime o) const { return {ps - o.ps}; }

    constexpr double seconds() const { return static_cast<double>(ps) * 1e-12; }
    constexpr double micros() const { return static_cast<double>(ps) * 1e-6; }
};

constexpr SimDuration psec(std::int64_t v) { return {v}; }
constexpr SimDuration nsec(std::int64_t v) { return {v * 1'000}; }
constexpr SimDuration usec(std::int64_t v) { return {v * 1'000'000}; }
constexpr SimDuration msec(std::int64_t v) { return {v * 1'000'000'000}; }
constexpr SimDuration sec(std::int64_t v) { return {v * 1'000'000'000'000}; }

inline SimDuration from_seconds(double s) { return {std::llround(s * 1e12)}; }

}  // namespace abrsim
