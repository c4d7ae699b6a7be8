#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "abrsim/analytic.hpp"

using namespace abrsim;
using namespace abrsim::analytic;

namespace {

Inputs with_n(int n) {
    Inputs in;
    in.n = n;
    return in;
}

}  // namespace

TEST_CASE("worst-case queue for the default geometry, all reference sizes") {
    // Frozen expectations, computed by hand from the two closed forms:
    // below the crossover every source parks a full window (65536/48 = 1365
    // cells); above it each source can only push t seconds of full-rate
    // output per window cycle (353356 * 0.001 = 353 cells).
    const std::map<int, std::int64_t> expected = {
        {2, 2730},    {3, 4095},    {5, 6825},    {10, 13650},  {20, 27300},
        {30, 10590},  {40, 14120},  {50, 17650},  {60, 21180},  {70, 24710},
        {80, 28240},  {90, 31770},  {100, 35300}, {110, 38830}, {120, 42360},
        {130, 45890}, {140, 49420}, {150, 52950}, {160, 56480}, {170, 60010},
        {180, 63540}, {190, 67070}, {200, 70600},
    };
    for (const auto& [n, cells] : expected) {
        INFO("n = " << n);
        CHECK(predict(with_n(n)) == cells);
    }
}

TEST_CASE("reference grid matches the frozen table") {
    auto ns = reference_n_values();
    REQUIRE(ns.size() == 23);
    CHECK(ns.front() == 2);
    CHECK(ns[4] == 20);
    CHECK(ns[5] == 30);
    CHECK(ns.back() == 200);
    auto rows = reference_predictions();
    REQUIRE(rows.size() == 23);
    CHECK(rows[0] == std::pair<int, std::int64_t>{2, 2730});
    CHECK(rows[12] == std::pair<int, std::int64_t>{100, 35300});
    CHECK(rows[22] == std::pair<int, std::int64_t>{200, 70600});
}

TEST_CASE("regime boundary sits at t over g, integer arithmetic only") {
    CHECK(overload_threshold(1000, 50) == 20);
    CHECK(overload_threshold(10'000, 50) == 200);
    CHECK(overload_threshold(1000, 999) == 1);
    CHECK(overload_threshold(1000, 1000) == 1);
    CHECK(overload_threshold(1000, 1001) == 0);
    CHECK_THROWS_AS(overload_threshold(0, 50), std::invalid_argument);
    CHECK_THROWS_AS(overload_threshold(1000, 0), std::invalid_argument);
}

TEST_CASE("prediction switches regime exactly past the boundary") {
    CHECK(predict(with_n(20)) == 27300);   // 20 * 1365
    CHECK(predict(with_n(21)) == 7413);    // 21 * 353: the over-side is smaller
}

TEST_CASE("under-threshold queue is windows parked as cells") {
    CHECK(queue_under(1, 65536) == 1365);
    CHECK(queue_under(20, 65536) == 27300);
    CHECK(queue_under(1, 48) == 1);
    CHECK(queue_under(20, 65535) == 27300);  // floor before scaling
}

TEST_CASE("over-threshold queue floors the per-source burst first") {
    CHECK(queue_over(30, 1000) == 10590);        // 30 * 353, not floor(30*353.356)
    CHECK(queue_over(1, 1'000'000) == 353'356);  // a full second of burst
    CHECK(queue_over(1, 2831) == 1000);
    CHECK(queue_over(50, 10'000) == 176'650);    // 50 * 3533
}

TEST_CASE("window doublings needed to cover the write period") {
    CHECK(rounds_to_overload(1000, 512) == 5);
    CHECK(rounds_to_overload(10'000, 512) == 9);
    CHECK(rounds_to_overload(1000, 1024) == 4);
}

TEST_CASE("longer write periods push the crossover out") {
    Inputs in;
    in.t_us = 10'000;
    in.n = 50;
    CHECK(overload_threshold(in.t_us, in.g_us) == 200);
    CHECK(predict(in) == 68'250);  // still under: 50 * 1365
    in.n = 201;
    CHECK(predict(in) == 201 * 3533);
}

TEST_CASE("wider windows park more cells below the crossover") {
    Inputs in;
    in.n = 10;
    in.cwnd_max = 131072;
    CHECK(predict(in) == 10 * (131072 / 48));
}
