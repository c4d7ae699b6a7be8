#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "abrsim/link.hpp"

using namespace abrsim;

TEST_CASE("segment to cell conversion includes the 56-byte encapsulation") {
    CHECK(cells_for_segment(512) == 12);
    CHECK(cells_for_segment(1024) == 23);
    CHECK(cells_for_segment(40) == 2);
    CHECK(cells_for_segment(1) == 2);
    // 520 + 56 = 576 fills exactly 12 cells; one more byte spills.
    CHECK(cells_for_segment(520) == 12);
    CHECK(cells_for_segment(521) == 13);
    CHECK(cells_for_segment(9216) == 194);
    CHECK_THROWS_AS(cells_for_segment(0), std::invalid_argument);
    CHECK_THROWS_AS(cells_for_segment(-4), std::invalid_argument);
}

TEST_CASE("an empty ACK still needs two cells") {
    STATIC_CHECK(ack_cell_count() == 2);
}

TEST_CASE("OC-3 cell timing") {
    LinkParams p;
    CHECK(cell_service_time(p).ps == 2'831'197);
    CHECK(p.cell_rate() == Catch::Approx(353'207.5472).epsilon(1e-9));
}

TEST_CASE("propagation scales with distance at 5 us per km") {
    LinkParams p;
    CHECK(propagation_delay(p).ps == 5'000'000'000);
    p.length_km = 2000.0;
    CHECK(propagation_delay(p).ps == 10'000'000'000);
}

TEST_CASE("link delivers after service plus propagation") {
    EventQueue q;
    LinkParams p;
    p.length_km = 1.0;  // 5 us wire
    Link link(q, p);
    std::vector<SimTime> arrivals;
    link.set_deliver([&](Cell&&) { arrivals.push_back(q.now()); });

    TcpSegment seg{0, 0, 512, false, 0};
    link.transmit(Cell::data(0, 0, 12, false, seg));
    REQUIRE(link.in_flight() == 1);
    q.run_until(SimTime{} + usec(100));
    REQUIRE(arrivals.size() == 1);
    CHECK(arrivals[0].ps == 2'831'197 + 5'000'000);
    CHECK(link.in_flight() == 0);
}

TEST_CASE("link preserves order and tracks per-connection counts") {
    EventQueue q;
    LinkParams p;
    p.length_km = 10.0;
    Link link(q, p, 2);
    std::vector<int> vcs;
    link.set_deliver([&](Cell&& c) { vcs.push_back(c.vc); });

    TcpSegment seg{0, 0, 512, false, 0};
    link.transmit(Cell::data(0, 0, 12, false, seg));
    q.schedule(SimTime{} + cell_service_time(p), [&] {
        TcpSegment s2{1, 0, 512, false, 0};
        link.transmit(Cell::data(1, 0, 12, false, s2));
    });
    q.run_until(SimTime{} + SimDuration{cell_service_time(p).ps / 2});
    CHECK(link.in_flight_for(0) == 1);
    CHECK(link.in_flight_for(1) == 0);
    q.run_until(SimTime{} + msec(1));
    REQUIRE(vcs == std::vector<int>{0, 1});
    CHECK(link.in_flight_for(0) == 0);
    CHECK(link.in_flight_for(1) == 0);
}
