#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "abrsim/abr.hpp"

using namespace abrsim;

namespace {

// Source under test feeding a zero-length wire so arrival deltas equal
// emission deltas (constant service offset).
struct SourceRig {
    EventQueue q;
    LinkParams lp;
    Link link;
    std::vector<Cell> rx;
    std::vector<SimTime> at;
    AbrSource src;

    explicit SourceRig(AbrParams ap = {})
        : link(q, wire()), src(q, 0, ap, link) {
        link.set_deliver([this](Cell&& c) {
            rx.push_back(c);
            at.push_back(q.now());
        });
    }

    static LinkParams wire() {
        LinkParams p;
        p.length_km = 0.0;
        return p;
    }

    TcpSegment seg512(std::int64_t offset = 0) const {
        return TcpSegment{0, offset, 512, false, 0};
    }
};

constexpr std::int64_t kSlot = 2'831'197;  // ps per cell at the OC-3 payload rate

}  // namespace

TEST_CASE("reassembler returns the segment on the last cell only") {
    Reassembler r;
    TcpSegment seg{0, 0, 512, false, 0};
    for (int i = 0; i < 11; ++i)
        CHECK_FALSE(r.feed(Cell::data(0, 7, 12, false, seg)).has_value());
    auto out = r.feed(Cell::data(0, 7, 12, true, seg));
    REQUIRE(out.has_value());
    CHECK(out->length == 512);
    // and it is reusable for the next frame
    CHECK_FALSE(r.feed(Cell::data(0, 8, 12, false, seg)).has_value());
}

TEST_CASE("reassembler rejects malformed streams") {
    TcpSegment seg{0, 0, 512, false, 0};
    SECTION("rm cell in the data path") {
        Reassembler r;
        CHECK_THROWS_AS(r.feed(Cell::frm(0, 1.0, 1.0)), std::logic_error);
    }
    SECTION("interleaved frames") {
        Reassembler r;
        r.feed(Cell::data(0, 1, 12, false, seg));
        CHECK_THROWS_AS(r.feed(Cell::data(0, 2, 12, false, seg)), std::logic_error);
    }
    SECTION("last cell arrives early") {
        Reassembler r;
        r.feed(Cell::data(0, 1, 12, false, seg));
        CHECK_THROWS_AS(r.feed(Cell::data(0, 1, 12, true, seg)), std::logic_error);
    }
    SECTION("frame runs past its length") {
        Reassembler r;
        for (int i = 0; i < 2; ++i) r.feed(Cell::data(0, 1, 2, false, seg));
        CHECK_THROWS_AS(r.feed(Cell::data(0, 1, 2, false, seg)), std::logic_error);
    }
}

TEST_CASE("first slot of a connection carries a forward RM cell") {
    SourceRig rig;
    rig.src.enqueue_segment(rig.seg512());
    rig.q.run_until(SimTime{} + msec(1));
    REQUIRE(rig.rx.size() == 13);  // FRM + 12 data cells
    CHECK(rig.rx[0].kind == CellKind::Frm);
    for (std::size_t i = 1; i < 13; ++i) CHECK(rig.rx[i].kind == CellKind::Data);
    CHECK(rig.rx[12].last_of_frame);
    CHECK_FALSE(rig.rx[11].last_of_frame);
    CHECK(rig.src.cells_emitted() == 13);
    CHECK(rig.src.frm_emitted() == 1);
    CHECK(rig.src.queued_segments() == 0);
}

TEST_CASE("frm fields carry peak rate as er and current rate as ccr") {
    SourceRig rig;
    rig.src.enqueue_segment(rig.seg512());
    rig.q.run_until(SimTime{} + msec(1));
    CHECK(rig.rx[0].rm.er == Catch::Approx(353'207.5472).epsilon(1e-9));
    CHECK(rig.rx[0].rm.ccr == Catch::Approx(353'207.5472).epsilon(1e-9));
    CHECK(rig.rx[0].rm.direction == RmDirection::Forward);
}

TEST_CASE("one rm slot in every 32 while the source stays busy") {
    SourceRig rig;
    for (int i = 0; i < 3; ++i) rig.src.enqueue_segment(rig.seg512(i * 512));
    rig.q.run_until(SimTime{} + msec(1));
    REQUIRE(rig.rx.size() == 38);  // 36 data + FRMs in slots 0 and 32
    for (std::size_t i = 0; i < rig.rx.size(); ++i) {
        bool is_frm = rig.rx[i].kind == CellKind::Frm;
        CHECK(is_frm == (i % 32 == 0));
    }
    CHECK(rig.src.frm_emitted() == 2);
}

TEST_CASE("cells leave at the allowed rate, one slot apart") {
    SourceRig rig;
    rig.src.enqueue_segment(rig.seg512());
    rig.q.run_until(SimTime{} + msec(1));
    REQUIRE(rig.at.size() == 13);
    for (std::size_t i = 1; i < rig.at.size(); ++i)
        CHECK((rig.at[i] - rig.at[i - 1]).ps == kSlot);
}

TEST_CASE("a backward RM retunes the pacer from the next emission on") {
    SourceRig rig;
    for (int i = 0; i < 4; ++i) rig.src.enqueue_segment(rig.seg512(i * 512));
    // Halve the rate mid-stream: 200k cells/s -> exactly 5 us spacing.
    rig.q.schedule(SimTime{} + SimDuration{10 * kSlot + kSlot / 2},
                   [&] { rig.src.on_brm(RmFields{200'000.0, 0.0, RmDirection::Backward}); });
    rig.q.run_until(SimTime{} + msec(2));
    REQUIRE(rig.at.size() == 50);  // FRM + 48 data + FRM at slot 32
    // Slot 11 was already scheduled at the old spacing; slot 12 is the first
    // gap computed at the new rate.
    CHECK((rig.at[11] - rig.at[10]).ps == kSlot);
    CHECK((rig.at[12] - rig.at[11]).ps == 5'000'000);
    CHECK((rig.at[49] - rig.at[48]).ps == 5'000'000);
    CHECK(rig.src.acr() == 200'000.0);
}

TEST_CASE("allowed rate is clamped to pcr above and mcr below") {
    AbrParams ap;
    ap.mcr = 150'000.0;
    SourceRig rig(ap);
    rig.src.on_brm(RmFields{1e9, 0.0, RmDirection::Backward});
    CHECK(rig.src.acr() == Catch::Approx(353'207.5472).epsilon(1e-9));
    rig.src.on_brm(RmFields{10.0, 0.0, RmDirection::Backward});
    CHECK(rig.src.acr() == 150'000.0);
}

TEST_CASE("pacer never bursts across an idle gap shorter than one slot") {
    SourceRig rig;
    TcpSegment ack{0, 0, 0, true, 512};
    rig.src.enqueue_segment(ack);  // FRM + 2 cells, slots 0..2
    rig.q.schedule(SimTime{} + SimDuration{2 * kSlot + kSlot / 2},
                   [&] { rig.src.enqueue_segment(ack); });
    rig.q.run_until(SimTime{} + msec(1));
    REQUIRE(rig.at.size() == 5);
    CHECK((rig.at[3] - rig.at[2]).ps == kSlot);
}

TEST_CASE("after a long idle spell the next segment goes out immediately") {
    SourceRig rig;
    rig.src.enqueue_segment(rig.seg512());
    rig.q.run_until(SimTime{} + msec(5));
    std::int64_t before = rig.src.cells_emitted();
    rig.src.enqueue_segment(rig.seg512(512));
    rig.q.run_until(rig.q.now() + SimDuration{1});
    CHECK(rig.src.cells_emitted() == before + 1);  // emitted at enqueue, not slot 13
}

TEST_CASE("ack segments occupy two cell slots") {
    SourceRig rig;
    TcpSegment ack{0, 0, 0, true, 1024};
    rig.src.enqueue_segment(ack);
    rig.q.run_until(SimTime{} + msec(1));
    REQUIRE(rig.rx.size() == 3);  // FRM + 2 data cells
    CHECK(rig.rx[1].seg_cells == 2);
    CHECK(rig.rx[2].last_of_frame);
    CHECK(rig.rx[2].seg.is_ack);
    CHECK(rig.rx[2].seg.ack_byte == 1024);
}

TEST_CASE("destination turns FRMs around with fields intact") {
    std::vector<TcpSegment> delivered;
    std::vector<Cell> reverse;
    AbrDest dst(3, [&](const TcpSegment& s) { delivered.push_back(s); },
                [&](Cell&& c) { reverse.push_back(c); });
    dst.on_cell(Cell::frm(3, 353'207.5, 120'000.0));
    REQUIRE(reverse.size() == 1);
    CHECK(reverse[0].kind == CellKind::Brm);
    CHECK(reverse[0].rm.direction == RmDirection::Backward);
    CHECK(reverse[0].rm.er == 353'207.5);
    CHECK(reverse[0].rm.ccr == 120'000.0);
    CHECK(delivered.empty());
    CHECK(dst.cells_received() == 1);
    CHECK(dst.reverse_cells_emitted() == 1);
}

TEST_CASE("destination reassembles data and hands segments up") {
    std::vector<TcpSegment> delivered;
    AbrDest dst(0, [&](const TcpSegment& s) { delivered.push_back(s); },
                [](Cell&&) {});
    TcpSegment seg{0, 2048, 512, false, 0};
    for (int i = 0; i < 12; ++i)
        dst.on_cell(Cell::data(0, 5, 12, i == 11, seg));
    REQUIRE(delivered.size() == 1);
    CHECK(delivered[0].offset == 2048);
    CHECK(delivered[0].length == 512);
}

TEST_CASE("destination acks ride the reverse path as two-cell frames") {
    std::vector<Cell> reverse;
    AbrDest dst(1, [](const TcpSegment&) {}, [&](Cell&& c) { reverse.push_back(c); });
    TcpSegment ack{1, 0, 0, true, 512};
    dst.send_ack(ack);
    dst.send_ack(ack);
    REQUIRE(reverse.size() == 4);
    CHECK(reverse[0].kind == CellKind::Data);
    CHECK_FALSE(reverse[0].last_of_frame);
    CHECK(reverse[1].last_of_frame);
    CHECK(reverse[0].seg_cells == 2);
    CHECK(reverse[0].seg.is_ack);
    CHECK(reverse[2].seg_id != reverse[0].seg_id);
    CHECK(dst.reverse_cells_emitted() == 4);
}

TEST_CASE("a backward RM reaching the destination is a wiring bug") {
    AbrDest dst(0, [](const TcpSegment&) {}, [](Cell&&) {});
    Cell brm = Cell::brm_from(Cell::frm(0, 1.0, 1.0));
    CHECK_THROWS_AS(dst.on_cell(std::move(brm)), std::logic_error);
}
