#pragma once

#include <cstdint>

namespace abrsim {

// One TCP segment as handed to the ATM adaptation layer. ACKs are segments
// with zero payload carrying only the cumulative ack number.
struct TcpSegment {
    int vc = 0;
    std::int64_t offset = 0;   // first payload byte (data segments)
    int length = 0;            // payload bytes; 0 for pure ACKs
    bool is_ack = false;
    std::int64_t ack_byte = 0; // cumulative ack (ACK segments)
};

enum class CellKind : std::uint8_t { Data, Frm, Brm };

enum class RmDirection : std::uint8_t { Forward, Backward };

// Explicit-rate fields of a resource-management cell. Rates are cells/s.
struct RmFields {
    double er = 0.0;
    double ccr = 0.0;
    RmDirection direction = RmDirection::Forward;
};

// A 53-byte ATM cell. Data cells carry their segment descriptor so the far
// end can reassemble without a side channel; seg_cells is the frame length.
struct Cell {
    int vc = 0;
    CellKind kind = CellKind::Data;
    std::int64_t seg_id = 0;
    int seg_cells = 0;
    bool last_of_frame = false;
    TcpSegment seg{};
    RmFields rm{};

    static Cell data(int vc, std::int64_t seg_id, int seg_cells, bool last,
                     const TcpSegment& seg) {
        Cell c;
        c.vc = vc;
        c.kind = CellKind::Data;
        c.seg_id = seg_id;
        c.seg_cells = seg_cells;
        c.last_of_frame = last;
        c.seg = seg;
        return c;
    }

    static Cell frm(int vc, double er, double ccr) {
        Cell c;
        c.vc = vc;
        c.kind = CellKind::Frm;
        c.rm = RmFields{er, ccr, RmDirection::Forward};
        return c;
    }

    // Destination turnaround: the FRM comes back as a BRM with the same
    // rate fields, ready for switches to stamp on the way home.
    static Cell brm_from(const Cell& frm_cell) {
        Cell c = frm_cell;
        c.kind = CellKind::Brm;
        c.rm.direction = RmDirection::Backward;
        return c;
    }
};

}  // namespace abrsim
