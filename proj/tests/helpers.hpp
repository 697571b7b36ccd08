// Independent oracles used by the tests. These deliberately avoid the
// library's code paths: relations via a decision table over endpoint
// comparisons, checksums via word-at-a-time end-around-carry addition,
// reassembly via cell painting.
#ifndef REASM_TEST_HELPERS_HPP
#define REASM_TEST_HELPERS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "reasm/allen.hpp"
#include "reasm/corpus.hpp"

namespace oracle {

// Endpoint-comparison decision table, written independently of
// reasm::relate's branch structure.
inline reasm::AllenRelation relate(int xs, int xe, int ys, int ye) {
    using R = reasm::AllenRelation;
    // Compare all four endpoint pairs explicitly.
    auto sgn = [](int a, int b) { return a < b ? -1 : a > b ? 1 : 0; };
    int c_ss = sgn(xs, ys), c_ee = sgn(xe, ye), c_se = sgn(xs, ye), c_es = sgn(xe, ys);
    if (c_es < 0) return R::B;
    if (c_se > 0) return R::Bi;
    if (c_es == 0) return R::M;
    if (c_se == 0) return R::Mi;
    if (c_ss == 0 && c_ee == 0) return R::Eq;
    if (c_ss == 0) return c_ee < 0 ? R::S : R::Si;
    if (c_ee == 0) return c_ss > 0 ? R::F : R::Fi;
    if (c_ss < 0 && c_ee < 0) return R::O;
    if (c_ss > 0 && c_ee > 0) return R::Oi;
    if (c_ss > 0 && c_ee < 0) return R::D;
    return R::Di;
}

// The set of relation triples realizable by three integer intervals with
// endpoints in [0, 6], built by forward enumeration of all placements.
inline const std::set<std::array<reasm::AllenRelation, 3>>& realizable_triples() {
    static const std::set<std::array<reasm::AllenRelation, 3>> table = [] {
        std::set<std::array<reasm::AllenRelation, 3>> out;
        for (int s0 = 0; s0 <= 6; ++s0)
            for (int e0 = s0 + 1; e0 <= 6; ++e0)
                for (int s1 = 0; s1 <= 6; ++s1)
                    for (int e1 = s1 + 1; e1 <= 6; ++e1)
                        for (int s2 = 0; s2 <= 6; ++s2)
                            for (int e2 = s2 + 1; e2 <= 6; ++e2) {
                                out.insert({relate(s0, e0, s1, e1), relate(s0, e0, s2, e2),
                                            relate(s1, e1, s2, e2)});
                            }
        return out;
    }();
    return table;
}

// RFC 1071-style sum over big-endian words, one end-around carry per add.
inline uint16_t oc_sum(const std::vector<uint8_t>& data) {
    uint32_t acc = 0;
    for (size_t i = 0; i < data.size(); i += 2) {
        uint16_t word = static_cast<uint16_t>(data[i] << 8);
        if (i + 1 < data.size()) word |= data[i + 1];
        acc += word;
        if (acc > 0xFFFF) acc = (acc & 0xFFFF) + 1;
    }
    return static_cast<uint16_t>(acc);
}

inline bool checksum_valid(const std::vector<uint8_t>& data) { return oc_sum(data) == 0xFFFF; }

// First-writer-wins painting with the incremental IP completion rule: after
// each fragment, if any MF-unset fragment has been seen, the datagram
// completes once every cell below the largest such end is painted.
struct IpPaintResult {
    bool delivered = false;
    std::vector<int> cells;
};

inline IpPaintResult paint_ip(const std::vector<reasm::ChunkSpec>& chunks, bool last_writer) {
    IpPaintResult result;
    std::map<int, int> painted;
    int total = -1;
    for (const auto& c : chunks) {
        for (int cell = c.start_cell; cell < c.end_cell; ++cell) {
            if (last_writer || !painted.count(cell)) painted[cell] = c.chunk_id;
        }
        if (c.mf_unset) total = std::max(total, c.end_cell);
        if (total >= 0) {
            bool covered = true;
            for (int cell = 0; cell < total; ++cell) covered &= painted.count(cell) > 0;
            if (covered) {
                result.delivered = true;
                for (int cell = 0; cell < total; ++cell) result.cells.push_back(painted[cell]);
                return result;
            }
        }
    }
    return result;
}

// Painting with a delivery pointer: cells below it are frozen, and it
// advances over contiguous painted cells after every segment.
inline std::vector<int> paint_tcp(const std::vector<reasm::ChunkSpec>& chunks, bool last_writer) {
    std::map<int, int> painted;
    int pointer = 0;
    for (const auto& c : chunks) {
        for (int cell = std::max(c.start_cell, pointer); cell < c.end_cell; ++cell) {
            if (last_writer || !painted.count(cell)) painted[cell] = c.chunk_id;
        }
        while (painted.count(pointer)) ++pointer;
    }
    std::vector<int> out;
    for (int cell = 0; cell < pointer; ++cell) out.push_back(painted[cell]);
    return out;
}

// Renders "000001on 002000mo" style text into payload bytes.
inline std::vector<uint8_t> payload_from_text(const std::string& text) {
    std::vector<uint8_t> out;
    for (char ch : text) {
        if (ch == ' ') continue;
        out.push_back(static_cast<uint8_t>(ch));
    }
    return out;
}

}  // namespace oracle

#endif
