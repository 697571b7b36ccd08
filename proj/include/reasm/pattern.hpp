// Checksum-impactless 8-byte payload cells: six ASCII digits identifying
// (chunk id, cell offset) followed by a two-byte correction word that pins
// the cell's one's-complement contribution to a fixed per-family target.
#ifndef REASM_PATTERN_HPP
#define REASM_PATTERN_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>

namespace reasm {

inline constexpr int kCellBytes = 8;

// The v4 family (used by IPv4 and TCP payloads) sums to -0; the v6 family
// sums to -8 per cell, cancelling the ICMPv6 pseudo-header length growth of
// 8 bytes per cell.
enum class PatternFamily : uint8_t { v4, v6 };

inline constexpr uint16_t pattern_target(PatternFamily family) {
    return family == PatternFamily::v4 ? 0xFFFF : 0xFFF7;
}

using CellBytes = std::array<uint8_t, kCellBytes>;

// chunk_id and cell_index must be below 1000.
CellBytes pattern_for(int chunk_id, int cell_index, PatternFamily family);

struct DecodedCell {
    int chunk_id;
    int cell_index;
};

// Reverses pattern_for; nullopt for anything else (filler, foreign data,
// corrupted correction bytes).
std::optional<DecodedCell> decode_pattern(std::span<const uint8_t> cell, PatternFamily family);

}  // namespace reasm

#endif
