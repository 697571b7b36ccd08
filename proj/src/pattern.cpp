#include "reasm/pattern.hpp"

#include <stdexcept>

#include "reasm/checksum.hpp"

namespace reasm {

CellBytes pattern_for(int chunk_id, int cell_index, PatternFamily family) {
    if (chunk_id < 0 || chunk_id > 999 || cell_index < 0 || cell_index > 999) {
        throw std::out_of_range("pattern_for: chunk id and cell index must be in 0..999");
    }
    CellBytes out{};
    out[0] = static_cast<uint8_t>('0' + chunk_id / 100);
    out[1] = static_cast<uint8_t>('0' + chunk_id / 10 % 10);
    out[2] = static_cast<uint8_t>('0' + chunk_id % 10);
    out[3] = static_cast<uint8_t>('0' + cell_index / 100);
    out[4] = static_cast<uint8_t>('0' + cell_index / 10 % 10);
    out[5] = static_cast<uint8_t>('0' + cell_index % 10);
    uint16_t digit_sum = 0;
    for (int w = 0; w < 3; ++w) {
        digit_sum = oc_add(digit_sum, static_cast<uint16_t>((out[2 * w] << 8) | out[2 * w + 1]));
    }
    uint16_t correction = oc_sub(pattern_target(family), digit_sum);
    out[6] = static_cast<uint8_t>(correction >> 8);
    out[7] = static_cast<uint8_t>(correction & 0xFF);
    return out;
}

std::optional<DecodedCell> decode_pattern(std::span<const uint8_t> cell, PatternFamily family) {
    if (cell.size() != kCellBytes) return std::nullopt;
    for (int i = 0; i < 6; ++i) {
        if (cell[static_cast<size_t>(i)] < '0' || cell[static_cast<size_t>(i)] > '9') {
            return std::nullopt;
        }
    }
    int chunk_id = (cell[0] - '0') * 100 + (cell[1] - '0') * 10 + (cell[2] - '0');
    int cell_index = (cell[3] - '0') * 100 + (cell[4] - '0') * 10 + (cell[5] - '0');
    CellBytes expected = pattern_for(chunk_id, cell_index, family);
    if (expected[6] != cell[6] || expected[7] != cell[7]) return std::nullopt;
    return DecodedCell{chunk_id, cell_index};
}

}  // namespace reasm
