// One's-complement (Internet) checksum arithmetic. The byte-stream sum has
// a scalar reference kernel and an AVX2 variant picked at runtime; both
// return the folded 16-bit sum over big-endian words.
#ifndef REASM_CHECKSUM_HPP
#define REASM_CHECKSUM_HPP

#include <cstddef>
#include <cstdint>
#include <span>

namespace reasm {

// a + b with end-around carry.
inline uint16_t oc_add(uint16_t a, uint16_t b) {
    uint32_t s = static_cast<uint32_t>(a) + b;
    return static_cast<uint16_t>((s & 0xFFFFu) + (s >> 16));
}

// a - b in one's-complement arithmetic: oc_add(result, b) == a.
inline uint16_t oc_sub(uint16_t a, uint16_t b) {
    return oc_add(a, static_cast<uint16_t>(~b));
}

namespace detail {
uint16_t oc_sum_scalar(const uint8_t* data, size_t len);
#if defined(__x86_64__) || defined(_M_X64)
uint16_t oc_sum_avx2(const uint8_t* data, size_t len);
#endif
const char* oc_sum_kernel_name();
}  // namespace detail

// Folded one's-complement sum of the buffer taken as 16-bit big-endian
// words; an odd trailing byte is padded with a zero low byte.
uint16_t oc_sum(std::span<const uint8_t> data);

// Continues a running sum with another buffer.
uint16_t oc_sum_accumulate(uint16_t acc, std::span<const uint8_t> data);

// RFC 1071 checksum: complement of oc_sum.
uint16_t internet_checksum(std::span<const uint8_t> data);

}  // namespace reasm

#endif
