#include "reasm/checksum.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif

namespace reasm {
namespace detail {

namespace {

// Folds a 64-bit accumulator of native-endian 16-bit word sums and converts
// to the big-endian word sum. One's-complement addition commutes with a
// byte rotation of every operand, so summing little-endian words and
// swapping the folded result equals summing big-endian words directly.
uint16_t fold_native(uint64_t acc) {
    acc = (acc & 0xFFFFFFFFull) + (acc >> 32);
    acc = (acc & 0xFFFFull) + (acc >> 16);
    acc = (acc & 0xFFFFull) + (acc >> 16);
    uint16_t host = static_cast<uint16_t>(acc);
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__
    host = static_cast<uint16_t>((host << 8) | (host >> 8));
#endif
    return host;
}

}  // namespace

uint16_t oc_sum_scalar(const uint8_t* data, size_t len) {
    uint64_t acc = 0;
    size_t i = 0;
    for (; i + 1 < len; i += 2) {
        acc += static_cast<uint16_t>(data[i] | (data[i + 1] << 8));
    }
    if (i < len) acc += data[i];  // trailing byte is the high (first) byte of a padded word
    return fold_native(acc);
}

#if defined(__x86_64__) || defined(_M_X64)

__attribute__((target("avx2")))
uint16_t oc_sum_avx2(const uint8_t* data, size_t len) {
    __m256i acc = _mm256_setzero_si256();
    const __m256i zero = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 32 <= len; i += 32) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        // Widen the sixteen 16-bit lanes to 32 bits before accumulating so
        // lane carries cannot be lost; 2^16 iterations would be needed to
        // overflow a 32-bit lane, far beyond any frame size here.
        acc = _mm256_add_epi32(acc, _mm256_unpacklo_epi16(v, zero));
        acc = _mm256_add_epi32(acc, _mm256_unpackhi_epi16(v, zero));
    }
    alignas(32) uint32_t lanes[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    uint64_t total = 0;
    for (uint32_t lane : lanes) total += lane;
    // Scalar tail, fed as raw words into the same accumulator.
    for (; i + 1 < len; i += 2) {
        total += static_cast<uint16_t>(data[i] | (data[i + 1] << 8));
    }
    if (i < len) total += data[i];
    return fold_native(total);
}

#endif  // x86_64

namespace {

using SumFn = uint16_t (*)(const uint8_t*, size_t);

struct Kernel {
    SumFn fn;
    const char* name;
};

Kernel pick_kernel() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return {oc_sum_avx2, "avx2"};
#endif
    return {oc_sum_scalar, "scalar"};
}

const Kernel g_kernel = pick_kernel();

}  // namespace

const char* oc_sum_kernel_name() { return g_kernel.name; }

}  // namespace detail

uint16_t oc_sum(std::span<const uint8_t> data) {
    return detail::g_kernel.fn(data.data(), data.size());
}

uint16_t oc_sum_accumulate(uint16_t acc, std::span<const uint8_t> data) {
    // Only valid for even-length prefixes; all callers feed whole headers.
    return oc_add(acc, oc_sum(data));
}

uint16_t internet_checksum(std::span<const uint8_t> data) {
    return static_cast<uint16_t>(~oc_sum(data));
}

}  // namespace reasm
