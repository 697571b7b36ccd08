#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "reasm/checksum.hpp"

using namespace reasm;

TEST_CASE("one's-complement add and subtract") {
    CHECK(oc_add(0x0001, 0x0002) == 0x0003);
    CHECK(oc_add(0xFFFF, 0x0001) == 0x0001);  // end-around carry
    CHECK(oc_add(0x9091, 0x6F6E) == 0xFFFF);
    // +0 (0x0000) and -0 (0xFFFF) are the same value in this arithmetic.
    auto same = [](uint16_t x, uint16_t y) {
        return x == y || (x == 0 && y == 0xFFFF) || (x == 0xFFFF && y == 0);
    };
    for (uint32_t a : {0u, 1u, 0x1234u, 0x8000u, 0xFFFEu, 0xFFFFu}) {
        for (uint32_t b : {0u, 7u, 0x00FFu, 0xFFF7u, 0xFFFFu}) {
            uint16_t d = oc_sub(static_cast<uint16_t>(a), static_cast<uint16_t>(b));
            CHECK(same(oc_add(d, static_cast<uint16_t>(b)), static_cast<uint16_t>(a)));
        }
    }
}

TEST_CASE("byte-stream sum matches the naive oracle") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    for (size_t len = 0; len <= 130; ++len) {
        std::vector<uint8_t> data(len);
        for (auto& b : data) b = static_cast<uint8_t>(byte(rng));
        CHECK(oc_sum(data) == oracle::oc_sum(data));
        // Both kernels must agree regardless of which one dispatch picked.
        CHECK(detail::oc_sum_scalar(data.data(), data.size()) == oracle::oc_sum(data));
#if defined(__x86_64__)
        if (__builtin_cpu_supports("avx2")) {
            CHECK(detail::oc_sum_avx2(data.data(), data.size()) == oracle::oc_sum(data));
        }
#endif
    }
}

TEST_CASE("kernel equivalence on large unaligned buffers") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<uint8_t> data(4096 + 31);
    for (auto& b : data) b = static_cast<uint8_t>(byte(rng));
    for (size_t offset : {0u, 1u, 2u, 3u, 15u, 16u, 17u, 31u}) {
        for (size_t len : {0u, 1u, 31u, 32u, 33u, 63u, 64u, 65u, 1000u, 4096u}) {
            std::vector<uint8_t> view(data.begin() + static_cast<long>(offset),
                                      data.begin() + static_cast<long>(offset + len));
            uint16_t expect = oracle::oc_sum(view);
            CHECK(detail::oc_sum_scalar(data.data() + offset, len) == expect);
#if defined(__x86_64__)
            if (__builtin_cpu_supports("avx2")) {
                CHECK(detail::oc_sum_avx2(data.data() + offset, len) == expect);
            }
#endif
        }
    }
}

TEST_CASE("internet checksum validates a checksummed buffer") {
    std::vector<uint8_t> data = {0x45, 0x00, 0x00, 0x28, 0x12, 0x34, 0x40, 0x00,
                                 0x40, 0x06, 0x00, 0x00, 0x0A, 0x00, 0x00, 0x01,
                                 0x0A, 0x00, 0x00, 0x02};
    uint16_t cksum = internet_checksum(data);
    data[10] = static_cast<uint8_t>(cksum >> 8);
    data[11] = static_cast<uint8_t>(cksum & 0xFF);
    CHECK(oracle::checksum_valid(data));
}
