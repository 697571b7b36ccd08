#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "reasm/pattern.hpp"

using namespace reasm;

namespace {

std::string as_text(const CellBytes& cell) {
    return std::string(reinterpret_cast<const char*>(cell.data()), cell.size());
}

}  // namespace

TEST_CASE("v4 pattern bytes render the documented text") {
    CHECK(as_text(pattern_for(0, 1, PatternFamily::v4)) == "000001on");
    CHECK(as_text(pattern_for(2, 0, PatternFamily::v4)) == "002000mo");
    CHECK(as_text(pattern_for(1, 3, PatternFamily::v4)) == "001003nl");
}

TEST_CASE("every cell sums to its family target") {
    for (int chunk : {0, 1, 2, 3, 4, 17, 999}) {
        for (int cell : {0, 1, 2, 7, 500, 999}) {
            for (PatternFamily fam : {PatternFamily::v4, PatternFamily::v6}) {
                CellBytes bytes = pattern_for(chunk, cell, fam);
                std::vector<uint8_t> v(bytes.begin(), bytes.end());
                CHECK(oracle::oc_sum(v) == pattern_target(fam));
            }
        }
    }
}

TEST_CASE("any concatenation of v4 cells is checksum-neutral") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick(0, 999);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<uint8_t> data;
        int cells = 1 + trial % 9;
        for (int k = 0; k < cells; ++k) {
            CellBytes b = pattern_for(pick(rng), pick(rng), PatternFamily::v4);
            data.insert(data.end(), b.begin(), b.end());
        }
        CHECK(oracle::oc_sum(data) == 0xFFFF);
    }
}

TEST_CASE("decode inverts encode and rejects foreign bytes") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> pick(0, 999);
    for (int trial = 0; trial < 200; ++trial) {
        int chunk = pick(rng), cell = pick(rng);
        PatternFamily fam = trial % 2 ? PatternFamily::v6 : PatternFamily::v4;
        CellBytes bytes = pattern_for(chunk, cell, fam);
        auto decoded = decode_pattern(bytes, fam);
        REQUIRE(decoded.has_value());
        CHECK(decoded->chunk_id == chunk);
        CHECK(decoded->cell_index == cell);
        // The other family's correction word must not validate.
        PatternFamily other = fam == PatternFamily::v4 ? PatternFamily::v6 : PatternFamily::v4;
        CHECK_FALSE(decode_pattern(bytes, other).has_value());
    }
    CellBytes filler;
    filler.fill('.');
    CHECK_FALSE(decode_pattern(filler, PatternFamily::v4).has_value());
    CHECK_THROWS_AS(pattern_for(1000, 0, PatternFamily::v4), std::out_of_range);
}
