// Allen interval algebra over cell extents: the 13 atomic relations,
// coherence checking of relation sequences, and canonical quantification
// into integer cell intervals.
#ifndef REASM_ALLEN_HPP
#define REASM_ALLEN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reasm {

// Tag order is the enumeration order used everywhere a deterministic
// ordering of relations is needed (corpus ids, lexicographic sequence
// enumeration).
enum class AllenRelation : uint8_t {
    B = 0,   // x before y        (xe < ys, gap of at least one cell)
    Bi,      // y before x
    M,       // x meets y         (xe == ys)
    Mi,      // y meets x
    O,       // x overlaps y      (xs < ys < xe < ye)
    Oi,      // y overlaps x
    S,       // x starts y        (xs == ys, xe < ye)
    Si,      // y starts x
    D,       // x during y        (ys < xs, xe < ye)
    Di,      // y during x
    F,       // x finishes y      (ys < xs, xe == ye)
    Fi,      // y finishes x
    Eq,      // equal
};

inline constexpr int kRelationCount = 13;

inline constexpr std::array<AllenRelation, kRelationCount> all_relations() {
    return {AllenRelation::B,  AllenRelation::Bi, AllenRelation::M,
            AllenRelation::Mi, AllenRelation::O,  AllenRelation::Oi,
            AllenRelation::S,  AllenRelation::Si, AllenRelation::D,
            AllenRelation::Di, AllenRelation::F,  AllenRelation::Fi,
            AllenRelation::Eq};
}

// The four relations with disjoint extents; the other nine overlap.
bool is_overlapping(AllenRelation r);

AllenRelation invert(AllenRelation r);

std::string_view relation_name(AllenRelation r);

// Parses "O", "Oi", ... Throws std::invalid_argument on unknown names.
AllenRelation relation_from_name(std::string_view name);

// Half-open extent in 8-byte cells.
struct CellInterval {
    int start = 0;
    int end = 0;

    int length() const { return end - start; }
    bool operator==(const CellInterval&) const = default;
};

// Relation of x to y. Both intervals must satisfy start < end.
AllenRelation relate(const CellInterval& x, const CellInterval& y);

// The C(n,2) relations linking n time-ordered chunks: (p01) for n = 2,
// (p01, p02, p12) for n = 3. Pair indices refer to send order, chunk 0
// being the oldest.
struct RelationSequence {
    int n = 2;
    std::vector<AllenRelation> relations;

    // Index into relations for the pair (i, j), i < j < n.
    static int pair_slot(int n, int i, int j);

    // "O" for pairs, "O-D-Oi" for triplets.
    std::string label() const;
    static RelationSequence from_label(int n, std::string_view label);

    bool operator==(const RelationSequence&) const = default;
    auto operator<=>(const RelationSequence&) const = default;
};

// One concrete extent per chunk; index position is the chunk's time index.
struct IntervalAssignment {
    std::vector<CellInterval> chunks;
};

// True iff some assignment of integer endpoints realizes every relation of
// the sequence. Decided by exhaustive search over endpoints in [0, 2n]; n
// intervals need at most 2n distinct endpoint values, so the bound loses
// nothing.
bool is_coherent(const RelationSequence& seq);

// All coherent sequences for n chunks, in lexicographic order of the
// relation tag indices. n must be 2 or 3.
std::vector<RelationSequence> enumerate_coherent(int n);

// Canonical assignment: the lexicographically smallest non-negative integer
// tuple (s0, e0, s1, e1, ...) realizing the sequence. Throws on incoherent
// input.
IntervalAssignment quantify(const RelationSequence& seq);

}  // namespace reasm

#endif
