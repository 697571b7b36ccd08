#include "reasm/allen.hpp"

#include <stdexcept>

namespace reasm {

namespace {

constexpr std::array<std::string_view, kRelationCount> kNames = {
    "B", "Bi", "M", "Mi", "O", "Oi", "S", "Si", "D", "Di", "F", "Fi", "Eq"};

}  // namespace

bool is_overlapping(AllenRelation r) {
    switch (r) {
        case AllenRelation::B:
        case AllenRelation::Bi:
        case AllenRelation::M:
        case AllenRelation::Mi:
            return false;
        default:
            return true;
    }
}

AllenRelation invert(AllenRelation r) {
    if (r == AllenRelation::Eq) return AllenRelation::Eq;
    // Relation pairs sit next to each other in the enum: B/Bi, M/Mi, ...
    auto v = static_cast<uint8_t>(r);
    return static_cast<AllenRelation>(v ^ 1u);
}

std::string_view relation_name(AllenRelation r) {
    return kNames[static_cast<size_t>(r)];
}

AllenRelation relation_from_name(std::string_view name) {
    for (int i = 0; i < kRelationCount; ++i) {
        if (kNames[i] == name) return static_cast<AllenRelation>(i);
    }
    throw std::invalid_argument("unknown Allen relation name: " + std::string(name));
}

AllenRelation relate(const CellInterval& x, const CellInterval& y) {
    if (x.start >= x.end || y.start >= y.end) {
        throw std::invalid_argument("relate: malformed interval (start >= end)");
    }
    if (x.end < y.start) return AllenRelation::B;
    if (y.end < x.start) return AllenRelation::Bi;
    if (x.end == y.start) return AllenRelation::M;
    if (y.end == x.start) return AllenRelation::Mi;
    if (x.start == y.start) {
        if (x.end == y.end) return AllenRelation::Eq;
        return x.end < y.end ? AllenRelation::S : AllenRelation::Si;
    }
    if (x.end == y.end) {
        return x.start > y.start ? AllenRelation::F : AllenRelation::Fi;
    }
    if (x.start < y.start) {
        return x.end < y.end ? AllenRelation::O : AllenRelation::Di;
    }
    return x.end < y.end ? AllenRelation::D : AllenRelation::Oi;
}

int RelationSequence::pair_slot(int n, int i, int j) {
    if (n == 2) return 0;
    // n == 3: (0,1) -> 0, (0,2) -> 1, (1,2) -> 2
    if (i == 0) return j - 1;
    return 2;
}

std::string RelationSequence::label() const {
    std::string out;
    for (size_t k = 0; k < relations.size(); ++k) {
        if (k) out += '-';
        out += relation_name(relations[k]);
    }
    return out;
}

RelationSequence RelationSequence::from_label(int n, std::string_view label) {
    RelationSequence seq;
    seq.n = n;
    size_t pos = 0;
    while (pos <= label.size()) {
        size_t dash = label.find('-', pos);
        std::string_view part = label.substr(pos, dash == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : dash - pos);
        seq.relations.push_back(relation_from_name(part));
        if (dash == std::string_view::npos) break;
        pos = dash + 1;
    }
    size_t expected = static_cast<size_t>(n * (n - 1) / 2);
    if (seq.relations.size() != expected) {
        throw std::invalid_argument("relation label has wrong arity: " + std::string(label));
    }
    return seq;
}

namespace {

// Depth-first search over integer endpoints in [0, bound] assigning chunks
// in time order. Visiting (s_k, e_k) in ascending order makes the first
// complete solution the lexicographic minimum of the endpoint tuple.
bool search_assignment(const RelationSequence& seq, std::vector<CellInterval>& acc, int bound) {
    int k = static_cast<int>(acc.size());
    if (k == seq.n) return true;
    for (int s = 0; s <= bound - 1; ++s) {
        for (int e = s + 1; e <= bound; ++e) {
            CellInterval cand{s, e};
            bool ok = true;
            for (int i = 0; i < k && ok; ++i) {
                int slot = RelationSequence::pair_slot(seq.n, i, k);
                ok = relate(acc[i], cand) == seq.relations[static_cast<size_t>(slot)];
            }
            if (!ok) continue;
            acc.push_back(cand);
            if (search_assignment(seq, acc, bound)) return true;
            acc.pop_back();
        }
    }
    return false;
}

void check_arity(const RelationSequence& seq) {
    if (seq.n != 2 && seq.n != 3) {
        throw std::invalid_argument("relation sequences support n = 2 or 3");
    }
    size_t expected = static_cast<size_t>(seq.n * (seq.n - 1) / 2);
    if (seq.relations.size() != expected) {
        throw std::invalid_argument("relation sequence arity does not match n");
    }
}

}  // namespace

bool is_coherent(const RelationSequence& seq) {
    check_arity(seq);
    std::vector<CellInterval> acc;
    acc.reserve(static_cast<size_t>(seq.n));
    return search_assignment(seq, acc, 2 * seq.n);
}

std::vector<RelationSequence> enumerate_coherent(int n) {
    if (n != 2 && n != 3) {
        throw std::invalid_argument("enumerate_coherent supports n = 2 or 3");
    }
    std::vector<RelationSequence> out;
    if (n == 2) {
        // Every single relation is realizable.
        for (AllenRelation r : all_relations()) {
            out.push_back(RelationSequence{2, {r}});
        }
        return out;
    }
    for (AllenRelation p01 : all_relations()) {
        for (AllenRelation p02 : all_relations()) {
            for (AllenRelation p12 : all_relations()) {
                RelationSequence seq{3, {p01, p02, p12}};
                if (is_coherent(seq)) out.push_back(std::move(seq));
            }
        }
    }
    return out;
}

IntervalAssignment quantify(const RelationSequence& seq) {
    check_arity(seq);
    std::vector<CellInterval> acc;
    acc.reserve(static_cast<size_t>(seq.n));
    if (!search_assignment(seq, acc, 2 * seq.n)) {
        throw std::invalid_argument("quantify: incoherent relation sequence " + seq.label());
    }
    return IntervalAssignment{std::move(acc)};
}

}  // namespace reasm
