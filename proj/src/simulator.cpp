#include "reasm/simulator.hpp"

#include <algorithm>
#include <stdexcept>

namespace reasm {

namespace {

constexpr std::array<std::string_view, 3> kPolicyNames = {"old", "new", "ignore"};

}  // namespace

std::string_view pair_policy_name(PairPolicy p) { return kPolicyNames[static_cast<size_t>(p)]; }

PairPolicy pair_policy_from_name(std::string_view name) {
    for (size_t i = 0; i < kPolicyNames.size(); ++i) {
        if (kPolicyNames[i] == name) return static_cast<PairPolicy>(i);
    }
    if (name == "ignores") return PairPolicy::ignore_chunks;
    throw std::invalid_argument("unknown pair policy: " + std::string(name));
}

PolicyTable::PolicyTable() { entries_.fill(PairPolicy::old_data); }

PolicyTable PolicyTable::uniform(PairPolicy p) {
    PolicyTable t;
    t.entries_.fill(p);
    return t;
}

PairPolicy PolicyTable::at(AllenRelation r) const {
    if (!is_overlapping(r)) {
        throw std::invalid_argument("policy table has no entry for non-overlapping relation " +
                                    std::string(relation_name(r)));
    }
    return entries_[static_cast<size_t>(r)];
}

void PolicyTable::set(AllenRelation r, PairPolicy p) {
    if (!is_overlapping(r)) {
        throw std::invalid_argument("cannot set policy for non-overlapping relation");
    }
    entries_[static_cast<size_t>(r)] = p;
}

std::map<std::string, std::string> PolicyTable::to_map() const {
    std::map<std::string, std::string> out;
    for (AllenRelation r : all_relations()) {
        if (is_overlapping(r)) {
            out.emplace(relation_name(r), pair_policy_name(at(r)));
        }
    }
    return out;
}

PolicyTable PolicyTable::from_map(const std::map<std::string, std::string>& m) {
    PolicyTable t;
    for (const auto& [rel, pol] : m) {
        t.set(relation_from_name(rel), pair_policy_from_name(pol));
    }
    return t;
}

namespace {

struct PresetRow {
    std::string_view name;
    MechanismConfig config;
};

const std::array<PresetRow, 18> kPresets = {{
    {"aimnipa", {Alteration::immediate, Merging::none, IgnoreInterp::pair_drop}},
    {"aimnipn", {Alteration::immediate, Merging::none, IgnoreInterp::pair_newest_drop}},
    {"aimnita", {Alteration::immediate, Merging::none, IgnoreInterp::triplet_all_drop}},
    {"admnita", {Alteration::delayed, Merging::none, IgnoreInterp::triplet_all_drop}},
    {"aimaipa", {Alteration::immediate, Merging::any, IgnoreInterp::pair_drop}},
    {"aimaipn", {Alteration::immediate, Merging::any, IgnoreInterp::pair_newest_drop}},
    {"aimaita", {Alteration::immediate, Merging::any, IgnoreInterp::triplet_all_drop}},
    {"admaita", {Alteration::delayed, Merging::any, IgnoreInterp::triplet_all_drop}},
    {"aimmipa", {Alteration::immediate, Merging::meet, IgnoreInterp::pair_drop}},
    {"aimmipn", {Alteration::immediate, Merging::meet, IgnoreInterp::pair_newest_drop}},
    {"aimmita", {Alteration::immediate, Merging::meet, IgnoreInterp::triplet_all_drop}},
    {"admmita", {Alteration::delayed, Merging::meet, IgnoreInterp::triplet_all_drop}},
    {"aimn", {Alteration::immediate, Merging::none, std::nullopt}},
    {"admn", {Alteration::delayed, Merging::none, std::nullopt}},
    {"aima", {Alteration::immediate, Merging::any, std::nullopt}},
    {"adma", {Alteration::delayed, Merging::any, std::nullopt}},
    {"aimm", {Alteration::immediate, Merging::meet, std::nullopt}},
    {"admm", {Alteration::delayed, Merging::meet, std::nullopt}},
}};

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& row : kPresets) out.emplace_back(row.name);
        return out;
    }();
    return names;
}

bool preset_is_ip(const std::string& name) { return preset(name).ignore_interp.has_value(); }

MechanismConfig preset(const std::string& name) {
    for (const auto& row : kPresets) {
        if (row.name == name) return row.config;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

namespace {

using Entry = detail::SimEntry;

Entry make_entry(const ChunkSpec& chunk, uint32_t arrival, int clamp_start) {
    Entry e;
    e.start = std::max(chunk.start_cell, clamp_start);
    e.end = chunk.end_cell;
    e.arrival = arrival;
    for (int c = e.start; c < e.end; ++c) e.cells.push_back(chunk.chunk_id);
    return e;
}

// Removes [a, b) from e; the survivors land in out (zero, one or two runs).
void subtract_range(const Entry& e, int a, int b, std::vector<Entry>& out) {
    if (b <= e.start || a >= e.end) {
        out.push_back(e);
        return;
    }
    if (a > e.start) {
        Entry left{e.start, a, {}, e.arrival};
        left.cells.assign(e.cells.begin(), e.cells.begin() + (a - e.start));
        out.push_back(std::move(left));
    }
    if (b < e.end) {
        Entry right{b, e.end, {}, e.arrival};
        right.cells.assign(e.cells.begin() + (b - e.start), e.cells.end());
        out.push_back(std::move(right));
    }
}

bool intervals_overlap(int s1, int e1, int s2, int e2) {
    return std::max(s1, s2) < std::min(e1, e2);
}

struct ResolveResult {
    std::vector<Entry> pieces;     // surviving newcomer runs, to insert
    bool newcomer_dropped = false; // an ignore interpretation removed the arrival
    bool flow_poisoned = false;    // triplet_all_drop fired
};

// Resolves one arrival against the queue. Comparison order is fixed at
// arrival time: ascending start, ties by arrival index. `new` trims apply
// to queue entries right away in both alteration modes; the alteration knob
// only controls whether the newcomer's own extent updates between
// comparisons (immediate) or all its trims land at insertion (delayed).
ResolveResult resolve_arrival(std::vector<Entry>& queue, Entry newcomer, const PolicyTable& policy,
                              Alteration alteration, IgnoreInterp interp) {
    ResolveResult result;
    if (newcomer.empty()) return result;

    std::vector<size_t> order(queue.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (queue[a].start != queue[b].start) return queue[a].start < queue[b].start;
        return queue[a].arrival < queue[b].arrival;
    });

    const CellInterval original = newcomer.extent();
    std::vector<Entry> pieces{std::move(newcomer)};
    std::vector<std::pair<int, int>> deferred_cuts;

    auto erase_queue_entry = [&](size_t qi) { queue[qi].start = queue[qi].end; };

    auto trim_queue_entry = [&](size_t qi, int a, int b) {
        std::vector<Entry> survivors;
        subtract_range(queue[qi], a, b, survivors);
        if (survivors.empty()) {
            erase_queue_entry(qi);
        } else {
            queue[qi] = std::move(survivors.front());
            for (size_t k = 1; k < survivors.size(); ++k) {
                queue.push_back(std::move(survivors[k]));
            }
        }
    };

    for (size_t qi : order) {
        if (queue[qi].empty()) continue;

        if (alteration == Alteration::delayed) {
            const Entry& q = queue[qi];
            if (!intervals_overlap(q.start, q.end, original.start, original.end)) continue;
            AllenRelation rel = relate(q.extent(), original);
            switch (policy.at(rel)) {
                case PairPolicy::old_data:
                    deferred_cuts.emplace_back(std::max(q.start, original.start),
                                               std::min(q.end, original.end));
                    break;
                case PairPolicy::new_data:
                    trim_queue_entry(qi, original.start, original.end);
                    break;
                case PairPolicy::ignore_chunks:
                    switch (interp) {
                        case IgnoreInterp::triplet_all_drop:
                            result.flow_poisoned = true;
                            return result;
                        case IgnoreInterp::pair_drop:
                            erase_queue_entry(qi);
                            result.newcomer_dropped = true;
                            return result;
                        case IgnoreInterp::pair_oldest_drop:
                            erase_queue_entry(qi);
                            break;
                        case IgnoreInterp::pair_newest_drop:
                            result.newcomer_dropped = true;
                            return result;
                    }
                    break;
            }
            continue;
        }

        // Immediate alteration: every surviving piece of the newcomer is
        // compared with its current extent.
        for (size_t pi = 0; pi < pieces.size(); ++pi) {
            if (queue[qi].empty()) break;
            const Entry& q = queue[qi];
            Entry& p = pieces[pi];
            if (p.empty()) continue;
            if (!intervals_overlap(q.start, q.end, p.start, p.end)) continue;
            AllenRelation rel = relate(q.extent(), p.extent());
            switch (policy.at(rel)) {
                case PairPolicy::old_data: {
                    std::vector<Entry> survivors;
                    subtract_range(p, q.start, q.end, survivors);
                    if (survivors.empty()) {
                        p.start = p.end;
                    } else {
                        p = std::move(survivors.front());
                        for (size_t k = 1; k < survivors.size(); ++k) {
                            pieces.push_back(std::move(survivors[k]));
                        }
                    }
                    break;
                }
                case PairPolicy::new_data:
                    trim_queue_entry(qi, p.start, p.end);
                    break;
                case PairPolicy::ignore_chunks:
                    switch (interp) {
                        case IgnoreInterp::triplet_all_drop:
                            result.flow_poisoned = true;
                            return result;
                        case IgnoreInterp::pair_drop:
                            erase_queue_entry(qi);
                            result.newcomer_dropped = true;
                            return result;
                        case IgnoreInterp::pair_oldest_drop:
                            erase_queue_entry(qi);
                            break;
                        case IgnoreInterp::pair_newest_drop:
                            result.newcomer_dropped = true;
                            return result;
                    }
                    break;
            }
        }
    }

    if (alteration == Alteration::delayed) {
        for (const auto& [a, b] : deferred_cuts) {
            std::vector<Entry> next;
            for (const auto& p : pieces) subtract_range(p, a, b, next);
            pieces = std::move(next);
        }
    }

    pieces.erase(std::remove_if(pieces.begin(), pieces.end(),
                                [](const Entry& p) { return p.empty(); }),
                 pieces.end());
    result.pieces = std::move(pieces);
    return result;
}

void sort_and_compact(std::vector<Entry>& queue) {
    queue.erase(std::remove_if(queue.begin(), queue.end(),
                               [](const Entry& e) { return e.empty(); }),
                queue.end());
    std::sort(queue.begin(), queue.end(), [](const Entry& a, const Entry& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.arrival < b.arrival;
    });
}

// Coalesces sorted neighbors. `meet` requires exact adjacency; `any` also
// accepts overlap, which the resolution step normally leaves none of (the
// earlier entry's cells win if it ever arises).
void merge_queue(std::vector<Entry>& queue, Merging merging) {
    if (merging == Merging::none || queue.empty()) return;
    std::vector<Entry> merged;
    merged.push_back(queue.front());
    for (size_t i = 1; i < queue.size(); ++i) {
        Entry& prev = merged.back();
        const Entry& cur = queue[i];
        bool touch = merging == Merging::meet ? prev.end == cur.start : prev.end >= cur.start;
        if (!touch) {
            merged.push_back(cur);
            continue;
        }
        for (int c = std::max(cur.start, prev.end); c < cur.end; ++c) {
            prev.cells.push_back(cur.cells[static_cast<size_t>(c - cur.start)]);
        }
        prev.end = std::max(prev.end, cur.end);
        prev.arrival = std::min(prev.arrival, cur.arrival);
    }
    queue = std::move(merged);
}

void insert_pieces(std::vector<Entry>& queue, std::vector<Entry>&& pieces, Merging merging) {
    for (auto& p : pieces) queue.push_back(std::move(p));
    sort_and_compact(queue);
    merge_queue(queue, merging);
}

}  // namespace

IpReassembler::IpReassembler(const PolicyTable& policy, const MechanismConfig& mech)
    : policy_(policy), mech_(mech) {
    if (!mech_.ignore_interp) {
        throw std::invalid_argument("IP reassembly requires an ignore interpretation");
    }
}

void IpReassembler::feed(const ChunkSpec& fragment) {
    if (delivered_ || poisoned_) return;
    uint32_t arrival = arrivals_++;

    ResolveResult res =
        resolve_arrival(queue_, make_entry(fragment, arrival, 0), policy_, mech_.alteration,
                        *mech_.ignore_interp);
    if (res.flow_poisoned) {
        poisoned_ = true;
        queue_.clear();
        return;
    }
    bool accepted = !res.newcomer_dropped;
    insert_pieces(queue_, std::move(res.pieces), mech_.merging);

    if (accepted && fragment.mf_unset) {
        total_cells_ = std::max(total_cells_.value_or(0), fragment.end_cell);
    }
    check_completion();
}

void IpReassembler::check_completion() {
    if (!total_cells_ || delivered_) return;
    const int len = *total_cells_;
    std::vector<int> map(static_cast<size_t>(len), ReassemblyOutcome::kHole);
    for (const auto& e : queue_) {
        for (int c = std::max(e.start, 0); c < std::min(e.end, len); ++c) {
            map[static_cast<size_t>(c)] = e.cells[static_cast<size_t>(c - e.start)];
        }
    }
    for (int v : map) {
        if (v == ReassemblyOutcome::kHole) return;
    }
    delivered_ = true;
    delivered_map_ = std::move(map);
}

ReassemblyOutcome IpReassembler::finish() const {
    ReassemblyOutcome out;
    if (delivered_) {
        out.status = OutcomeStatus::delivered;
        out.cell_sources = delivered_map_;
        out.delivered_cells = static_cast<int>(delivered_map_.size());
    } else if (poisoned_) {
        out.status = OutcomeStatus::poisoned;
    } else {
        out.status = OutcomeStatus::no_response;
    }
    return out;
}

TcpReassembler::TcpReassembler(const PolicyTable& policy, const MechanismConfig& mech)
    : policy_(policy), mech_(mech) {}

std::vector<int> TcpReassembler::feed(const ChunkSpec& segment) {
    uint32_t arrival = arrivals_++;
    if (segment.end_cell <= pointer_) return {};  // entirely below the delivered region

    // TCP configs carry no ignore interpretation; an ignore policy entry
    // always drops both chunks of the pair and the stream continues.
    ResolveResult res = resolve_arrival(queue_, make_entry(segment, arrival, pointer_), policy_,
                                        mech_.alteration, IgnoreInterp::pair_drop);
    insert_pieces(queue_, std::move(res.pieces), mech_.merging);

    // Push every contiguous cell at the pointer up to the stream.
    std::vector<int> newly;
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (size_t i = 0; i < queue_.size(); ++i) {
            if (queue_[i].start == pointer_) {
                for (int v : queue_[i].cells) {
                    delivered_.push_back(v);
                    newly.push_back(v);
                }
                pointer_ = queue_[i].end;
                queue_.erase(queue_.begin() + static_cast<long>(i));
                progressed = true;
                break;
            }
        }
    }
    return newly;
}

ReassemblyOutcome TcpReassembler::finish() const {
    ReassemblyOutcome out;
    if (delivered_.empty()) {
        out.status = OutcomeStatus::no_response;
        return out;
    }
    out.status = OutcomeStatus::delivered;
    out.cell_sources = delivered_;
    out.delivered_cells = pointer_;
    return out;
}

ReassemblyOutcome simulate_ip(const TestCaseInstance& inst, const PolicyTable& policy,
                              const MechanismConfig& mech) {
    MechanismConfig effective = mech;
    if (!effective.ignore_interp) effective.ignore_interp = IgnoreInterp::pair_drop;
    IpReassembler engine(policy, effective);
    for (const auto& chunk : inst.chunks) engine.feed(chunk);
    return engine.finish();
}

ReassemblyOutcome simulate(const TestCaseInstance& inst, const PolicyTable& policy,
                           const MechanismConfig& mech) {
    return is_ip(inst.protocol) ? simulate_ip(inst, policy, mech)
                                : simulate_tcp(inst, policy, mech);
}

ReassemblyOutcome simulate_tcp(const TestCaseInstance& inst, const PolicyTable& policy,
                               const MechanismConfig& mech) {
    TcpReassembler engine(policy, mech);
    for (const auto& chunk : inst.chunks) engine.feed(chunk);
    return engine.finish();
}

std::optional<std::vector<uint8_t>> render_outcome(const TestCaseInstance& inst,
                                                   const ReassemblyOutcome& outcome) {
    if (outcome.status != OutcomeStatus::delivered) return std::nullopt;
    std::vector<uint8_t> bytes;
    bytes.reserve(static_cast<size_t>(outcome.delivered_cells) * kCellBytes);
    PatternFamily family = pattern_family(inst.protocol);
    for (int cell = 0; cell < outcome.delivered_cells; ++cell) {
        int src = outcome.cell_sources[static_cast<size_t>(cell)];
        if (src == ReassemblyOutcome::kHole) {
            throw std::logic_error("delivered outcome contains a hole");
        }
        CellBytes pat = pattern_for(src, cell, family);
        bytes.insert(bytes.end(), pat.begin(), pat.end());
    }
    return bytes;
}

}  // namespace reasm
