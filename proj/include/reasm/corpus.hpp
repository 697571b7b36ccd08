// Expands coherent relation sequences into concrete, scenario-contextualized,
// pattern-populated test-case instances with corpus-wide deduplication and a
// persistent manifest.
#ifndef REASM_CORPUS_HPP
#define REASM_CORPUS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reasm/allen.hpp"
#include "reasm/pattern.hpp"

namespace reasm {

enum class Protocol : uint8_t { ipv4, ipv6, tcp };

std::string_view protocol_name(Protocol p);
Protocol protocol_from_name(std::string_view name);

inline bool is_ip(Protocol p) { return p != Protocol::tcp; }

inline PatternFamily pattern_family(Protocol p) {
    return p == Protocol::ipv6 ? PatternFamily::v6 : PatternFamily::v4;
}

// Protocol-agnostic context: optional Start/End extra chunks plus the send
// order encoded in the name ("p" precedes, "f" follows; when both extras sit
// on the same side of the test chunks the name order gives the send order).
enum class AgnosticScenario : uint8_t {
    s_c = 0,   // continuous, no extras
    s_sp,      // Start precedes
    s_sf,      // Start follows
    s_ep,      // End precedes
    s_ef,      // End follows
    s_sf_ef,   // tests, Start, End
    s_ef_sf,   // tests, End, Start
    s_sp_ef,   // Start, tests, End
    s_ep_sf,   // End, tests, Start
    s_sp_ep,   // Start, End, tests
    s_ep_sp,   // End, Start, tests
};

inline constexpr int kAgnosticScenarioCount = 11;

// Which rightmost chunks get the MF bit unset when several fragments finish
// (f) or start (s) rightmost: one of oldest/newest/middle or a union of
// them, or all.
enum class MfStrategy : uint8_t {
    of = 0, nf, mf, onf, omf, mnf, af,   // rightmost finishing
    os, ns, ms, ons, oms, mns, as,       // rightmost starting
};

inline constexpr int kMfStrategyCount = 14;

bool mf_targets_finishing(MfStrategy s);

struct ScenarioSpec {
    AgnosticScenario agnostic = AgnosticScenario::s_c;
    std::optional<MfStrategy> mf;

    bool has_start() const;
    bool has_end() const;
    // "s_c", "s_sf_ef", "s_c_of", ...
    std::string name() const;
    static ScenarioSpec from_name(std::string_view name);

    auto operator<=>(const ScenarioSpec&) const = default;
};

std::string_view agnostic_name(AgnosticScenario s);
std::string_view mf_strategy_name(MfStrategy s);

enum class ChunkRole : uint8_t { test, start, end };

struct ChunkSpec {
    int chunk_id = 0;     // test chunks 0..n-1 by age; Start = n, End = n + 1
    int time_index = 0;   // send-order position among all chunks
    int start_cell = 0;   // global cell extent after scenario shifting
    int end_cell = 0;
    ChunkRole role = ChunkRole::test;
    bool carries_header = false;  // IP: true exactly when start_cell == 0
    bool mf_unset = false;        // IP: fragment sent with MF bit clear

    CellInterval extent() const { return {start_cell, end_cell}; }
    bool operator==(const ChunkSpec&) const = default;
};

struct TestCaseInstance {
    std::string id;  // "<protocol>:<scenario>:<relations>"
    Protocol protocol = Protocol::ipv4;
    RelationSequence relations;
    ScenarioSpec scenario;
    std::vector<ChunkSpec> chunks;  // in send (time_index) order
    std::string dedup_key;
    std::string canonical_id;  // == id unless collapsed onto an earlier instance
    uint32_t ordinal = 0;      // stable position in the corpus; wire ids derive from it

    bool is_canonical() const { return canonical_id == id; }
    const ChunkSpec* chunk_by_id(int chunk_id) const;
    std::vector<const ChunkSpec*> test_chunks() const;  // ordered by chunk_id (age)
};

std::string make_instance_id(Protocol p, const ScenarioSpec& sc, const RelationSequence& seq);

// Payload of one chunk: its pattern cells at global cell indices.
std::vector<uint8_t> chunk_payload(const TestCaseInstance& inst, const ChunkSpec& chunk);

// Places Start/End context around the quantified base extents and assigns
// send order. Start occupies cell 0 (test cells shift right by one); End
// occupies the cell after the rightmost test cell; an End chunk always has
// the MF bit unset on IP.
std::vector<ChunkSpec> apply_scenario(const IntervalAssignment& base, const ScenarioSpec& scenario,
                                      Protocol protocol);

// Applies one of the 14 MF strategies to an IP instance without an End
// chunk. Candidates are the test chunks with maximal end (f strategies) or
// maximal start (s strategies) cell, ordered by age; "middle" of k
// candidates is index (k - 1) / 2.
void mf_assign(std::vector<ChunkSpec>& chunks, MfStrategy strategy);

// Ordered wire fingerprint: equal keys mean identical tested traffic.
std::string dedup_key(const TestCaseInstance& inst);

// Scenario sets: 11 for TCP; for IP the 8 End-bearing scenarios plus the 3
// End-free ones expanded by the 14 MF strategies (50 in total).
std::vector<ScenarioSpec> scenarios_for(Protocol p);
std::vector<ScenarioSpec> ip_end_bearing_scenarios();
std::vector<ScenarioSpec> ip_mf_expanded_scenarios();

struct ScenarioCount {
    std::string scenario;
    int instances = 0;  // always 422 before dedup
    int canonical = 0;  // instances not collapsed onto an earlier scenario's key
};

struct Corpus {
    Protocol protocol = Protocol::ipv4;
    std::vector<TestCaseInstance> instances;  // all, including collapsed ones
    std::vector<ScenarioCount> per_scenario;

    size_t canonical_count() const;
    std::vector<const TestCaseInstance*> canonical_instances() const;
    const TestCaseInstance* find(const std::string& id) const;
};

Corpus build_corpus(Protocol protocol, const std::vector<ScenarioSpec>& scenarios);

// Line-delimited JSON manifest, one record per instance.
void write_manifest(const Corpus& corpus, const std::string& path);
Corpus read_manifest(const std::string& path);

}  // namespace reasm

#endif
