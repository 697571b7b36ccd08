// Configurable IP and TCP reassembly engines: per-relation pair time
// policies plus the side-effect mechanism knobs (newcomer extent alteration,
// chunk merging, ignore interpretation), with the named algorithm presets.
#ifndef REASM_SIMULATOR_HPP
#define REASM_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reasm/allen.hpp"
#include "reasm/corpus.hpp"

namespace reasm {

enum class PairPolicy : uint8_t { old_data, new_data, ignore_chunks };

std::string_view pair_policy_name(PairPolicy p);
PairPolicy pair_policy_from_name(std::string_view name);

// Total over the nine overlapping relations; the non-overlapping ones have
// no entry.
class PolicyTable {
  public:
    PolicyTable();
    static PolicyTable uniform(PairPolicy p);

    PairPolicy at(AllenRelation r) const;
    void set(AllenRelation r, PairPolicy p);

    std::map<std::string, std::string> to_map() const;
    static PolicyTable from_map(const std::map<std::string, std::string>& m);

    bool operator==(const PolicyTable&) const = default;

  private:
    std::array<PairPolicy, kRelationCount> entries_;
};

enum class Alteration : uint8_t { immediate, delayed };
enum class Merging : uint8_t { none, meet, any };
enum class IgnoreInterp : uint8_t {
    triplet_all_drop,   // flow poisoned, everything already queued and still to come is dropped
    pair_drop,          // both chunks of the offending pair removed, flow continues
    pair_oldest_drop,   // only the queued chunk removed
    pair_newest_drop,   // only the arriving chunk removed
};

struct MechanismConfig {
    Alteration alteration = Alteration::immediate;
    Merging merging = Merging::none;
    std::optional<IgnoreInterp> ignore_interp;  // IP engines only
};

// Named rows of the implemented algorithm tables: 12 IP presets carrying an
// ignore interpretation and 6 TCP presets without one.
const std::vector<std::string>& preset_names();
bool preset_is_ip(const std::string& name);
MechanismConfig preset(const std::string& name);

namespace detail {

// A queue run: contiguous cells with one source chunk id each. Entries can
// shrink, split, and merge while staying attributable per cell.
struct SimEntry {
    int start;
    int end;
    std::vector<int> cells;
    uint32_t arrival;

    bool empty() const { return start >= end; }
    CellInterval extent() const { return {start, end}; }
};

}  // namespace detail

enum class OutcomeStatus : uint8_t { delivered, no_response, poisoned };

struct ReassemblyOutcome {
    OutcomeStatus status = OutcomeStatus::no_response;
    // Source chunk id per global cell, hole_marker where nothing survived;
    // covers [0, delivered_cells) for delivered outcomes.
    std::vector<int> cell_sources;
    int delivered_cells = 0;

    static constexpr int kHole = -1;
};

// Fragments processed in arrival order against a queue compared in
// ascending start order; completion happens as soon as every cell below the
// length declared by an accepted MF-unset fragment is covered, and later
// fragments are discarded.
class IpReassembler {
  public:
    IpReassembler(const PolicyTable& policy, const MechanismConfig& mech);
    void feed(const ChunkSpec& fragment);
    bool complete() const { return delivered_; }
    ReassemblyOutcome finish() const;

  private:
    void check_completion();

    PolicyTable policy_;
    MechanismConfig mech_;
    std::vector<detail::SimEntry> queue_;
    std::optional<int> total_cells_;  // max end among accepted MF-unset fragments
    bool poisoned_ = false;
    bool delivered_ = false;
    std::vector<int> delivered_map_;
    uint32_t arrivals_ = 0;
};

// Stream reassembly with a next-expected pointer: delivered bytes are
// immutable, the out-of-order queue above the pointer follows the same
// pairwise resolution as the IP engine. An ignore policy entry drops both
// chunks of the pair.
class TcpReassembler {
  public:
    TcpReassembler(const PolicyTable& policy, const MechanismConfig& mech);
    // Returns the cells newly delivered by this segment.
    std::vector<int> feed(const ChunkSpec& segment);
    int next_expected() const { return pointer_; }
    ReassemblyOutcome finish() const;

  private:
    PolicyTable policy_;
    MechanismConfig mech_;
    std::vector<detail::SimEntry> queue_;
    int pointer_ = 0;
    std::vector<int> delivered_;  // source chunk per delivered cell
    uint32_t arrivals_ = 0;
};

ReassemblyOutcome simulate_ip(const TestCaseInstance& inst, const PolicyTable& policy,
                              const MechanismConfig& mech);
ReassemblyOutcome simulate_tcp(const TestCaseInstance& inst, const PolicyTable& policy,
                               const MechanismConfig& mech);
ReassemblyOutcome simulate(const TestCaseInstance& inst, const PolicyTable& policy,
                           const MechanismConfig& mech);

// Payload bytes of a delivered outcome (pattern cells of the surviving
// sources); nullopt when nothing was delivered.
std::optional<std::vector<uint8_t>> render_outcome(const TestCaseInstance& inst,
                                                   const ReassemblyOutcome& outcome);

}  // namespace reasm

#endif
