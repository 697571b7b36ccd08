// Decodes observed reassembled payloads into cell maps, computes overlap
// geometry, labels pair/triplet time policies, and detects reassembly error
// classes.
#ifndef REASM_POLICY_HPP
#define REASM_POLICY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reasm/corpus.hpp"
#include "reasm/simulator.hpp"

namespace reasm {

struct CellContent {
    enum class Kind : uint8_t { pattern, unknown } kind = Kind::unknown;
    int chunk_id = -1;
    int cell_index = -1;
};

struct CellMap {
    std::vector<CellContent> cells;
    size_t trailing_bytes = 0;  // payload remainder that is not a whole cell

    int length_cells() const { return static_cast<int>(cells.size()); }
};

CellMap decode_cells(std::span<const uint8_t> payload, PatternFamily family);

// Overlap geometry of the test chunks. Regions are cell sets; a residual
// region can split around the triple overlap.
struct OverlapRegions {
    std::vector<int> triple;                    // empty for pairs
    std::array<std::vector<int>, 3> residual;   // p01, p02, p12; only [0] used for pairs
    std::vector<int> pair;                      // pairwise intersection, pairs only
};

OverlapRegions regions(const TestCaseInstance& inst);

enum class TpValue : uint8_t {
    none,            // region is empty
    old_data,
    middle_data,     // triple overlap only
    new_data,
    ignores,
    partial_ignore,  // residual pair only
};

std::string_view tp_value_name(TpValue v);
TpValue tp_value_from_name(std::string_view name);

struct TimePolicyRecord {
    bool is_pair = true;
    bool responded = false;
    TpValue pair_label = TpValue::none;
    TpValue triple_label = TpValue::none;                          // tp_t
    std::array<TpValue, 3> residual = {TpValue::none, TpValue::none, TpValue::none};
    bool anomaly = false;
    std::string anomaly_detail;

    bool operator==(const TimePolicyRecord&) const = default;
};

struct Observation {
    std::string test_case_id;
    std::optional<std::vector<uint8_t>> payload;
    bool reply_before_complete = false;
    bool session_terminated = true;  // meaningful for TCP only
    bool decode_warning = false;     // payload was not a whole number of cells
};

Observation observation_from_outcome(const TestCaseInstance& inst,
                                     const ReassemblyOutcome& outcome);

TimePolicyRecord extract_policy(const TestCaseInstance& inst, const Observation& obs);

enum class ErrorClass : uint8_t {
    hole_in_payload,
    data_after_hole,
    truncation,
    early_response,
    duplicate_pattern,
    misplaced_pattern,
    session_not_terminated,
};

std::string_view error_class_name(ErrorClass c);
ErrorClass error_class_from_name(std::string_view name);

struct ErrorRecord {
    ErrorClass cls;
    std::string detail;
    std::vector<std::pair<int, int>> cell_ranges;
    std::vector<int> chunk_ids;

    bool operator==(const ErrorRecord&) const = default;
};

std::vector<ErrorRecord> detect_errors(const TestCaseInstance& inst, const Observation& obs);

// Simulates the instance under the preset, then extracts the resulting time
// policy: the predicted n = 3 record for a given pair-policy table.
TimePolicyRecord predict_policy(const TestCaseInstance& inst, const PolicyTable& pair_policies,
                                const std::string& preset_name);

struct ReportRecord {
    std::string scenario;
    std::string test_case_id;
    std::string relations;
    TimePolicyRecord policy;
    std::vector<ErrorRecord> errors;
};

struct PolicyReport {
    std::string implementation;
    Protocol protocol = Protocol::ipv4;
    std::optional<std::string> preset;        // present for simulated reports
    std::optional<PolicyTable> policy_table;  // present for simulated reports
    // keyed by (scenario, test_case_id)
    std::map<std::pair<std::string, std::string>, ReportRecord> records;

    bool has_errors() const;
};

void write_report(const PolicyReport& report, const std::string& path);
PolicyReport read_report(const std::string& path);

}  // namespace reasm

#endif
