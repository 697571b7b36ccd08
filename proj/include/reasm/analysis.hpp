// Cross-implementation and cross-scenario analyses over policy reports:
// similarity, scenario grouping, and the n=2 -> n=3 consistency checks.
#ifndef REASM_ANALYSIS_HPP
#define REASM_ANALYSIS_HPP

#include <map>
#include <string>
#include <vector>

#include "reasm/corpus.hpp"
#include "reasm/policy.hpp"

namespace reasm {

struct SimilarityResult {
    double percent = 0.0;
    size_t common_keys = 0;
    size_t identical = 0;
    std::vector<std::pair<std::string, std::string>> differing;  // (scenario, test_case_id)
};

// Percentage of common (scenario, test case) keys with identical time
// policy records. Reports must share a protocol and at least one key.
SimilarityResult similarity(const PolicyReport& a, const PolicyReport& b);

// Partition of the report's scenarios: grouped when their policy vectors
// agree on every shared base relation sequence. Groups and members are
// ordered by smallest scenario name.
std::vector<std::vector<std::string>> scenario_groups(const PolicyReport& report);

enum class FindingKind : uint8_t { baseline_residual_mismatch, prediction_mismatch };

struct ConsistencyFinding {
    FindingKind kind;
    std::string scenario;
    std::string test_case_id;
    std::string component;  // "rp01".."rp12" for baseline, "record" for prediction
    std::string expected;
    std::string observed;
};

// Compares each non-none residual-pair policy of every answered triplet
// record with the pair policy of the matching Allen relation from the n=2
// records. Unanswered triplets and regions beyond the delivered data
// (partialIgnore) carry no evidence and are skipped; an ignores residual
// matches an ignores pair policy. The triple overlap is excluded.
std::vector<ConsistencyFinding> baseline_consistency(const PolicyReport& pairs,
                                                     const PolicyReport& triplets);

struct PredictionSummary {
    std::string preset;
    std::map<std::string, int> mismatches_per_scenario;
    int compared = 0;
    int mismatches = 0;
    std::vector<ConsistencyFinding> findings;

    bool explained() const { return mismatches == 0; }
};

// Predicts every triplet record of the observed report by simulating the
// instance under the preset with the given pair policies, then diffs the
// full records.
PredictionSummary prediction_consistency(const Corpus& corpus, const PolicyReport& observed,
                                         const PolicyTable& pair_policies,
                                         const std::string& preset_name);

// Same, but derives one pair-policy table per scenario from the n=2 records
// of the pairs report.
PredictionSummary prediction_consistency(const Corpus& corpus, const PolicyReport& observed,
                                         const PolicyReport& pairs_report,
                                         const std::string& preset_name);

std::string record_summary(const TimePolicyRecord& rec);

}  // namespace reasm

#endif
