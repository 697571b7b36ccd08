#include "reasm/analysis.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace reasm {

SimilarityResult similarity(const PolicyReport& a, const PolicyReport& b) {
    if (a.protocol != b.protocol) {
        throw std::invalid_argument("similarity requires reports for the same protocol");
    }
    SimilarityResult out;
    for (const auto& [key, rec] : a.records) {
        auto it = b.records.find(key);
        if (it == b.records.end()) continue;
        out.common_keys++;
        if (rec.policy == it->second.policy) {
            out.identical++;
        } else {
            out.differing.push_back(key);
        }
    }
    if (out.common_keys == 0) {
        throw std::invalid_argument("similarity: reports share no test case keys");
    }
    out.percent = 100.0 * static_cast<double>(out.identical) /
                  static_cast<double>(out.common_keys);
    return out;
}

std::vector<std::vector<std::string>> scenario_groups(const PolicyReport& report) {
    // Policy vector per scenario, keyed by the base relation sequence.
    std::map<std::string, std::map<std::string, const TimePolicyRecord*>> vectors;
    for (const auto& [key, rec] : report.records) {
        vectors[rec.scenario][rec.relations] = &rec.policy;
    }
    std::vector<std::string> names;
    for (const auto& [name, vec] : vectors) names.push_back(name);

    auto same = [&](const std::string& x, const std::string& y) {
        const auto& vx = vectors.at(x);
        const auto& vy = vectors.at(y);
        size_t shared = 0;
        for (const auto& [rel, px] : vx) {
            auto it = vy.find(rel);
            if (it == vy.end()) continue;
            ++shared;
            if (!(*px == *it->second)) return false;
        }
        return shared > 0;
    };

    std::vector<std::vector<std::string>> groups;
    std::set<std::string> placed;
    for (const auto& name : names) {
        if (placed.count(name)) continue;
        std::vector<std::string> group{name};
        placed.insert(name);
        for (const auto& other : names) {
            if (placed.count(other)) continue;
            if (same(name, other)) {
                group.push_back(other);
                placed.insert(other);
            }
        }
        std::sort(group.begin(), group.end());
        groups.push_back(std::move(group));
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return groups;
}

std::string record_summary(const TimePolicyRecord& rec) {
    std::string out;
    if (rec.is_pair) {
        out = std::string(tp_value_name(rec.pair_label));
    } else {
        out = "tp_t=" + std::string(tp_value_name(rec.triple_label)) + ",rp=(" +
              std::string(tp_value_name(rec.residual[0])) + "," +
              std::string(tp_value_name(rec.residual[1])) + "," +
              std::string(tp_value_name(rec.residual[2])) + ")";
    }
    if (!rec.responded) out += "[no-response]";
    if (rec.anomaly) out += "[anomaly]";
    return out;
}

namespace {

TpValue normalize_ignore(TpValue v) {
    return v == TpValue::partial_ignore ? TpValue::ignores : v;
}

// old/new/ignores for the pair label; anything else has no matching pair
// policy and is reported verbatim.
std::string pair_label_text(const TimePolicyRecord& rec) {
    return std::string(tp_value_name(rec.pair_label));
}

}  // namespace

std::vector<ConsistencyFinding> baseline_consistency(const PolicyReport& pairs,
                                                     const PolicyReport& triplets) {
    if (pairs.protocol != triplets.protocol) {
        throw std::invalid_argument("baseline consistency requires one protocol");
    }
    std::vector<ConsistencyFinding> findings;
    const std::array<std::string, 3> component_names = {"rp01", "rp02", "rp12"};
    for (const auto& [key, rec] : triplets.records) {
        if (rec.policy.is_pair) continue;
        // A triplet the stack never answered carries no residual-pair
        // evidence; only answered reassemblies are held against the pair
        // policies.
        if (!rec.policy.responded) continue;
        RelationSequence seq = RelationSequence::from_label(3, rec.relations);
        for (size_t k = 0; k < 3; ++k) {
            TpValue observed = rec.policy.residual[k];
            if (observed == TpValue::none) continue;
            // partialIgnore marks a region beyond the delivered data: it is
            // unobservable, so it cannot contradict any pair policy.
            if (observed == TpValue::partial_ignore) continue;
            std::string pair_id =
                make_instance_id(triplets.protocol, ScenarioSpec::from_name(rec.scenario),
                                 RelationSequence{2, {seq.relations[k]}});
            auto pit = pairs.records.find({rec.scenario, pair_id});
            if (pit == pairs.records.end()) {
                throw std::runtime_error("missing pair record " + pair_id +
                                         " needed by baseline consistency");
            }
            TpValue expected = pit->second.policy.pair_label;
            if (normalize_ignore(observed) == normalize_ignore(expected)) continue;
            ConsistencyFinding f;
            f.kind = FindingKind::baseline_residual_mismatch;
            f.scenario = rec.scenario;
            f.test_case_id = rec.test_case_id;
            f.component = component_names[k];
            f.expected = pair_label_text(pit->second.policy);
            f.observed = std::string(tp_value_name(observed));
            findings.push_back(std::move(f));
        }
    }
    return findings;
}

namespace {

PredictionSummary run_prediction(
    const Corpus& corpus, const PolicyReport& observed,
    const std::function<const PolicyTable&(const std::string&)>& table_for_scenario,
    const std::string& preset_name) {
    preset(preset_name);  // validate early

    std::unordered_map<std::string, const TestCaseInstance*> by_id;
    for (const auto& inst : corpus.instances) by_id.emplace(inst.id, &inst);

    PredictionSummary summary;
    summary.preset = preset_name;
    for (const auto& [key, rec] : observed.records) {
        if (rec.policy.is_pair) continue;
        auto it = by_id.find(rec.test_case_id);
        if (it == by_id.end()) {
            throw std::runtime_error("observed record has no corpus instance: " +
                                     rec.test_case_id);
        }
        TimePolicyRecord predicted =
            predict_policy(*it->second, table_for_scenario(rec.scenario), preset_name);
        summary.compared++;
        summary.mismatches_per_scenario.try_emplace(rec.scenario, 0);
        if (predicted == rec.policy) continue;
        summary.mismatches++;
        summary.mismatches_per_scenario[rec.scenario]++;
        ConsistencyFinding f;
        f.kind = FindingKind::prediction_mismatch;
        f.scenario = rec.scenario;
        f.test_case_id = rec.test_case_id;
        f.component = "record";
        f.expected = record_summary(predicted);
        f.observed = record_summary(rec.policy);
        summary.findings.push_back(std::move(f));
    }
    return summary;
}

}  // namespace

PredictionSummary prediction_consistency(const Corpus& corpus, const PolicyReport& observed,
                                         const PolicyTable& pair_policies,
                                         const std::string& preset_name) {
    return run_prediction(
        corpus, observed, [&](const std::string&) -> const PolicyTable& { return pair_policies; },
        preset_name);
}

PredictionSummary prediction_consistency(const Corpus& corpus, const PolicyReport& observed,
                                         const PolicyReport& pairs_report,
                                         const std::string& preset_name) {
    // One table per scenario, from that scenario's nine overlapping pair
    // records.
    std::map<std::string, PolicyTable> tables;
    std::set<std::string> scenarios;
    for (const auto& [key, rec] : observed.records) scenarios.insert(rec.scenario);
    for (const auto& scenario : scenarios) {
        PolicyTable table;
        for (AllenRelation r : all_relations()) {
            if (!is_overlapping(r)) continue;
            std::string pair_id =
                make_instance_id(pairs_report.protocol, ScenarioSpec::from_name(scenario),
                                 RelationSequence{2, {r}});
            auto it = pairs_report.records.find({scenario, pair_id});
            if (it == pairs_report.records.end()) {
                throw std::runtime_error("pairs report lacks record " + pair_id);
            }
            TpValue label = it->second.policy.pair_label;
            PairPolicy policy;
            switch (label) {
                case TpValue::old_data: policy = PairPolicy::old_data; break;
                case TpValue::new_data: policy = PairPolicy::new_data; break;
                case TpValue::ignores: policy = PairPolicy::ignore_chunks; break;
                default:
                    throw std::runtime_error("pair record " + pair_id +
                                             " has no usable pair policy (" +
                                             std::string(tp_value_name(label)) + ")");
            }
            table.set(r, policy);
        }
        tables.emplace(scenario, table);
    }
    return run_prediction(
        corpus, observed,
        [&](const std::string& scenario) -> const PolicyTable& { return tables.at(scenario); },
        preset_name);
}

}  // namespace reasm
