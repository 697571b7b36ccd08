#include "reasm/policy.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace reasm {

CellMap decode_cells(std::span<const uint8_t> payload, PatternFamily family) {
    CellMap map;
    size_t full = payload.size() / kCellBytes;
    for (size_t i = 0; i < full; ++i) {
        auto cell = payload.subspan(i * kCellBytes, kCellBytes);
        CellContent content;
        if (auto decoded = decode_pattern(cell, family)) {
            content.kind = CellContent::Kind::pattern;
            content.chunk_id = decoded->chunk_id;
            content.cell_index = decoded->cell_index;
        }
        map.cells.push_back(content);
    }
    map.trailing_bytes = payload.size() - full * kCellBytes;
    return map;
}

namespace {

std::vector<int> intersect_cells(const CellInterval& a, const CellInterval& b) {
    std::vector<int> out;
    for (int c = std::max(a.start, b.start); c < std::min(a.end, b.end); ++c) out.push_back(c);
    return out;
}

std::vector<int> triple_cells(const CellInterval& a, const CellInterval& b,
                              const CellInterval& c) {
    std::vector<int> out;
    int lo = std::max({a.start, b.start, c.start});
    int hi = std::min({a.end, b.end, c.end});
    for (int x = lo; x < hi; ++x) out.push_back(x);
    return out;
}

}  // namespace

OverlapRegions regions(const TestCaseInstance& inst) {
    OverlapRegions out;
    auto tests = inst.test_chunks();
    if (tests.size() == 2) {
        out.pair = intersect_cells(tests[0]->extent(), tests[1]->extent());
        return out;
    }
    if (tests.size() != 3) {
        throw std::invalid_argument("regions: instance must have 2 or 3 test chunks");
    }
    out.triple = triple_cells(tests[0]->extent(), tests[1]->extent(), tests[2]->extent());
    const std::array<std::pair<int, int>, 3> pairs = {{{0, 1}, {0, 2}, {1, 2}}};
    for (size_t k = 0; k < pairs.size(); ++k) {
        auto cells = intersect_cells(tests[static_cast<size_t>(pairs[k].first)]->extent(),
                                     tests[static_cast<size_t>(pairs[k].second)]->extent());
        for (int c : cells) {
            if (!std::binary_search(out.triple.begin(), out.triple.end(), c)) {
                out.residual[k].push_back(c);
            }
        }
    }
    return out;
}

namespace {

constexpr std::array<std::string_view, 6> kTpNames = {"none",    "old",           "middle",
                                                      "new",     "ignores",       "partialIgnore"};

}  // namespace

std::string_view tp_value_name(TpValue v) { return kTpNames[static_cast<size_t>(v)]; }

TpValue tp_value_from_name(std::string_view name) {
    for (size_t i = 0; i < kTpNames.size(); ++i) {
        if (kTpNames[i] == name) return static_cast<TpValue>(i);
    }
    throw std::invalid_argument("unknown time policy value: " + std::string(name));
}

Observation observation_from_outcome(const TestCaseInstance& inst,
                                     const ReassemblyOutcome& outcome) {
    Observation obs;
    obs.test_case_id = inst.id;
    obs.payload = render_outcome(inst, outcome);
    return obs;
}

namespace {

// Labels one region from the decoded cells: the whole region must be filled
// by a single expected chunk (by time rank) or be entirely absent; anything
// mixed, unknown, or foreign is an anomaly.
TpValue label_region(const std::vector<int>& region, const CellMap& map,
                     const std::map<int, TpValue>& rank_of_chunk, TpValue absent_value,
                     const std::string& region_name, std::string& anomaly_detail) {
    if (region.empty()) return TpValue::none;
    bool all_absent = true;
    int seen_chunk = -1;
    bool uniform = true;
    bool has_unknown = false;
    for (int pos : region) {
        if (pos >= map.length_cells()) continue;
        all_absent = false;
        const CellContent& cell = map.cells[static_cast<size_t>(pos)];
        if (cell.kind == CellContent::Kind::unknown) {
            has_unknown = true;
        } else if (seen_chunk == -1) {
            seen_chunk = cell.chunk_id;
        } else if (seen_chunk != cell.chunk_id) {
            uniform = false;
        }
    }
    if (all_absent) return absent_value;
    if (!has_unknown && uniform && seen_chunk != -1) {
        // A partially absent region is mixed, never a clean label.
        bool every_present = true;
        for (int pos : region) {
            if (pos >= map.length_cells()) every_present = false;
        }
        auto it = rank_of_chunk.find(seen_chunk);
        if (every_present && it != rank_of_chunk.end()) return it->second;
    }
    if (!anomaly_detail.empty()) anomaly_detail += "; ";
    anomaly_detail += region_name + ":";
    for (int pos : region) {
        anomaly_detail += ' ';
        if (pos >= map.length_cells()) {
            anomaly_detail += "cell" + std::to_string(pos) + "=absent";
            continue;
        }
        const CellContent& cell = map.cells[static_cast<size_t>(pos)];
        if (cell.kind == CellContent::Kind::unknown) {
            anomaly_detail += "cell" + std::to_string(pos) + "=unknown";
        } else {
            anomaly_detail += "cell" + std::to_string(pos) + "=chunk" +
                              std::to_string(cell.chunk_id) + "/" +
                              std::to_string(cell.cell_index);
        }
    }
    return TpValue::none;  // caller marks the record anomalous
}

}  // namespace

TimePolicyRecord extract_policy(const TestCaseInstance& inst, const Observation& obs) {
    if (!obs.test_case_id.empty() && obs.test_case_id != inst.id) {
        throw std::invalid_argument("observation does not belong to instance " + inst.id);
    }
    auto tests = inst.test_chunks();
    OverlapRegions reg = regions(inst);
    TimePolicyRecord rec;
    rec.is_pair = tests.size() == 2;

    if (!obs.payload) {
        rec.responded = false;
        if (rec.is_pair) {
            rec.pair_label = TpValue::ignores;
        } else {
            rec.triple_label = reg.triple.empty() ? TpValue::none : TpValue::ignores;
            for (size_t k = 0; k < 3; ++k) {
                rec.residual[k] = reg.residual[k].empty() ? TpValue::none : TpValue::ignores;
            }
        }
        return rec;
    }

    rec.responded = true;
    CellMap map = decode_cells(*obs.payload, pattern_family(inst.protocol));
    std::string detail;

    if (rec.is_pair) {
        std::map<int, TpValue> ranks{{tests[0]->chunk_id, TpValue::old_data},
                                     {tests[1]->chunk_id, TpValue::new_data}};
        std::string before = detail;
        rec.pair_label = label_region(reg.pair, map, ranks, TpValue::ignores, "pair", detail);
        if (detail != before) rec.anomaly = true;
    } else {
        {
            std::map<int, TpValue> ranks{{tests[0]->chunk_id, TpValue::old_data},
                                         {tests[1]->chunk_id, TpValue::middle_data},
                                         {tests[2]->chunk_id, TpValue::new_data}};
            std::string before = detail;
            rec.triple_label =
                label_region(reg.triple, map, ranks, TpValue::ignores, "tp_t", detail);
            if (detail != before) rec.anomaly = true;
        }
        const std::array<std::pair<int, int>, 3> pairs = {{{0, 1}, {0, 2}, {1, 2}}};
        const std::array<std::string, 3> names = {"rp01", "rp02", "rp12"};
        for (size_t k = 0; k < 3; ++k) {
            std::map<int, TpValue> ranks{
                {tests[static_cast<size_t>(pairs[k].first)]->chunk_id, TpValue::old_data},
                {tests[static_cast<size_t>(pairs[k].second)]->chunk_id, TpValue::new_data}};
            std::string before = detail;
            rec.residual[k] = label_region(reg.residual[k], map, ranks, TpValue::partial_ignore,
                                           names[k], detail);
            if (detail != before) rec.anomaly = true;
        }
    }
    rec.anomaly_detail = std::move(detail);
    return rec;
}

namespace {

constexpr std::array<std::string_view, 7> kErrorNames = {
    "hole_in_payload", "data_after_hole",   "truncation",           "early_response",
    "duplicate_pattern", "misplaced_pattern", "session_not_terminated"};

}  // namespace

std::string_view error_class_name(ErrorClass c) { return kErrorNames[static_cast<size_t>(c)]; }

ErrorClass error_class_from_name(std::string_view name) {
    for (size_t i = 0; i < kErrorNames.size(); ++i) {
        if (kErrorNames[i] == name) return static_cast<ErrorClass>(i);
    }
    throw std::invalid_argument("unknown error class: " + std::string(name));
}

namespace {

// Expected deliverable length in cells. IP datagram length comes from the
// rightmost MF-unset fragment; a TCP stream can only be pushed up to the
// first cell no segment covers.
int expected_length_cells(const TestCaseInstance& inst) {
    if (is_ip(inst.protocol)) {
        int len = 0;
        for (const auto& c : inst.chunks) {
            if (c.mf_unset) len = std::max(len, c.end_cell);
        }
        return len;
    }
    int max_end = 0;
    for (const auto& c : inst.chunks) max_end = std::max(max_end, c.end_cell);
    std::vector<bool> covered(static_cast<size_t>(max_end), false);
    for (const auto& c : inst.chunks) {
        for (int x = c.start_cell; x < c.end_cell; ++x) covered[static_cast<size_t>(x)] = true;
    }
    int len = 0;
    while (len < max_end && covered[static_cast<size_t>(len)]) ++len;
    return len;
}

void push_ranges(ErrorRecord& rec, const std::vector<int>& cells) {
    for (size_t i = 0; i < cells.size();) {
        size_t j = i + 1;
        while (j < cells.size() && cells[j] == cells[j - 1] + 1) ++j;
        rec.cell_ranges.emplace_back(cells[i], cells[j - 1] + 1);
        i = j;
    }
}

}  // namespace

std::vector<ErrorRecord> detect_errors(const TestCaseInstance& inst, const Observation& obs) {
    std::vector<ErrorRecord> out;
    if (obs.reply_before_complete) {
        out.push_back({ErrorClass::early_response, "reply observed before the last request frame",
                       {}, {}});
    }
    if (inst.protocol == Protocol::tcp && !obs.session_terminated) {
        out.push_back({ErrorClass::session_not_terminated,
                       "no FIN/RST completion observed for the session", {}, {}});
    }
    if (!obs.payload) return out;

    CellMap map = decode_cells(*obs.payload, pattern_family(inst.protocol));
    const int len = map.length_cells();
    const bool tcp = inst.protocol == Protocol::tcp;

    std::vector<int> hole_cells;
    std::vector<int> dah_cells;
    std::vector<int> misplaced_cells;
    std::map<std::pair<int, int>, std::vector<int>> occurrences;
    for (int p = 0; p < len; ++p) {
        const CellContent& cell = map.cells[static_cast<size_t>(p)];
        if (cell.kind == CellContent::Kind::unknown) {
            hole_cells.push_back(p);
            continue;
        }
        occurrences[{cell.chunk_id, cell.cell_index}].push_back(p);
        if (cell.cell_index == p) continue;
        if (tcp && cell.cell_index > p) {
            dah_cells.push_back(p);
        } else {
            misplaced_cells.push_back(p);
        }
    }

    if (!hole_cells.empty()) {
        ErrorRecord rec{ErrorClass::hole_in_payload,
                        "undecodable or filler cells inside the delivered payload", {}, {}};
        push_ranges(rec, hole_cells);
        out.push_back(std::move(rec));
    }
    if (!dah_cells.empty()) {
        ErrorRecord rec{ErrorClass::data_after_hole,
                        "stream content pulled left across an unfilled gap", {}, {}};
        push_ranges(rec, dah_cells);
        for (int p : dah_cells) {
            rec.chunk_ids.push_back(map.cells[static_cast<size_t>(p)].chunk_id);
        }
        out.push_back(std::move(rec));
    }
    {
        std::vector<int> dup_cells;
        std::vector<int> dup_chunks;
        for (const auto& [key, positions] : occurrences) {
            if (positions.size() > 1) {
                dup_cells.insert(dup_cells.end(), positions.begin(), positions.end());
                dup_chunks.push_back(key.first);
            }
        }
        if (!dup_cells.empty()) {
            std::sort(dup_cells.begin(), dup_cells.end());
            ErrorRecord rec{ErrorClass::duplicate_pattern,
                            "the same pattern appears at several cell positions", {}, dup_chunks};
            push_ranges(rec, dup_cells);
            out.push_back(std::move(rec));
        }
    }
    if (!misplaced_cells.empty()) {
        ErrorRecord rec{ErrorClass::misplaced_pattern,
                        "patterns decoded at a different cell than they encode", {}, {}};
        push_ranges(rec, misplaced_cells);
        for (int p : misplaced_cells) {
            rec.chunk_ids.push_back(map.cells[static_cast<size_t>(p)].chunk_id);
        }
        out.push_back(std::move(rec));
    }

    int expected = expected_length_cells(inst);
    if (len < expected) {
        ErrorRecord rec{ErrorClass::truncation,
                        "delivered " + std::to_string(len) + " cells, geometry implies " +
                            std::to_string(expected), {}, {}};
        rec.cell_ranges.emplace_back(len, expected);
        out.push_back(std::move(rec));
    }
    return out;
}

TimePolicyRecord predict_policy(const TestCaseInstance& inst, const PolicyTable& pair_policies,
                                const std::string& preset_name) {
    MechanismConfig mech = preset(preset_name);
    ReassemblyOutcome outcome = simulate(inst, pair_policies, mech);
    return extract_policy(inst, observation_from_outcome(inst, outcome));
}

namespace {

nlohmann::json policy_to_json(const TimePolicyRecord& rec) {
    nlohmann::json j;
    j["kind"] = rec.is_pair ? "pair" : "triplet";
    j["responded"] = rec.responded;
    if (rec.is_pair) {
        j["label"] = std::string(tp_value_name(rec.pair_label));
    } else {
        j["tp_t"] = std::string(tp_value_name(rec.triple_label));
        j["rp01"] = std::string(tp_value_name(rec.residual[0]));
        j["rp02"] = std::string(tp_value_name(rec.residual[1]));
        j["rp12"] = std::string(tp_value_name(rec.residual[2]));
    }
    j["anomaly"] = rec.anomaly;
    if (rec.anomaly) j["anomaly_detail"] = rec.anomaly_detail;
    return j;
}

TimePolicyRecord policy_from_json(const nlohmann::json& j) {
    TimePolicyRecord rec;
    rec.is_pair = j.at("kind").get<std::string>() == "pair";
    rec.responded = j.at("responded").get<bool>();
    if (rec.is_pair) {
        rec.pair_label = tp_value_from_name(j.at("label").get<std::string>());
    } else {
        rec.triple_label = tp_value_from_name(j.at("tp_t").get<std::string>());
        rec.residual[0] = tp_value_from_name(j.at("rp01").get<std::string>());
        rec.residual[1] = tp_value_from_name(j.at("rp02").get<std::string>());
        rec.residual[2] = tp_value_from_name(j.at("rp12").get<std::string>());
    }
    rec.anomaly = j.at("anomaly").get<bool>();
    if (rec.anomaly) rec.anomaly_detail = j.value("anomaly_detail", "");
    return rec;
}

nlohmann::json errors_to_json(const std::vector<ErrorRecord>& errors) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : errors) {
        nlohmann::json j;
        j["class"] = std::string(error_class_name(e.cls));
        j["detail"] = e.detail;
        nlohmann::json ranges = nlohmann::json::array();
        for (const auto& [a, b] : e.cell_ranges) ranges.push_back(nlohmann::json::array({a, b}));
        j["cell_ranges"] = ranges;
        j["chunk_ids"] = e.chunk_ids;
        arr.push_back(j);
    }
    return arr;
}

std::vector<ErrorRecord> errors_from_json(const nlohmann::json& arr) {
    std::vector<ErrorRecord> out;
    for (const auto& j : arr) {
        ErrorRecord e;
        e.cls = error_class_from_name(j.at("class").get<std::string>());
        e.detail = j.at("detail").get<std::string>();
        for (const auto& r : j.at("cell_ranges")) {
            e.cell_ranges.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());
        }
        e.chunk_ids = j.at("chunk_ids").get<std::vector<int>>();
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

bool PolicyReport::has_errors() const {
    for (const auto& [key, rec] : records) {
        if (!rec.errors.empty()) return true;
    }
    return false;
}

void write_report(const PolicyReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open report for writing: " + path);
    nlohmann::json meta;
    meta["kind"] = "meta";
    meta["implementation"] = report.implementation;
    meta["protocol"] = std::string(protocol_name(report.protocol));
    if (report.preset) meta["preset"] = *report.preset;
    if (report.policy_table) meta["policy_table"] = report.policy_table->to_map();
    out << meta.dump() << '\n';
    for (const auto& [key, rec] : report.records) {
        nlohmann::json j;
        j["kind"] = "record";
        j["implementation"] = report.implementation;
        j["protocol"] = std::string(protocol_name(report.protocol));
        j["scenario"] = rec.scenario;
        j["test_case_id"] = rec.test_case_id;
        j["relations"] = rec.relations;
        j["time_policy"] = policy_to_json(rec.policy);
        j["errors"] = errors_to_json(rec.errors);
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("report write failed: " + path);
}

PolicyReport read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report: " + path);
    PolicyReport report;
    std::string line;
    bool got_any = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        std::string kind = j.value("kind", "record");
        if (kind == "meta") {
            report.implementation = j.value("implementation", "");
            report.protocol = protocol_from_name(j.at("protocol").get<std::string>());
            if (j.contains("preset")) report.preset = j.at("preset").get<std::string>();
            if (j.contains("policy_table")) {
                report.policy_table = PolicyTable::from_map(
                    j.at("policy_table").get<std::map<std::string, std::string>>());
            }
            got_any = true;
            continue;
        }
        ReportRecord rec;
        rec.scenario = j.at("scenario").get<std::string>();
        rec.test_case_id = j.at("test_case_id").get<std::string>();
        rec.relations = j.at("relations").get<std::string>();
        rec.policy = policy_from_json(j.at("time_policy"));
        rec.errors = errors_from_json(j.at("errors"));
        if (!got_any) {
            report.implementation = j.value("implementation", "");
            report.protocol = protocol_from_name(j.at("protocol").get<std::string>());
            got_any = true;
        }
        report.records.emplace(std::make_pair(rec.scenario, rec.test_case_id), std::move(rec));
    }
    return report;
}

}  // namespace reasm
