#include "reasm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace reasm {

namespace {

constexpr std::array<std::string_view, 3> kProtocolNames = {"ipv4", "ipv6", "tcp"};

constexpr std::array<std::string_view, kAgnosticScenarioCount> kAgnosticNames = {
    "s_c",     "s_sp",    "s_sf",    "s_ep",    "s_ef",    "s_sf_ef",
    "s_ef_sf", "s_sp_ef", "s_ep_sf", "s_sp_ep", "s_ep_sp"};

constexpr std::array<std::string_view, kMfStrategyCount> kMfNames = {
    "of", "nf", "mf", "onf", "omf", "mnf", "af",
    "os", "ns", "ms", "ons", "oms", "mns", "as"};

}  // namespace

std::string_view protocol_name(Protocol p) { return kProtocolNames[static_cast<size_t>(p)]; }

Protocol protocol_from_name(std::string_view name) {
    for (size_t i = 0; i < kProtocolNames.size(); ++i) {
        if (kProtocolNames[i] == name) return static_cast<Protocol>(i);
    }
    throw std::invalid_argument("unknown protocol: " + std::string(name));
}

std::string_view agnostic_name(AgnosticScenario s) {
    return kAgnosticNames[static_cast<size_t>(s)];
}

std::string_view mf_strategy_name(MfStrategy s) { return kMfNames[static_cast<size_t>(s)]; }

bool mf_targets_finishing(MfStrategy s) {
    return static_cast<uint8_t>(s) < static_cast<uint8_t>(MfStrategy::os);
}

bool ScenarioSpec::has_start() const {
    switch (agnostic) {
        case AgnosticScenario::s_sp:
        case AgnosticScenario::s_sf:
        case AgnosticScenario::s_sf_ef:
        case AgnosticScenario::s_ef_sf:
        case AgnosticScenario::s_sp_ef:
        case AgnosticScenario::s_ep_sf:
        case AgnosticScenario::s_sp_ep:
        case AgnosticScenario::s_ep_sp:
            return true;
        default:
            return false;
    }
}

bool ScenarioSpec::has_end() const {
    switch (agnostic) {
        case AgnosticScenario::s_ep:
        case AgnosticScenario::s_ef:
        case AgnosticScenario::s_sf_ef:
        case AgnosticScenario::s_ef_sf:
        case AgnosticScenario::s_sp_ef:
        case AgnosticScenario::s_ep_sf:
        case AgnosticScenario::s_sp_ep:
        case AgnosticScenario::s_ep_sp:
            return true;
        default:
            return false;
    }
}

std::string ScenarioSpec::name() const {
    std::string out{agnostic_name(agnostic)};
    if (mf) {
        out += '_';
        out += mf_strategy_name(*mf);
    }
    return out;
}

ScenarioSpec ScenarioSpec::from_name(std::string_view name) {
    for (size_t i = 0; i < kAgnosticNames.size(); ++i) {
        if (name == kAgnosticNames[i]) {
            return ScenarioSpec{static_cast<AgnosticScenario>(i), std::nullopt};
        }
        if (name.size() > kAgnosticNames[i].size() + 1 &&
            name.substr(0, kAgnosticNames[i].size()) == kAgnosticNames[i] &&
            name[kAgnosticNames[i].size()] == '_') {
            std::string_view suffix = name.substr(kAgnosticNames[i].size() + 1);
            for (size_t m = 0; m < kMfNames.size(); ++m) {
                if (suffix == kMfNames[m]) {
                    return ScenarioSpec{static_cast<AgnosticScenario>(i),
                                        static_cast<MfStrategy>(m)};
                }
            }
        }
    }
    throw std::invalid_argument("unknown scenario name: " + std::string(name));
}

const ChunkSpec* TestCaseInstance::chunk_by_id(int chunk_id) const {
    for (const auto& c : chunks) {
        if (c.chunk_id == chunk_id) return &c;
    }
    return nullptr;
}

std::vector<const ChunkSpec*> TestCaseInstance::test_chunks() const {
    std::vector<const ChunkSpec*> out;
    for (const auto& c : chunks) {
        if (c.role == ChunkRole::test) out.push_back(&c);
    }
    std::sort(out.begin(), out.end(),
              [](const ChunkSpec* a, const ChunkSpec* b) { return a->chunk_id < b->chunk_id; });
    return out;
}

std::string make_instance_id(Protocol p, const ScenarioSpec& sc, const RelationSequence& seq) {
    std::string out{protocol_name(p)};
    out += ':';
    out += sc.name();
    out += ':';
    out += seq.label();
    return out;
}

std::vector<uint8_t> chunk_payload(const TestCaseInstance& inst, const ChunkSpec& chunk) {
    std::vector<uint8_t> out;
    out.reserve(static_cast<size_t>(chunk.end_cell - chunk.start_cell) * kCellBytes);
    PatternFamily family = pattern_family(inst.protocol);
    for (int cell = chunk.start_cell; cell < chunk.end_cell; ++cell) {
        CellBytes bytes = pattern_for(chunk.chunk_id, cell, family);
        out.insert(out.end(), bytes.begin(), bytes.end());
    }
    return out;
}

std::vector<ChunkSpec> apply_scenario(const IntervalAssignment& base, const ScenarioSpec& scenario,
                                      Protocol protocol) {
    const int n = static_cast<int>(base.chunks.size());
    const bool start = scenario.has_start();
    const bool end = scenario.has_end();
    const int shift = start ? 1 : 0;

    int rightmost = 0;
    for (const auto& c : base.chunks) rightmost = std::max(rightmost, c.end + shift);

    std::vector<ChunkSpec> tests;
    for (int i = 0; i < n; ++i) {
        ChunkSpec c;
        c.chunk_id = i;
        c.start_cell = base.chunks[static_cast<size_t>(i)].start + shift;
        c.end_cell = base.chunks[static_cast<size_t>(i)].end + shift;
        c.role = ChunkRole::test;
        tests.push_back(c);
    }

    ChunkSpec start_chunk;
    start_chunk.chunk_id = n;
    start_chunk.start_cell = 0;
    start_chunk.end_cell = 1;
    start_chunk.role = ChunkRole::start;

    ChunkSpec end_chunk;
    end_chunk.chunk_id = n + 1;
    end_chunk.start_cell = rightmost;
    end_chunk.end_cell = rightmost + 1;
    end_chunk.role = ChunkRole::end;
    end_chunk.mf_unset = is_ip(protocol) && end;

    std::vector<ChunkSpec> ordered;
    auto push_tests = [&] {
        for (auto& c : tests) ordered.push_back(c);
    };
    switch (scenario.agnostic) {
        case AgnosticScenario::s_c:
            push_tests();
            break;
        case AgnosticScenario::s_sp:
            ordered.push_back(start_chunk);
            push_tests();
            break;
        case AgnosticScenario::s_sf:
            push_tests();
            ordered.push_back(start_chunk);
            break;
        case AgnosticScenario::s_ep:
            ordered.push_back(end_chunk);
            push_tests();
            break;
        case AgnosticScenario::s_ef:
            push_tests();
            ordered.push_back(end_chunk);
            break;
        case AgnosticScenario::s_sf_ef:
            push_tests();
            ordered.push_back(start_chunk);
            ordered.push_back(end_chunk);
            break;
        case AgnosticScenario::s_ef_sf:
            push_tests();
            ordered.push_back(end_chunk);
            ordered.push_back(start_chunk);
            break;
        case AgnosticScenario::s_sp_ef:
            ordered.push_back(start_chunk);
            push_tests();
            ordered.push_back(end_chunk);
            break;
        case AgnosticScenario::s_ep_sf:
            ordered.push_back(end_chunk);
            push_tests();
            ordered.push_back(start_chunk);
            break;
        case AgnosticScenario::s_sp_ep:
            ordered.push_back(start_chunk);
            ordered.push_back(end_chunk);
            push_tests();
            break;
        case AgnosticScenario::s_ep_sp:
            ordered.push_back(end_chunk);
            ordered.push_back(start_chunk);
            push_tests();
            break;
    }

    for (size_t t = 0; t < ordered.size(); ++t) {
        ordered[t].time_index = static_cast<int>(t);
        ordered[t].carries_header = is_ip(protocol) && ordered[t].start_cell == 0;
    }
    return ordered;
}

void mf_assign(std::vector<ChunkSpec>& chunks, MfStrategy strategy) {
    for (const auto& c : chunks) {
        if (c.role == ChunkRole::end) {
            throw std::invalid_argument("mf_assign: MF strategy supplied for an End-bearing scenario");
        }
    }
    const bool finishing = mf_targets_finishing(strategy);
    int best = -1;
    for (const auto& c : chunks) {
        if (c.role != ChunkRole::test) continue;
        best = std::max(best, finishing ? c.end_cell : c.start_cell);
    }
    std::vector<ChunkSpec*> candidates;
    for (auto& c : chunks) {
        if (c.role != ChunkRole::test) continue;
        if ((finishing ? c.end_cell : c.start_cell) == best) candidates.push_back(&c);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const ChunkSpec* a, const ChunkSpec* b) { return a->time_index < b->time_index; });

    const int k = static_cast<int>(candidates.size());
    const int oldest = 0;
    const int newest = k - 1;
    const int middle = (k - 1) / 2;

    std::vector<int> marked;
    switch (strategy) {
        case MfStrategy::of:
        case MfStrategy::os: marked = {oldest}; break;
        case MfStrategy::nf:
        case MfStrategy::ns: marked = {newest}; break;
        case MfStrategy::mf:
        case MfStrategy::ms: marked = {middle}; break;
        case MfStrategy::onf:
        case MfStrategy::ons: marked = {oldest, newest}; break;
        case MfStrategy::omf:
        case MfStrategy::oms: marked = {oldest, middle}; break;
        case MfStrategy::mnf:
        case MfStrategy::mns: marked = {middle, newest}; break;
        case MfStrategy::af:
        case MfStrategy::as:
            for (int i = 0; i < k; ++i) marked.push_back(i);
            break;
    }

    for (auto& c : chunks) c.mf_unset = false;
    for (int idx : marked) candidates[static_cast<size_t>(idx)]->mf_unset = true;
}

std::string dedup_key(const TestCaseInstance& inst) {
    std::string key;
    for (const auto& c : inst.chunks) {
        key += std::to_string(c.start_cell);
        key += ',';
        key += std::to_string(c.end_cell);
        key += ',';
        key += c.mf_unset ? '1' : '0';
        key += ',';
        for (uint8_t b : chunk_payload(inst, c)) {
            static const char hex[] = "0123456789abcdef";
            key += hex[b >> 4];
            key += hex[b & 0xF];
        }
        key += ';';
    }
    return key;
}

std::vector<ScenarioSpec> ip_end_bearing_scenarios() {
    std::vector<ScenarioSpec> out;
    for (int i = 0; i < kAgnosticScenarioCount; ++i) {
        ScenarioSpec sc{static_cast<AgnosticScenario>(i), std::nullopt};
        if (sc.has_end()) out.push_back(sc);
    }
    return out;
}

std::vector<ScenarioSpec> ip_mf_expanded_scenarios() {
    std::vector<ScenarioSpec> out;
    for (int i = 0; i < kAgnosticScenarioCount; ++i) {
        ScenarioSpec sc{static_cast<AgnosticScenario>(i), std::nullopt};
        if (sc.has_end()) continue;
        for (int m = 0; m < kMfStrategyCount; ++m) {
            out.push_back(ScenarioSpec{sc.agnostic, static_cast<MfStrategy>(m)});
        }
    }
    return out;
}

std::vector<ScenarioSpec> scenarios_for(Protocol p) {
    std::vector<ScenarioSpec> out;
    if (is_ip(p)) {
        out = ip_mf_expanded_scenarios();
        auto ends = ip_end_bearing_scenarios();
        out.insert(out.end(), ends.begin(), ends.end());
    } else {
        for (int i = 0; i < kAgnosticScenarioCount; ++i) {
            out.push_back(ScenarioSpec{static_cast<AgnosticScenario>(i), std::nullopt});
        }
    }
    return out;
}

size_t Corpus::canonical_count() const {
    size_t n = 0;
    for (const auto& inst : instances) {
        if (inst.is_canonical()) ++n;
    }
    return n;
}

std::vector<const TestCaseInstance*> Corpus::canonical_instances() const {
    std::vector<const TestCaseInstance*> out;
    for (const auto& inst : instances) {
        if (inst.is_canonical()) out.push_back(&inst);
    }
    return out;
}

const TestCaseInstance* Corpus::find(const std::string& id) const {
    for (const auto& inst : instances) {
        if (inst.id == id) return &inst;
    }
    return nullptr;
}

Corpus build_corpus(Protocol protocol, const std::vector<ScenarioSpec>& scenarios) {
    for (const auto& sc : scenarios) {
        if (sc.mf && (!is_ip(protocol) || sc.has_end())) {
            throw std::invalid_argument("unsupported protocol/scenario combination: " +
                                        std::string(protocol_name(protocol)) + " " + sc.name());
        }
        if (is_ip(protocol) && !sc.mf && !sc.has_end()) {
            throw std::invalid_argument("IP scenario without End requires an MF strategy: " +
                                        sc.name());
        }
    }

    std::vector<RelationSequence> sequences = enumerate_coherent(2);
    {
        auto triplets = enumerate_coherent(3);
        sequences.insert(sequences.end(), triplets.begin(), triplets.end());
    }

    Corpus corpus;
    corpus.protocol = protocol;
    std::map<std::string, std::string> seen_keys;  // dedup_key -> canonical id
    uint32_t ordinal = 0;
    for (const auto& sc : scenarios) {
        ScenarioCount count;
        count.scenario = sc.name();
        for (const auto& seq : sequences) {
            TestCaseInstance inst;
            inst.protocol = protocol;
            inst.relations = seq;
            inst.scenario = sc;
            inst.id = make_instance_id(protocol, sc, seq);
            inst.chunks = apply_scenario(quantify(seq), sc, protocol);
            if (sc.mf) mf_assign(inst.chunks, *sc.mf);
            inst.dedup_key = dedup_key(inst);
            inst.ordinal = ordinal++;
            auto [it, inserted] = seen_keys.emplace(inst.dedup_key, inst.id);
            inst.canonical_id = inserted ? inst.id : it->second;
            count.instances++;
            if (inserted) count.canonical++;
            corpus.instances.push_back(std::move(inst));
        }
        corpus.per_scenario.push_back(count);
    }
    return corpus;
}

namespace {

nlohmann::json chunk_to_json(const TestCaseInstance& inst, const ChunkSpec& c) {
    static const char* role_names[] = {"test", "start", "end"};
    std::string payload_hex;
    for (uint8_t b : chunk_payload(inst, c)) {
        static const char hex[] = "0123456789abcdef";
        payload_hex += hex[b >> 4];
        payload_hex += hex[b & 0xF];
    }
    return nlohmann::json{{"chunk_id", c.chunk_id},
                          {"time_index", c.time_index},
                          {"start_cell", c.start_cell},
                          {"end_cell", c.end_cell},
                          {"role", role_names[static_cast<size_t>(c.role)]},
                          {"mf_unset", c.mf_unset},
                          {"carries_header", c.carries_header},
                          {"payload_hex", payload_hex}};
}

ChunkSpec chunk_from_json(const nlohmann::json& j) {
    ChunkSpec c;
    c.chunk_id = j.at("chunk_id").get<int>();
    c.time_index = j.at("time_index").get<int>();
    c.start_cell = j.at("start_cell").get<int>();
    c.end_cell = j.at("end_cell").get<int>();
    std::string role = j.at("role").get<std::string>();
    c.role = role == "test" ? ChunkRole::test : role == "start" ? ChunkRole::start : ChunkRole::end;
    c.mf_unset = j.at("mf_unset").get<bool>();
    c.carries_header = j.at("carries_header").get<bool>();
    return c;
}

}  // namespace

void write_manifest(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open manifest for writing: " + path);
    for (const auto& inst : corpus.instances) {
        nlohmann::json j{{"id", inst.id},
                         {"protocol", std::string(protocol_name(inst.protocol))},
                         {"relations", inst.relations.label()},
                         {"n", inst.relations.n},
                         {"scenario", inst.scenario.name()},
                         {"ordinal", inst.ordinal},
                         {"canonical_id", inst.canonical_id},
                         {"dedup_key", inst.dedup_key}};
        nlohmann::json chunks = nlohmann::json::array();
        for (const auto& c : inst.chunks) chunks.push_back(chunk_to_json(inst, c));
        j["chunks"] = chunks;
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("manifest write failed: " + path);
}

Corpus read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    Corpus corpus;
    bool first = true;
    std::map<std::string, ScenarioCount> per_scenario;
    std::vector<std::string> scenario_order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        TestCaseInstance inst;
        inst.id = j.at("id").get<std::string>();
        inst.protocol = protocol_from_name(j.at("protocol").get<std::string>());
        inst.relations =
            RelationSequence::from_label(j.at("n").get<int>(), j.at("relations").get<std::string>());
        inst.scenario = ScenarioSpec::from_name(j.at("scenario").get<std::string>());
        inst.ordinal = j.at("ordinal").get<uint32_t>();
        inst.canonical_id = j.at("canonical_id").get<std::string>();
        inst.dedup_key = j.at("dedup_key").get<std::string>();
        for (const auto& cj : j.at("chunks")) inst.chunks.push_back(chunk_from_json(cj));
        if (first) {
            corpus.protocol = inst.protocol;
            first = false;
        }
        auto [it, inserted] = per_scenario.try_emplace(inst.scenario.name());
        if (inserted) {
            it->second.scenario = inst.scenario.name();
            scenario_order.push_back(it->second.scenario);
        }
        it->second.instances++;
        if (inst.is_canonical()) it->second.canonical++;
        corpus.instances.push_back(std::move(inst));
    }
    for (const auto& name : scenario_order) corpus.per_scenario.push_back(per_scenario.at(name));
    return corpus;
}

}  // namespace reasm
