// Batch front-end: corpus generation, PCAP synthesis, simulation, reply
// extraction, and report analysis over a fixed on-disk layout.
//
//   reasm generate --protocol tcp --out runs/tcp
//   reasm synth    --out runs/tcp
//   reasm simulate --out runs/tcp --preset aimn --table all_old
//   reasm extract  --out runs/tcp --capture replies.pcap
//   reasm analyze  --out runs/tcp --report a.jsonl --report b.jsonl
//
// Exit codes: 0 ok, 2 configuration error, 3 I/O error, 4 reassembly errors
// detected by extract.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "reasm/analysis.hpp"
#include "reasm/corpus.hpp"
#include "reasm/policy.hpp"
#include "reasm/simulator.hpp"
#include "reasm/wire.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitErrorsFound = 4;

struct RunConfig {
    reasm::Protocol protocol = reasm::Protocol::tcp;
    std::vector<std::string> scenarios;  // empty or {"all"} = every scenario
    std::string out_dir = "out";
    reasm::NetConfig net;
    std::vector<std::string> presets;
    std::string implementation = "sim";
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    if (j.contains("protocol")) {
        cfg.protocol = reasm::protocol_from_name(j.at("protocol").get<std::string>());
    }
    if (j.contains("scenarios")) {
        if (j.at("scenarios").is_string()) {
            cfg.scenarios = {j.at("scenarios").get<std::string>()};
        } else {
            cfg.scenarios = j.at("scenarios").get<std::vector<std::string>>();
        }
    }
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("presets")) cfg.presets = j.at("presets").get<std::vector<std::string>>();
    if (j.contains("implementation")) {
        cfg.implementation = j.at("implementation").get<std::string>();
    }
    if (j.contains("net")) {
        const json& n = j.at("net");
        auto& net = cfg.net;
        if (n.contains("src_mac")) net.src_mac = reasm::MacAddress::parse(n.at("src_mac").get<std::string>());
        if (n.contains("dst_mac")) net.dst_mac = reasm::MacAddress::parse(n.at("dst_mac").get<std::string>());
        if (n.contains("src_ipv4")) net.src_ipv4 = reasm::Ipv4Address::parse(n.at("src_ipv4").get<std::string>());
        if (n.contains("dst_ipv4")) net.dst_ipv4 = reasm::Ipv4Address::parse(n.at("dst_ipv4").get<std::string>());
        if (n.contains("src_ipv6")) net.src_ipv6 = reasm::Ipv6Address::parse(n.at("src_ipv6").get<std::string>());
        if (n.contains("dst_ipv6")) net.dst_ipv6 = reasm::Ipv6Address::parse(n.at("dst_ipv6").get<std::string>());
        if (n.contains("tcp_echo_port")) net.tcp_echo_port = n.at("tcp_echo_port").get<uint16_t>();
        if (n.contains("base_src_port")) net.base_src_port = n.at("base_src_port").get<uint16_t>();
        if (n.contains("icmp_id_base")) net.icmp_id_base = n.at("icmp_id_base").get<uint16_t>();
        if (n.contains("frame_spacing_usec")) net.frame_spacing_usec = n.at("frame_spacing_usec").get<uint32_t>();
    }
}

std::vector<reasm::ScenarioSpec> selected_scenarios(const RunConfig& cfg) {
    auto all = reasm::scenarios_for(cfg.protocol);
    if (cfg.scenarios.empty() || (cfg.scenarios.size() == 1 && cfg.scenarios[0] == "all")) {
        return all;
    }
    std::vector<reasm::ScenarioSpec> out;
    for (const auto& name : cfg.scenarios) {
        reasm::ScenarioSpec sc = reasm::ScenarioSpec::from_name(name);
        bool known = false;
        for (const auto& cand : all) known |= cand == sc;
        if (!known) {
            throw std::invalid_argument("scenario " + name + " is not valid for protocol " +
                                        std::string(reasm::protocol_name(cfg.protocol)));
        }
        out.push_back(sc);
    }
    return out;
}

fs::path proto_dir(const RunConfig& cfg) {
    return fs::path(cfg.out_dir) / std::string(reasm::protocol_name(cfg.protocol));
}

reasm::Corpus load_corpus(const RunConfig& cfg) {
    fs::path manifest = proto_dir(cfg) / "manifest.jsonl";
    if (!fs::exists(manifest)) {
        throw std::runtime_error("manifest not found, run generate first: " + manifest.string());
    }
    return reasm::read_manifest(manifest.string());
}

int cmd_generate(const RunConfig& cfg) {
    auto scenarios = selected_scenarios(cfg);
    reasm::Corpus corpus = reasm::build_corpus(cfg.protocol, scenarios);

    fs::create_directories(proto_dir(cfg));
    reasm::write_manifest(corpus, (proto_dir(cfg) / "manifest.jsonl").string());

    size_t total = corpus.instances.size();
    size_t canonical = corpus.canonical_count();
    std::cout << reasm::protocol_name(cfg.protocol) << ": " << scenarios.size()
              << " scenarios, " << total << " instances, " << canonical << " after dedup\n";
    for (const auto& sc : corpus.per_scenario) {
        std::cout << "  " << sc.scenario << ": " << sc.instances << " instances, "
                  << sc.canonical << " canonical\n";
    }

    json counts;
    counts["protocol"] = std::string(reasm::protocol_name(cfg.protocol));
    counts["scenario_count"] = scenarios.size();
    counts["instances"] = total;
    counts["after_dedup"] = canonical;
    json per = json::array();
    for (const auto& sc : corpus.per_scenario) {
        per.push_back({{"scenario", sc.scenario},
                       {"instances", sc.instances},
                       {"canonical", sc.canonical}});
    }
    counts["per_scenario"] = per;

    if (reasm::is_ip(cfg.protocol)) {
        size_t end_bearing = 0, mf_expanded = 0, mf_scenarios = 0, mf_canonical = 0;
        for (const auto& inst : corpus.instances) {
            if (inst.scenario.mf) {
                ++mf_expanded;
            } else {
                ++end_bearing;
            }
        }
        std::map<std::string, bool> seen;
        std::map<std::string, std::string> first_key_owner;
        for (const auto& inst : corpus.instances) {
            if (!inst.scenario.mf) continue;
            if (!seen.count(inst.scenario.name())) seen[inst.scenario.name()] = true;
            // dedup restricted to the MF-expanded families
            auto [it, inserted] = first_key_owner.emplace(inst.dedup_key, inst.id);
            if (inserted) ++mf_canonical;
        }
        mf_scenarios = seen.size();
        counts["ip_end_bearing_instances"] = end_bearing;
        counts["ip_mf_scenarios"] = mf_scenarios;
        counts["ip_mf_instances"] = mf_expanded;
        counts["ip_mf_after_dedup"] = mf_canonical;
        std::cout << "  End-bearing instances: " << end_bearing << "\n"
                  << "  MF-expanded scenarios: " << mf_scenarios << " (" << mf_expanded
                  << " instances, " << mf_canonical << " after dedup among themselves)\n";

        // The corpus-wide dedup count is checked against the documented
        // target; a gap is quantified per scenario instead of forced.
        constexpr size_t kDocumentedIpDedup = 10362;
        if (scenarios.size() == reasm::scenarios_for(cfg.protocol).size() &&
            canonical != kDocumentedIpDedup) {
            json rec;
            rec["documented_total"] = kDocumentedIpDedup;
            rec["observed"] = {
                {"pre_dedup_all_50_scenarios", total},
                {"pre_dedup_42_mf_scenarios", mf_expanded},
                {"corpus_wide_dedup", canonical},
                {"mf_families_only_dedup", mf_canonical},
                {"end_bearing", end_bearing},
            };
            // Distinct wire sequences per End-free agnostic family, i.e.
            // after collapsing the 14 MF strategies against each other.
            {
                json fam = json::object();
                std::map<std::string, std::set<std::string>> family_keys;
                for (const auto& inst : corpus.instances) {
                    if (inst.scenario.mf) {
                        family_keys[std::string(
                            reasm::agnostic_name(inst.scenario.agnostic))]
                            .insert(inst.dedup_key);
                    }
                }
                for (const auto& [name, keys] : family_keys) fam[name] = keys.size();
                rec["observed"]["per_agnostic_family_dedup"] = fam;
            }
            rec["note"] =
                "every dedup interpretation of the generated corpus (per scenario, per "
                "agnostic family, MF families only, corpus-wide) differs from the "
                "documented total; the corpus keeps all collapsed instances as aliases "
                "of their canonical wire sequence, so any alternative accounting can be "
                "recomputed from the manifest";
            json gaps = json::array();
            for (const auto& sc : corpus.per_scenario) {
                gaps.push_back({{"scenario", sc.scenario},
                                {"instances", sc.instances},
                                {"canonical", sc.canonical},
                                {"collapsed", sc.instances - sc.canonical}});
            }
            rec["per_scenario"] = gaps;
            std::ofstream rout(proto_dir(cfg) / "reconciliation.json");
            rout << rec.dump(2) << '\n';
            std::cout << "  corpus-wide dedup " << canonical << " != documented "
                      << kDocumentedIpDedup << "; wrote reconciliation.json\n";
        }
    }

    std::ofstream cout_file(proto_dir(cfg) / "counts.json");
    cout_file << counts.dump(2) << '\n';
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    reasm::Corpus corpus = load_corpus(cfg);
    std::map<std::string, std::vector<reasm::FrameBlueprint>> per_scenario;
    std::vector<std::string> order;
    for (const auto* inst : corpus.canonical_instances()) {
        auto frames = reasm::synth_instance(*inst, cfg.net);
        auto [it, inserted] = per_scenario.try_emplace(inst->scenario.name());
        if (inserted) order.push_back(inst->scenario.name());
        for (auto& f : frames) {
            f.send_index = static_cast<uint32_t>(it->second.size());
            f.ts_usec = static_cast<uint64_t>(cfg.net.frame_spacing_usec) * f.send_index;
            it->second.push_back(std::move(f));
        }
    }
    size_t total_frames = 0;
    for (const auto& name : order) {
        fs::path dir = proto_dir(cfg) / name;
        fs::create_directories(dir);
        reasm::write_pcap(per_scenario.at(name), (dir / "frames.pcap").string());
        total_frames += per_scenario.at(name).size();
    }

    // Update the manifest in place with the wire correlation keys.
    {
        fs::path manifest_path = proto_dir(cfg) / "manifest.jsonl";
        std::ifstream in(manifest_path);
        std::vector<std::string> lines;
        std::string line;
        std::unordered_map<std::string, const reasm::TestCaseInstance*> by_id;
        for (const auto& inst : corpus.instances) by_id.emplace(inst.id, &inst);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            auto it = by_id.find(j.at("id").get<std::string>());
            if (it != by_id.end()) {
                reasm::WireIds ids = reasm::wire_ids_for(*it->second, cfg.net);
                j["wire"] = {{"ipv4_ident", ids.ipv4_ident},
                             {"ipv6_frag_id", ids.ipv6_frag_id},
                             {"icmp_id", ids.icmp_id},
                             {"icmp_seq", ids.icmp_seq},
                             {"tcp_src_port", ids.tcp_src_port}};
            }
            lines.push_back(j.dump());
        }
        in.close();
        std::ofstream out(manifest_path, std::ios::trunc);
        for (const auto& l : lines) out << l << '\n';
    }
    std::cout << "wrote " << order.size() << " pcap files, " << total_frames << " frames\n";
    return 0;
}

reasm::PolicyTable table_from_spec(const std::string& spec) {
    if (spec == "all_old") return reasm::PolicyTable::uniform(reasm::PairPolicy::old_data);
    if (spec == "all_new") return reasm::PolicyTable::uniform(reasm::PairPolicy::new_data);
    if (spec.rfind("random:", 0) == 0) {
        unsigned seed = static_cast<unsigned>(std::stoul(spec.substr(7)));
        std::mt19937 rng(seed);
        std::uniform_int_distribution<int> dist(0, 2);
        reasm::PolicyTable table;
        for (reasm::AllenRelation r : reasm::all_relations()) {
            if (reasm::is_overlapping(r)) {
                table.set(r, static_cast<reasm::PairPolicy>(dist(rng)));
            }
        }
        return table;
    }
    // Otherwise a JSON file mapping relation names to old/new/ignore.
    std::ifstream in(spec);
    if (!in) throw std::runtime_error("cannot open policy table file: " + spec);
    json j = json::parse(in);
    return reasm::PolicyTable::from_map(j.get<std::map<std::string, std::string>>());
}

int cmd_simulate(const RunConfig& cfg, const std::string& preset_name,
                 const std::string& table_spec, const std::string& report_path) {
    reasm::Corpus corpus = load_corpus(cfg);
    reasm::MechanismConfig mech = reasm::preset(preset_name);
    if (reasm::is_ip(cfg.protocol) != mech.ignore_interp.has_value()) {
        throw std::invalid_argument("preset " + preset_name + " does not match protocol " +
                                    std::string(reasm::protocol_name(cfg.protocol)));
    }
    reasm::PolicyTable table = table_from_spec(table_spec);

    reasm::PolicyReport report;
    report.implementation = cfg.implementation + "-" + preset_name;
    report.protocol = cfg.protocol;
    report.preset = preset_name;
    report.policy_table = table;
    for (const auto& inst : corpus.instances) {
        reasm::ReassemblyOutcome outcome = reasm::simulate(inst, table, mech);
        reasm::Observation obs = reasm::observation_from_outcome(inst, outcome);
        reasm::ReportRecord rec;
        rec.scenario = inst.scenario.name();
        rec.test_case_id = inst.id;
        rec.relations = inst.relations.label();
        rec.policy = reasm::extract_policy(inst, obs);
        rec.errors = reasm::detect_errors(inst, obs);
        report.records.emplace(std::make_pair(rec.scenario, rec.test_case_id), std::move(rec));
    }

    fs::path path = report_path.empty()
                        ? proto_dir(cfg) / ("report_" + preset_name + ".jsonl")
                        : fs::path(report_path);
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    reasm::write_report(report, path.string());
    std::cout << "simulated " << report.records.size() << " test cases with preset "
              << preset_name << " -> " << path.string() << '\n';
    return 0;
}

int cmd_extract(const RunConfig& cfg, std::vector<std::string> capture_paths,
                const std::string& capture_dir, const std::string& observations_path,
                const std::string& report_path) {
    reasm::Corpus corpus = load_corpus(cfg);
    if (!capture_dir.empty()) {
        std::vector<std::string> found;
        for (const auto& entry : fs::recursive_directory_iterator(capture_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".pcap") {
                found.push_back(entry.path().string());
            }
        }
        std::sort(found.begin(), found.end());
        capture_paths.insert(capture_paths.end(), found.begin(), found.end());
    }
    std::vector<reasm::Observation> observations;
    if (!capture_paths.empty()) {
        for (const auto& path : capture_paths) {
            auto frames = reasm::read_pcap(path);
            auto part = reasm::extract_replies(frames, corpus, cfg.net);
            observations.insert(observations.end(), part.begin(), part.end());
        }
    } else if (!observations_path.empty()) {
        std::ifstream in(observations_path);
        if (!in) throw std::runtime_error("cannot open observations: " + observations_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);
            reasm::Observation obs;
            obs.test_case_id = j.at("test_case_id").get<std::string>();
            std::string hex = j.value("payload_hex", "none");
            if (hex != "none") {
                std::vector<uint8_t> payload;
                if (hex.size() % 2) throw std::runtime_error("odd hex payload for " + obs.test_case_id);
                for (size_t i = 0; i < hex.size(); i += 2) {
                    payload.push_back(
                        static_cast<uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
                }
                obs.payload = std::move(payload);
            }
            obs.reply_before_complete = j.value("reply_before_complete", false);
            obs.session_terminated = j.value("session_terminated", true);
            observations.push_back(std::move(obs));
        }
    } else {
        throw std::invalid_argument("extract requires --capture, --capture-dir, or --observations");
    }

    std::unordered_map<std::string, const reasm::TestCaseInstance*> by_id;
    for (const auto& inst : corpus.instances) by_id.emplace(inst.id, &inst);
    std::unordered_map<std::string, const reasm::Observation*> by_canonical;
    for (const auto& obs : observations) {
        auto it = by_id.find(obs.test_case_id);
        if (it == by_id.end()) {
            throw std::runtime_error("observation for unknown test case " + obs.test_case_id);
        }
        by_canonical.emplace(obs.test_case_id, &obs);
    }

    reasm::PolicyReport report;
    report.implementation = cfg.implementation;
    report.protocol = cfg.protocol;
    size_t error_records = 0;
    auto add_record = [&](const reasm::TestCaseInstance& inst, reasm::Observation obs) {
        obs.test_case_id = inst.id;
        reasm::ReportRecord rec;
        rec.scenario = inst.scenario.name();
        rec.test_case_id = inst.id;
        rec.relations = inst.relations.label();
        rec.policy = reasm::extract_policy(inst, obs);
        rec.errors = reasm::detect_errors(inst, obs);
        if (!rec.errors.empty()) ++error_records;
        report.records.emplace(std::make_pair(rec.scenario, rec.test_case_id), std::move(rec));
    };
    // Collapsed instances share their canonical's wire traffic, so the
    // observation applies to them too; their record is re-extracted against
    // their own relation labeling. A directly supplied observation wins.
    for (const auto& inst : corpus.instances) {
        auto it = by_canonical.find(inst.id);
        if (it == by_canonical.end()) it = by_canonical.find(inst.canonical_id);
        if (it != by_canonical.end()) add_record(inst, *it->second);
    }

    fs::path path = report_path.empty() ? proto_dir(cfg) / "report_extracted.jsonl"
                                        : fs::path(report_path);
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    reasm::write_report(report, path.string());
    std::cout << "extracted " << report.records.size() << " observations, " << error_records
              << " with reassembly errors -> " << path.string() << '\n';
    return error_records == 0 ? 0 : kExitErrorsFound;
}

int cmd_analyze(const RunConfig& cfg, const std::vector<std::string>& report_paths) {
    if (report_paths.empty()) throw std::invalid_argument("analyze requires at least one report");
    std::vector<reasm::PolicyReport> reports;
    for (const auto& p : report_paths) reports.push_back(reasm::read_report(p));
    for (const auto& r : reports) {
        if (r.protocol != reports.front().protocol) {
            throw std::invalid_argument("analyze: reports mix protocols");
        }
    }
    fs::path dir = fs::path(cfg.out_dir) / "analysis";
    fs::create_directories(dir);

    // Pairwise similarity matrix.
    if (reports.size() >= 2) {
        json sim_json = json::array();
        std::ofstream matrix(dir / "similarity.txt");
        matrix << "similarity (%), full time policy records\n";
        for (const auto& r : reports) matrix << '\t' << r.implementation;
        matrix << '\n';
        for (size_t i = 0; i < reports.size(); ++i) {
            matrix << reports[i].implementation;
            for (size_t j = 0; j < reports.size(); ++j) {
                double pct =
                    i == j ? 100.0 : reasm::similarity(reports[i], reports[j]).percent;
                char buf[16];
                std::snprintf(buf, sizeof buf, "%.2f", pct);
                matrix << '\t' << buf;
                if (i < j) {
                    sim_json.push_back({{"a", reports[i].implementation},
                                        {"b", reports[j].implementation},
                                        {"percent", pct}});
                }
            }
            matrix << '\n';
        }
        std::ofstream(dir / "similarity.json") << sim_json.dump(2) << '\n';
    }

    // Scenario groups per report.
    {
        json groups_json;
        for (const auto& r : reports) {
            json g = json::array();
            for (const auto& group : reasm::scenario_groups(r)) g.push_back(group);
            groups_json[r.implementation] = g;
        }
        std::ofstream(dir / "scenario_groups.json") << groups_json.dump(2) << '\n';
    }

    // Baseline and prediction consistency per report (each report carries
    // both its pair and triplet records).
    reasm::Corpus corpus = load_corpus(cfg);
    json consistency = json::array();
    for (const auto& r : reports) {
        json entry;
        entry["implementation"] = r.implementation;
        auto baseline = reasm::baseline_consistency(r, r);
        entry["baseline_mismatches"] = baseline.size();
        json presets_json = json::array();
        for (const auto& preset_name : cfg.presets) {
            if (reasm::preset_is_ip(preset_name) != reasm::is_ip(cfg.protocol)) continue;
            reasm::PredictionSummary summary =
                r.policy_table ? reasm::prediction_consistency(corpus, r, *r.policy_table,
                                                               preset_name)
                               : reasm::prediction_consistency(corpus, r, r, preset_name);
            json pj;
            pj["preset"] = preset_name;
            pj["compared"] = summary.compared;
            pj["mismatches"] = summary.mismatches;
            pj["explained"] = summary.explained();
            json per_sc = json::object();
            for (const auto& [sc, n] : summary.mismatches_per_scenario) per_sc[sc] = n;
            pj["per_scenario"] = per_sc;
            presets_json.push_back(pj);
        }
        entry["predictions"] = presets_json;
        consistency.push_back(entry);

        std::ofstream findings(dir / ("baseline_findings_" + r.implementation + ".jsonl"));
        for (const auto& f : baseline) {
            findings << json{{"scenario", f.scenario},
                             {"test_case_id", f.test_case_id},
                             {"component", f.component},
                             {"expected", f.expected},
                             {"observed", f.observed}}
                            .dump()
                     << '\n';
        }
    }
    std::ofstream(dir / "consistency.json") << consistency.dump(2) << '\n';
    std::cout << "analysis written to " << dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"overlap reassembly audit toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string protocol_name = "tcp";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--protocol", protocol_name, "ipv4, ipv6, or tcp");
        sub->add_option("--scenarios", cfg.scenarios, "scenario names, or 'all'");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--implementation", cfg.implementation, "implementation label");
        sub->add_option("--spacing-usec", cfg.net.frame_spacing_usec,
                        "inter-frame timestamp spacing");
    };

    auto* gen = app.add_subcommand("generate", "build the test-case corpus and manifest");
    add_common(gen);

    auto* synth = app.add_subcommand("synth", "synthesize PCAP files from the corpus");
    add_common(synth);

    auto* sim = app.add_subcommand("simulate", "simulate a reassembly algorithm over the corpus");
    add_common(sim);
    std::string preset_name, table_spec = "all_old", report_out;
    sim->add_option("--preset", preset_name, "algorithm preset name")->required();
    sim->add_option("--table", table_spec,
                    "all_old, all_new, random:<seed>, or a JSON table file");
    sim->add_option("--report", report_out, "report output path");

    auto* ext = app.add_subcommand("extract", "extract time policies from a capture");
    add_common(ext);
    std::vector<std::string> capture_paths;
    std::string capture_dir, observations_path;
    ext->add_option("--capture", capture_paths, "reply PCAP file (repeatable)");
    ext->add_option("--capture-dir", capture_dir, "directory scanned for *.pcap files");
    ext->add_option("--observations", observations_path, "JSONL observations file");
    ext->add_option("--report", report_out, "report output path");

    auto* ana = app.add_subcommand("analyze", "compare policy reports");
    add_common(ana);
    std::vector<std::string> report_paths;
    ana->add_option("--report", report_paths, "policy report path (repeatable)");
    ana->add_option("--preset", cfg.presets, "preset names for prediction consistency");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        // Flags override the config file; the config file overrides defaults.
        if (active->count("--protocol") || config_path.empty()) {
            cfg.protocol = reasm::protocol_from_name(protocol_name);
        }
        if (gen->parsed()) return cmd_generate(cfg);
        if (synth->parsed()) return cmd_synth(cfg);
        if (sim->parsed()) return cmd_simulate(cfg, preset_name, table_spec, report_out);
        if (ext->parsed()) {
            return cmd_extract(cfg, capture_paths, capture_dir, observations_path, report_out);
        }
        if (ana->parsed()) return cmd_analyze(cfg, report_paths);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
