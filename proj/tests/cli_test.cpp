#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

#ifndef REASM_CLI_PATH
#define REASM_CLI_PATH ""
#endif

int run(const std::string& args) {
    std::string cmd = std::string(REASM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "reasm_cli_test";
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("generate handles scenario subsets and rejects bad combinations") {
    TempDir tmp;
    std::string out = " --out " + (tmp.path / "a").string();
    CHECK(run("generate --protocol ipv4 --scenarios s_c_of" + out) == 0);
    nlohmann::json counts;
    std::ifstream((tmp.path / "a" / "ipv4" / "counts.json")) >> counts;
    CHECK(counts.at("instances") == 422);
    CHECK(counts.at("scenario_count") == 1);

    // TCP scenarios never carry an MF strategy; IP End-free ones require it.
    CHECK(run("generate --protocol tcp --scenarios s_c_of" + out) == 2);
    CHECK(run("generate --protocol ipv4 --scenarios s_c" + out) == 2);
    CHECK(run("generate --protocol ipv4 --scenarios s_nonsense" + out) == 2);
}

TEST_CASE("config file drives the run and flags override it") {
    TempDir tmp;
    fs::path cfg = tmp.path / "run.json";
    {
        std::ofstream out(cfg);
        out << nlohmann::json{{"protocol", "tcp"},
                              {"scenarios", std::vector<std::string>{"s_sf"}},
                              {"out_dir", (tmp.path / "cfgrun").string()},
                              {"implementation", "boxA"}}
                   .dump();
    }
    CHECK(run("generate --config " + cfg.string()) == 0);
    CHECK(fs::exists(tmp.path / "cfgrun" / "tcp" / "manifest.jsonl"));

    // A flag overrides the config file's protocol; s_sf is valid for ipv4
    // only with an MF suffix, so this must fail as a config error.
    CHECK(run("generate --config " + cfg.string() + " --protocol ipv4") == 2);
}

TEST_CASE("simulate rejects preset and protocol mismatches") {
    TempDir tmp;
    std::string out = " --out " + (tmp.path / "b").string();
    REQUIRE(run("generate --protocol tcp --scenarios s_sf" + out) == 0);
    CHECK(run("simulate --protocol tcp --preset aimnipa --table all_old" + out) == 2);
    CHECK(run("simulate --protocol tcp --preset nosuch --table all_old" + out) == 2);
    CHECK(run("simulate --protocol tcp --preset aimn --table all_old" + out) == 0);
    CHECK(fs::exists(tmp.path / "b" / "tcp" / "report_aimn.jsonl"));
}

TEST_CASE("extract reports observation files and signals error records") {
    TempDir tmp;
    std::string out = " --out " + (tmp.path / "c").string();
    REQUIRE(run("generate --protocol tcp --scenarios s_c" + out) == 0);
    fs::path obs = tmp.path / "obs.jsonl";
    {
        std::ofstream o(obs);
        // A clean contiguous delivery for (M): "000000oo 001001nn".
        o << nlohmann::json{{"test_case_id", "tcp:s_c:M"},
                            {"payload_hex", "3030303030306f6f3030313030316e6e"}}
                 .dump()
          << '\n';
    }
    CHECK(run("extract --protocol tcp --observations " + obs.string() + out) == 0);
    {
        std::ofstream o(obs);
        o << nlohmann::json{{"test_case_id", "tcp:s_c:M"},
                            {"payload_hex", "none"},
                            {"session_terminated", false}}
                 .dump()
          << '\n';
    }
    // The unanswered, unterminated session must surface as an error record.
    CHECK(run("extract --protocol tcp --observations " + obs.string() +
              " --report " + (tmp.path / "c" / "r.jsonl").string() + out) == 4);

    CHECK(run("extract --protocol tcp" + out) == 2);  // no input source
    CHECK(run("extract --protocol tcp --capture /nonexistent.pcap" + out) == 3);
}
