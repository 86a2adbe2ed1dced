#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "helpers.hpp"

using covote::testutil::TempDir;
using covote::testutil::read_file;
using covote::testutil::write_file;

namespace fs = std::filesystem;

namespace {

constexpr const char* cli_path = COVOTE_CLI_PATH;
constexpr bool cli_available = cli_path[0] != '\0';

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

// Runs the installed binary with the given arguments, capturing all output.
CliResult run_cli(const TempDir& dir, const std::string& args, const std::string& env = "") {
    static int invocation = 0;
    std::string capture = dir.file("cli_capture_" + std::to_string(invocation++) + ".txt");
    std::string command = env + (env.empty() ? "" : " ") + "'" + std::string(cli_path) + "' " + args +
                          " > '" + capture + "' 2>&1";
    int status = std::system(command.c_str());
    CliResult result;
    if (status != -1 && WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    result.output = read_file(capture);
    return result;
}

std::string simulate_config_json(bool with_seed) {
    std::string json = R"({
  "groups": ["A", "B", "C"],
  "sizes": [4, 4, 4],
  "cohesion": [0.95, 0.85, 0.6],
  "coalition": [[0.0, 0.9, 0.0], [0.9, 0.0, 0.0], [0.0, 0.0, 0.0]],
  "rollcalls": 16,
  "retweet_within_rate": 2.0,
  "retweet_between_rate": 0.4,
  "policy_areas": ["Trade", "Budget"])";
    if (with_seed) json += ",\n  \"seed\": 3";
    json += "\n}\n";
    return json;
}

} // namespace

TEST_CASE("version and help exit cleanly" * doctest::skip(!cli_available)) {
    TempDir dir("cliver");
    CliResult version = run_cli(dir, "--version");
    CHECK(version.exit_code == 0);
    CHECK(version.output.find("0.1.0") != std::string::npos);

    CliResult help = run_cli(dir, "--help");
    CHECK(help.exit_code == 0);
    for (const char* word : {"ingest", "simulate", "run"}) {
        INFO(word);
        CHECK(help.output.find(word) != std::string::npos);
    }
}

TEST_CASE("a missing subcommand or unknown stage fails with exit 1" * doctest::skip(!cli_available)) {
    TempDir dir("cliargs");
    CHECK(run_cli(dir, "").exit_code == 1);

    write_file(dir.file("empty.json"), "{}");
    CliResult bad = run_cli(dir, "run --config '" + dir.file("empty.json") + "' --stages everything");
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("unknown stage 'everything'") != std::string::npos);
}

TEST_CASE("simulate requires a seed from the config or the flag" * doctest::skip(!cli_available)) {
    TempDir dir("cliseed");
    write_file(dir.file("sim.json"), simulate_config_json(false));

    CliResult bare = run_cli(dir, "simulate --config '" + dir.file("sim.json") + "' --out '" +
                                      dir.file("bundle") + "'");
    CHECK(bare.exit_code == 1);
    CHECK(bare.output.find("provide a seed") != std::string::npos);

    CliResult seeded = run_cli(dir, "simulate --config '" + dir.file("sim.json") + "' --seed 9 --out '" +
                                        dir.file("bundle") + "'");
    CHECK(seeded.exit_code == 0);
    CHECK(fs::exists(dir.file("bundle/votes.csv")));
}

TEST_CASE("simulate then a full run produce the report artifacts" * doctest::skip(!cli_available)) {
    TempDir dir("clirun");
    write_file(dir.file("sim.json"), simulate_config_json(true));
    REQUIRE(run_cli(dir, "simulate --config '" + dir.file("sim.json") + "'" + " --out '" +
                             dir.file("bundle") + "'")
                .exit_code == 0);

    std::string inputs = " --members '" + dir.file("bundle/members.csv") + "' --votes '" +
                         dir.file("bundle/votes.csv") + "' --retweets '" +
                         dir.file("bundle/retweets.csv") + "'";
    CliResult full = run_cli(dir, "run" + inputs + " --seed 11 --out '" + dir.file("out") + "'");
    CHECK(full.exit_code == 0);
    CHECK(full.output.find("stage report") != std::string::npos);
    for (const char* name : {"pairs_alpha_overall.csv", "fits.csv", "meta.csv", "comparison.json",
                             "manifest.json"}) {
        INFO(name);
        CHECK(fs::exists(fs::path(dir.file("out")) / name));
    }

    // Rerunning one stage without --force refuses to clobber its outputs.
    CliResult clobber = run_cli(dir, "run" + inputs + " --stages alpha --out '" + dir.file("out") + "'");
    CHECK(clobber.exit_code == 1);
    CHECK(clobber.output.find("--force") != std::string::npos);
    CliResult forced =
        run_cli(dir, "run" + inputs + " --stages alpha --force --out '" + dir.file("out") + "'");
    CHECK(forced.exit_code == 0);

    // A dependent stage alone in a fresh directory reports the missing upstream.
    CliResult fresh = run_cli(dir, "run" + inputs + " --stages report --out '" + dir.file("out2") + "'");
    CHECK(fresh.exit_code == 1);
    CHECK(fresh.output.find("run the 'alpha' stage first") != std::string::npos);

    // Environment override with a bogus value is rejected up front.
    CliResult env = run_cli(dir, "run" + inputs + " --stages ergm --seed 11 --out '" + dir.file("out3") + "'",
                            "COVOTE_THREADS=lots");
    CHECK(env.exit_code == 1);
    CHECK(env.output.find("COVOTE_THREADS") != std::string::npos);
}

TEST_CASE("ingest normalizes a bundle and reports counts" * doctest::skip(!cli_available)) {
    TempDir dir("cliingest");
    write_file(dir.file("sim.json"), simulate_config_json(true));
    REQUIRE(run_cli(dir, "simulate --config '" + dir.file("sim.json") + "' --out '" +
                             dir.file("bundle") + "'")
                .exit_code == 0);

    CliResult ingest = run_cli(dir, "ingest --members '" + dir.file("bundle/members.csv") +
                                        "' --votes '" + dir.file("bundle/votes.csv") + "' --out '" +
                                        dir.file("canon") + "'");
    CHECK(ingest.exit_code == 0);
    CHECK(ingest.output.find("ingest: 12 members") != std::string::npos);
    CHECK(fs::exists(dir.file("canon/ingest_report.json")));
}

TEST_CASE("estimation failure on every roll-call exits with code 2" * doctest::skip(!cli_available)) {
    TempDir dir("cliexit2");
    write_file(dir.file("members.csv"),
               "id,full_name,group,country,national_party,twitter_handle,active_from,active_to\n"
               "m1,Alice,G1,XX,P1,,2019-07-02,2024-07-15\n"
               "m2,Bob,G2,XX,P2,,2019-07-02,2024-07-15\n");
    write_file(dir.file("votes.csv"),
               "rollcall_id,date,policy_area,voter_id,voter_name,value\n"
               "r1,2020-01-10,Trade,m1,Alice,Abstain\n"
               "r1,2020-01-10,Trade,m2,Bob,Absent\n");

    CliResult result = run_cli(dir, "run --members '" + dir.file("members.csv") + "' --votes '" +
                                        dir.file("votes.csv") + "' --stages ergm --seed 3 --out '" +
                                        dir.file("out") + "'");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("no roll-call fit yielded usable coefficients") != std::string::npos);
    CHECK(fs::exists(dir.file("out/fits.csv")));
}
