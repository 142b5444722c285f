#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "support/paths.hpp"

#include "json.hpp"

namespace ts = leap::testsupport;

namespace {

#ifndef LEAP_CLI_PATH
#define LEAP_CLI_PATH "./leap"
#endif

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(LEAP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, got);
    }
    const int status = pclose(pipe);
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    result.exit_code = WEXITSTATUS(status);
    return result;
}

std::string write_text(const std::string& dir, const std::string& name,
                       const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    REQUIRE(out.good());
    return path;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("parse reports the corpus and exits clean") {
    RunResult r = run_cli("parse " + ts::source_path("data/library.leap"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "20 program(s)"));
    CHECK(contains(r.output, "clean_cucumber"));
}

TEST_CASE("parse --json emits a machine-readable report") {
    RunResult r = run_cli("parse --json " + ts::source_path("data/golden/clean_cucumber.leap"));
    CHECK(r.exit_code == 0);
    auto report = nlohmann::json::parse(r.output);
    REQUIRE(report.is_array());
    REQUIRE(report.size() == 1);
    CHECK(report[0].at("programs")[0].at("name") == "clean_cucumber");
    CHECK(report[0].at("errors").empty());
}

TEST_CASE("parse failures carry positions and exit with findings") {
    std::string dir = ts::fresh_temp_dir("cli_parse");
    std::string bad = write_text(dir, "bad.leap",
                                 "def broken_prog(start_t=0, stop_t=1):\n    fling(cup)\n");
    RunResult r = run_cli("parse " + bad);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "bad.leap:2:5: error: unknown_verb"));
}

TEST_CASE("missing input files are an I/O error") {
    RunResult r = run_cli("parse /nonexistent/nowhere.leap");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.output, "cannot read"));
}

TEST_CASE("validate accepts the golden program") {
    RunResult r = run_cli("validate " + ts::source_path("data/golden/clean_cucumber.leap"));
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "clean_cucumber: valid"));
}

TEST_CASE("validate --strict flags unknown preconditions") {
    std::string dir = ts::fresh_temp_dir("cli_validate");
    std::string prog = write_text(dir, "grab.leap",
                                  "def grab_milk(start_t=0, stop_t=1):\n    grasp(milk)\n");
    RunResult strict = run_cli("validate --strict " + prog);
    CHECK(strict.exit_code == 1);
    CHECK(contains(strict.output, "INVALID (1 violation(s))"));
    CHECK(contains(strict.output, "step 0 grasp(milk): requires milk in workspace (found unknown)"));

    RunResult optimistic = run_cli("validate " + prog);
    CHECK(optimistic.exit_code == 0);

    std::string state = write_text(dir, "state.txt", "milk in workspace\nmilk not in hand\n");
    RunResult seeded = run_cli("validate --strict --state " + state + " " + prog);
    CHECK(seeded.exit_code == 0);
}

TEST_CASE("validate rejects bad budgets and bad state files") {
    std::string dir = ts::fresh_temp_dir("cli_validate_cfg");
    std::string prog = write_text(dir, "ok.leap",
                                  "def idle_prog(start_t=0, stop_t=1):\n    wait()\n");
    CHECK(run_cli("validate --fuel 0 " + prog).exit_code == 2);

    std::string state = write_text(dir, "bad_state.txt", "milk floats quickly\n");
    RunResult r = run_cli("validate --state " + state + " " + prog);
    CHECK(r.exit_code == 2);
    CHECK(contains(r.output, "state line 1"));
}

TEST_CASE("plan prints the synthesized program") {
    RunResult r = run_cli("plan --goal 'milk in hand' --emit fetch_milk");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "def fetch_milk(start_t=0, stop_t=0):\n"
                      "    goto(milk)\n"
                      "    grasp(milk)\n");
}

TEST_CASE("plan can call library programs and inlines them") {
    std::string dir = ts::fresh_temp_dir("cli_plan");
    write_text(dir, "handoff.leap",
               "def handoff(start_t=0, stop_t=1):\n"
               "    if milk in hand:\n"
               "        release(milk)\n"
               "    if cup in hand:\n"
               "        release(cup)\n");
    std::string state = write_text(dir, "state.txt",
                                   "milk in hand\nmilk in workspace\n"
                                   "cup in hand\ncup in workspace\n");
    RunResult r = run_cli("plan --state " + state +
                          " --goal 'milk not in hand, cup not in hand'" +
                          " --library " + dir + " --emit freed_hands");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "def freed_hands(start_t=0, stop_t=0):"));
    CHECK(contains(r.output, "# inlined from handoff"));
    CHECK(contains(r.output, "    if milk in hand:"));
}

TEST_CASE("plan distinguishes unreachable goals from bad requests") {
    RunResult no_plan = run_cli("plan --goal 'milk clean' --max-depth 3");
    CHECK(no_plan.exit_code == 1);
    CHECK(contains(no_plan.output, "depth 3"));

    CHECK(run_cli("plan --goal 'milk floats quickly'").exit_code == 2);
    CHECK(run_cli("plan --goal 'milk in hand' --max-depth 0").exit_code == 2);
    CHECK(run_cli("plan --goal ' , '").exit_code == 2);
}

TEST_CASE("compile writes deterministic query files") {
    std::string out_a = ts::fresh_temp_dir("cli_compile_a");
    std::string out_b = ts::fresh_temp_dir("cli_compile_b");
    const std::string bundles = ts::source_path("data/bundles/examples.json");

    RunResult first = run_cli("compile " + bundles + " --out " + out_a);
    CHECK(first.exit_code == 0);
    CHECK(contains(first.output, "query_001.txt (5 stub(s))"));

    RunResult second = run_cli("compile " + bundles + " --out " + out_b);
    CHECK(second.exit_code == 0);
    CHECK(ts::read_file_or_die(out_a + "/query_001.txt") ==
          ts::read_file_or_die(out_b + "/query_001.txt"));

    const std::string text = ts::read_file_or_die(out_a + "/query_001.txt");
    CHECK(text.starts_with("# ----------------------------------------\n"
                           "def wipe_spoon(start_t=0, stop_t=1.63):\n"));
}

TEST_CASE("compile batches queries and checks the batch bound") {
    std::string out = ts::fresh_temp_dir("cli_compile_batch");
    const std::string bundles = ts::source_path("data/bundles/examples.json");
    RunResult r = run_cli("compile " + bundles + " --batch 2 --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "query_001.txt (2 stub(s))"));
    CHECK(contains(r.output, "query_002.txt (2 stub(s))"));
    CHECK(contains(r.output, "query_003.txt (1 stub(s))"));

    CHECK(run_cli("compile " + bundles + " --batch 0 --out " + out).exit_code == 2);
    CHECK(run_cli("compile " + bundles + " --batch 36 --out " + out).exit_code == 2);
}

TEST_CASE("compile surfaces bundle findings") {
    std::string dir = ts::fresh_temp_dir("cli_compile_bad");
    std::string bad = write_text(dir, "bad.json",
                                 R"({"clip_id": "rev_clip", "start_t": 2, "stop_t": 1})");
    RunResult r = run_cli("compile " + bad + " --out " + dir);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "rev_clip: stop_t precedes start_t"));
}

TEST_CASE("stats reproduces the frozen corpus tables") {
    std::string out = ts::fresh_temp_dir("cli_stats");
    RunResult r = run_cli("stats " + ts::source_path("data/library.leap") + " --verbs " +
                          ts::source_path("data/verb_classes.csv") + " --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "20 program(s), 0 parse failure(s)"));
    CHECK(ts::read_file_or_die(out + "/subactions_per_verb.csv") ==
          ts::read_file_or_die(ts::source_path("tests/golden/subactions_per_verb.csv")));
    CHECK(ts::read_file_or_die(out + "/object_frequency.csv") ==
          ts::read_file_or_die(ts::source_path("tests/golden/object_frequency.csv")));
}

TEST_CASE("compare scores a corpus against itself as perfect") {
    const std::string golden = ts::source_path("data/golden/clean_cucumber.leap");
    RunResult r = run_cli("compare " + golden + " " + golden);
    CHECK(r.exit_code == 0);
    CHECK(contains(r.output, "clean_cucumber: containment=1.000 set_equal=yes"));
    CHECK(contains(r.output, "mean over 1 pair(s)"));
}

TEST_CASE("compare reports unmatched programs as findings") {
    std::string dir = ts::fresh_temp_dir("cli_compare");
    std::string pred = write_text(dir, "pred.leap",
                                  "def guessed_prog(start_t=0, stop_t=1):\n    wait()\n");
    std::string gt = write_text(dir, "gt.leap",
                                "def actual_prog(start_t=0, stop_t=1):\n    wait()\n");
    RunResult r = run_cli("compare " + pred + " " + gt);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.output, "actual_prog: no prediction"));
    CHECK(contains(r.output, "guessed_prog: no ground truth"));

    RunResult j = run_cli("compare --json " + pred + " " + gt);
    CHECK(j.exit_code == 1);
    auto report = nlohmann::json::parse(j.output);
    CHECK(report.at("unmatched_ground_truth")[0] == "actual_prog");
    CHECK(report.at("unmatched_predictions")[0] == "guessed_prog");
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("parse").exit_code == 2); // missing required paths
}
