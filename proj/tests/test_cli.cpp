#include <doctest.h>

#include <sys/wait.h>

#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>

#include "support/temp.hpp"

using nlohmann::json;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

std::string cli_path() {
    if (const char* env = std::getenv("TSART_CLI_PATH")) return env;
#ifdef TSART_CLI_PATH
    return TSART_CLI_PATH;
#else
    return "";
#endif
}

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI with the temp dir as working directory, capturing streams.
CliResult run_cli(const TempDir& dir, const std::string& tag, const std::string& args) {
    unsetenv("TSART_API_BASE");
    unsetenv("TSART_API_KEY");
    unsetenv("TSART_MODEL");
    const std::string binary = cli_path();
    REQUIRE_FALSE(binary.empty());
    const std::string out = dir.file(tag + ".stdout");
    const std::string err = dir.file(tag + ".stderr");
    const std::string command = "cd '" + dir.path().string() + "' && '" + binary + "' " + args +
                                " >'" + out + "' 2>'" + err + "'";
    const int raw = std::system(command.c_str());
    CliResult result;
    if (raw != -1 && WIFEXITED(raw)) result.status = WEXITSTATUS(raw);
    result.out = testsupport::read_file(out);
    result.err = testsupport::read_file(err);
    return result;
}

const char* kMockEpisode =
    R"json(["Thought: look\nAction: tool: [series_info], tool_input: {}",
            "Final Answer: six points"])json";

}  // namespace

TEST_CASE("cli: tools lists the catalogue") {
    TempDir dir;
    CliResult r = run_cli(dir, "tools", "tools");
    CHECK(r.status == 0);
    CHECK(r.out.find("series_info") != std::string::npos);
    CHECK(r.out.find("anomaly_detection") != std::string::npos);
    CHECK(r.out.find("forecaster") != std::string::npos);
}

TEST_CASE("cli: analyze runs one tool and prints its payload") {
    TempDir dir;
    write_file(dir.file("series.json"), "[1, 2, 3, 4, 5, 6]");

    SUBCASE("happy path") {
        CliResult r = run_cli(dir, "analyze",
                              "analyze --series series.json --tool summary_stats "
                              "--args '{\"start\":0,\"end\":6,\"stat\":\"mean\"}'");
        CHECK(r.status == 0);
        json payload = json::parse(r.out);
        CHECK(payload.at("results").at("channel_0").get<double>() == doctest::Approx(3.5));
    }
    SUBCASE("csv input by extension") {
        write_file(dir.file("series.csv"), "1.5\n2.5\n3.5\n");
        CliResult r = run_cli(dir, "analyze-csv",
                              "analyze --series series.csv --tool quantile_value "
                              "--args '{\"q\":0.5}'");
        CHECK(r.status == 0);
        json payload = json::parse(r.out);
        CHECK(payload.at("results").at("channel_0").get<double>() == doctest::Approx(2.5));
    }
    SUBCASE("unknown tool exits 1") {
        CliResult r = run_cli(dir, "analyze-bad-tool",
                              "analyze --series series.json --tool spectrogram");
        CHECK(r.status == 1);
        CHECK(r.err.find("unknown tool: spectrogram") != std::string::npos);
        CHECK(r.err.find("series_info") != std::string::npos);
    }
    SUBCASE("tool errors exit 2") {
        CliResult r = run_cli(dir, "analyze-tool-error",
                              "analyze --series series.json --tool autocorr "
                              "--args '{\"lag\":100}'");
        CHECK(r.status == 2);
        CHECK(r.err.find("tool error:") != std::string::npos);
    }
    SUBCASE("non-object args exit 1") {
        CliResult r = run_cli(dir, "analyze-bad-args",
                              "analyze --series series.json --tool series_info --args '[1]'");
        CHECK(r.status == 1);
        CHECK(r.err.find("JSON object") != std::string::npos);
    }
    SUBCASE("missing required flags exit nonzero") {
        CliResult r = run_cli(dir, "analyze-missing", "analyze --tool series_info");
        CHECK(r.status != 0);
    }
}

TEST_CASE("cli: agent answers from a scripted model") {
    TempDir dir;
    write_file(dir.file("series.json"), "[1, 2, 3, 4, 5, 6]");
    write_file(dir.file("mock.json"), kMockEpisode);

    SUBCASE("a finished episode exits 0 and prints the answer") {
        CliResult r = run_cli(dir, "agent-ok",
                              "agent --series series.json --question 'How many points?' "
                              "--mock mock.json --out trajectory.jsonl");
        CHECK(r.status == 0);
        CHECK(r.out.find("Final Answer:\nsix points") != std::string::npos);
        CHECK(r.out.find("tool: [series_info], output:") != std::string::npos);
        json record = json::parse(testsupport::read_file(dir.file("trajectory.jsonl")));
        CHECK(record.at("final_answer") == "six points");
        CHECK(record.at("steps").size() == 1);
        CHECK(record.contains("series"));
    }
    SUBCASE("a truncated episode exits 4") {
        write_file(dir.file("garbage.json"), R"json(["nope", "still nope", "never"])json");
        CliResult r = run_cli(dir, "agent-truncated",
                              "agent --series series.json --question q --mock garbage.json");
        CHECK(r.status == 4);
        CHECK(r.out.find("episode truncated") != std::string::npos);
    }
    SUBCASE("no endpoint and no mock exits 1") {
        CliResult r = run_cli(dir, "agent-no-endpoint",
                              "agent --series series.json --question q");
        CHECK(r.status == 1);
        CHECK(r.err.find("no endpoint configured") != std::string::npos);
    }
    SUBCASE("an unreachable endpoint exits 3") {
        CliResult r = run_cli(dir, "agent-dead-endpoint",
                              "agent --series series.json --question q "
                              "--api-base http://127.0.0.1:1 --retries 0 --timeout-ms 300");
        CHECK(r.status == 3);
        CHECK(r.err.find("endpoint failure") != std::string::npos);
    }
}

TEST_CASE("cli: collect, validate, and export chain together") {
    TempDir dir;
    write_file(dir.file("samples.jsonl"),
               R"({"query":"Pick A or B.","answer":"A","series":[1,2,3,4,5,6,7,8]})"
               "\n"
               R"({"query":"Pick A or B.","answer":"A","series":[1,2,3,4,5,6,7,8]})"
               "\n");
    write_file(dir.file("mock.json"),
               R"json([["Thought: check\nAction: tool: [series_info], tool_input: {}",
                        "Final Answer: A"],
                       ["Thought: check\nAction: tool: [series_info], tool_input: {}",
                        "Final Answer: B"]])json");
    write_file(dir.file("judgers.json"), R"json([{"name": "yes", "mode": "always_yes"}])json");

    CliResult collect = run_cli(dir, "collect",
                                "collect --samples samples.jsonl --mock mock.json "
                                "--out trajectories.jsonl --seed 7");
    CHECK(collect.status == 0);
    CHECK(collect.out.find("collected 2 trajectories (0 truncated)") != std::string::npos);

    const std::string trajectories = testsupport::read_file(dir.file("trajectories.jsonl"));
    CHECK(trajectories.find("\"final_answer\":\"A\"") != std::string::npos);
    CHECK(trajectories.find("\"final_answer\":\"B\"") != std::string::npos);

    json manifest = json::parse(testsupport::read_file(dir.file("trajectories.jsonl.manifest.json")));
    CHECK(manifest.at("command") == "collect");
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("counts").at("trajectories") == 2);

    CliResult validate = run_cli(dir, "validate",
                                 "validate --in trajectories.jsonl --judgers judgers.json "
                                 "--out verdicts.jsonl --kept-out kept.jsonl --seed 7");
    CHECK(validate.status == 0);
    CHECK(validate.out.find("kept 1") != std::string::npos);

    std::istringstream verdict_lines(testsupport::read_file(dir.file("verdicts.jsonl")));
    std::string line;
    REQUIRE(std::getline(verdict_lines, line));
    json first = json::parse(line);
    CHECK(first.at("answer_flag") == true);
    CHECK(first.at("kept") == true);
    REQUIRE(first.at("votes").size() == 1);
    CHECK(first["votes"][0].at("judger") == "yes");
    CHECK(first["votes"][0].at("vote") == true);
    REQUIRE(std::getline(verdict_lines, line));
    json second = json::parse(line);
    CHECK(second.at("answer_flag") == false);
    CHECK(second.at("kept") == false);
    CHECK(second.at("votes").empty());

    CliResult exported = run_cli(dir, "export",
                                 "export --stage 2 --in kept.jsonl --out stage2.json --seed 7");
    CHECK(exported.status == 0);
    json stage2 = json::parse(testsupport::read_file(dir.file("stage2.json")));
    REQUIRE(stage2.is_array());
    REQUIRE(stage2.size() == 1);
    const json& turns = stage2[0].at("conversations");
    CHECK(turns[0].at("from") == "human");
    CHECK(turns[0].at("value") == "Pick A or B.");
    CHECK(turns[turns.size() - 1].at("from") == "function_call");
}

TEST_CASE("cli: eval reports accuracy over a task file") {
    TempDir dir;
    write_file(dir.file("tasks.jsonl"),
               R"({"query":"Pick.","answer":"A","series":[1,2,3,4,5,6,7,8]})"
               "\n"
               R"({"query":"Pick.","answer":"A","series":[1,2,3,4,5,6,7,8]})"
               "\n");
    write_file(dir.file("mock.json"),
               R"json([["Final Answer: A"], ["Final Answer: B"]])json");

    CliResult r = run_cli(dir, "eval",
                          "eval --tasks tasks.jsonl --mock mock.json --out report.json");
    CHECK(r.status == 0);
    CHECK(r.out.find("scored 2/2") != std::string::npos);
    json report = json::parse(testsupport::read_file(dir.file("report.json")));
    CHECK(report.at("total") == 2);
    CHECK(report.at("scored") == 2);
    CHECK(report.at("accuracy").get<double>() == doctest::Approx(0.5));

    SUBCASE("without --out the report goes to stdout") {
        CliResult direct = run_cli(dir, "eval-stdout",
                                   "eval --tasks tasks.jsonl --mock mock.json");
        CHECK(direct.status == 0);
        json doc = json::parse(direct.out);
        CHECK(doc.at("total") == 2);
    }
}
