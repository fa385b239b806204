#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "json.hpp"

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(BIORAG_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path make_temp_dir() {
    fs::path dir = fs::temp_directory_path() /
                   ("biorag_cli_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(std::rand()));
    fs::create_directories(dir);
    return dir;
}

std::string ask_config_json(const fs::path& index_path) {
    nlohmann::json config = {
        {"max_iterations", 15},
        {"index_path", index_path.string()},
        {"mesh_vocab_path", testutil::fixture_path("mesh_vocab.tsv")},
        {"mesh_predictor",
         {{"kind", "scripted"}, {"fixture", testutil::fixture_path("mesh_scripted.jsonl")}}},
        {"retrievers",
         {{"mode", "replay"},
          {"entity_cassette", testutil::fixture_path("cassettes/entity.jsonl")},
          {"web_cassette", testutil::fixture_path("cassettes/web.jsonl")}}},
        {"backend",
         {{"kind", "scripted"},
          {"script",
           {"Web Search", "innate vs adaptive immunity overview", "NO",
            "PubMed local vector database",
            "What are the differences between innate immunity and adaptive immunity?", "YES",
            "Adaptive immunity is antigen-specific; innate immunity is immediate."}}}},
    };
    return config.dump(2);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("unknown subcommand prints usage and exits nonzero") {
    CliResult result = run_cli("frobnicate");
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("Run with --help") != std::string::npos);
}

TEST_CASE("missing required flags exit nonzero with usage text") {
    CliResult result = run_cli("ingest");
    CHECK(result.exit_code == 1);
    CHECK(result.output.find("--input") != std::string::npos);

    CliResult bare = run_cli("");
    CHECK(bare.exit_code == 1);
}

TEST_CASE("ingest/index/ask/eval end to end") {
    fs::path dir = make_temp_dir();
    fs::path corpus = dir / "corpus.jsonl";
    fs::path stats = dir / "stats.json";
    fs::path index_path = dir / "corpus.idx";

    CliResult ingest = run_cli("ingest --input " + testutil::fixture_path("raw_records.jsonl") +
                               " --output " + corpus.string() + " --stats " + stats.string());
    CHECK(ingest.exit_code == 0);
    auto stats_json = nlohmann::json::parse(testutil::read_file(stats.string()));
    CHECK(stats_json["input_count"] == 100);
    CHECK(stats_json["accepted_count"] == 70);
    CHECK(stats_json["rejected_count"] == 30);

    CliResult index = run_cli("index --corpus " + corpus.string() + " --out " +
                              index_path.string());
    CHECK(index.exit_code == 0);
    CHECK(index.output.find("indexed 70 documents") != std::string::npos);

    // ask against the small fixture index (rebuilt from corpus_small for the
    // scripted session), twice: byte-identical output.
    fs::path small_index = dir / "small.idx";
    CliResult small = run_cli("index --corpus " + testutil::fixture_path("corpus_small.jsonl") +
                              " --out " + small_index.string());
    CHECK(small.exit_code == 0);

    fs::path config_path = dir / "ask.json";
    std::ofstream(config_path) << ask_config_json(small_index);

    std::string ask_cmd = "ask \"What are the differences between innate immunity and "
                          "adaptive immunity?\" --config " + config_path.string() + " --trace";
    CliResult first = run_cli(ask_cmd);
    CHECK(first.exit_code == 0);
    CHECK(first.output.find("Adaptive immunity is antigen-specific") != std::string::npos);
    CHECK(first.output.find("iterations=2 exhausted=false") != std::string::npos);

    CliResult second = run_cli(ask_cmd);
    CHECK(second.output == first.output);

    CliResult eval = run_cli("eval --dataset " +
                             testutil::fixture_path("datasets/exact_match.jsonl") +
                             " --task ExactMatch --predictions " +
                             testutil::fixture_path("datasets/exact_match_predictions.jsonl"));
    CHECK(eval.exit_code == 0);
    auto report = nlohmann::json::parse(eval.output);
    CHECK(report["per_task"]["ExactMatch"] == 0.7);
    CHECK(report["n"] == 20);

    fs::remove_all(dir);
}

TEST_CASE("runtime failures exit with code 2") {
    CliResult result = run_cli("index --corpus /nonexistent/corpus.jsonl --out /tmp/x.idx");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("error:") != std::string::npos);

    CliResult bad_task = run_cli("eval --dataset x --task NotATask --predictions y");
    CHECK(bad_task.exit_code == 2);
    CHECK(bad_task.output.find("unknown task kind") != std::string::npos);
}

}  // TEST_SUITE
