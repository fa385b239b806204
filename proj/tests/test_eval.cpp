#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "biorag/errors.hpp"
#include "biorag/eval.hpp"
#include "test_util.hpp"

using namespace biorag;

namespace {

QaExample make_example(std::string id, std::vector<std::string> gold, TaskKind task) {
    QaExample example;
    example.id = std::move(id);
    example.question = "q";
    example.gold = std::move(gold);
    example.task = task;
    return example;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("load_dataset reads line-delimited examples in file order") {
    std::istringstream in(
        "{\"id\":\"a\",\"question\":\"q1\",\"gold\":[\"x\"]}\n"
        "{\"id\":\"b\",\"question\":\"q2\",\"gold\":[\"y\",\"z\"]}\n"
        "{\"id\":\"c\",\"question\":\"q3\",\"gold\":[\"w\"]}\n");
    auto examples = load_dataset(in, TaskKind::ExactMatch);
    REQUIRE(examples.size() == 3);
    CHECK(examples[0].id == "a");
    CHECK(examples[2].id == "c");
    CHECK(examples[1].gold.size() == 2);
    CHECK(examples[0].task == TaskKind::ExactMatch);
}

TEST_CASE("load_dataset rejects an empty gold list with the line number") {
    std::istringstream in(
        "{\"id\":\"a\",\"question\":\"q\",\"gold\":[\"x\"]}\n"
        "{\"id\":\"b\",\"question\":\"q\",\"gold\":[]}\n");
    try {
        load_dataset(in, TaskKind::ExactMatch);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("fixture datasets load 20 examples each") {
    CHECK(load_dataset_file(testutil::fixture_path("datasets/exact_match.jsonl"),
                            TaskKind::ExactMatch).size() == 20);
    CHECK(load_dataset_file(testutil::fixture_path("datasets/gene_disease_recall.jsonl"),
                            TaskKind::GeneDiseaseRecall).size() == 20);
}

TEST_CASE("a 50-pair task file loads 50 examples") {
    std::ostringstream lines;
    for (int i = 0; i < 50; ++i) {
        lines << "{\"id\":\"t" << i << "\",\"question\":\"q" << i
              << "\",\"gold\":[\"chr" << (i % 22) + 1 << "\"]}\n";
    }
    std::istringstream in(lines.str());
    CHECK(load_dataset(in, TaskKind::ExactMatch).size() == 50);
}

TEST_CASE("normalize_answer boolean mapping") {
    CHECK(normalize_answer("yes", TaskKind::ProteinCodingBoolean) == "TRUE");
    CHECK(normalize_answer("No.", TaskKind::ProteinCodingBoolean) == "NA");
    CHECK(normalize_answer("YES!", TaskKind::ProteinCodingBoolean) == "TRUE");
    CHECK(normalize_answer("  no  ", TaskKind::ProteinCodingBoolean) == "NA");
}

TEST_CASE("normalize_answer species mapping from the bundled table") {
    CHECK(normalize_answer("Homo sapiens", TaskKind::ProteinCodingBoolean) == "human");
    CHECK(normalize_answer("Mus musculus.", TaskKind::ProteinCodingBoolean) == "mouse");
    CHECK(normalize_answer("homo  sapiens", TaskKind::ProteinCodingBoolean) == "human");
}

TEST_CASE("species table stays in sync with the shipped fixture") {
    std::string fixture = testutil::read_file(std::string(BIORAG_FIXTURE_DIR) +
                                              "/../../data/species_informal.tsv");
    std::istringstream in(fixture);
    std::string line;
    size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        REQUIRE(tab != std::string::npos);
        std::string latin = line.substr(0, tab);
        std::string informal = line.substr(tab + 1);
        std::transform(latin.begin(), latin.end(), latin.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        auto it = species_informal_table().find(latin);
        REQUIRE(it != species_informal_table().end());
        CHECK(it->second == informal);
        ++rows;
    }
    CHECK(rows == species_informal_table().size());
}

TEST_CASE("normalize_answer trims, strips terminal punctuation, collapses whitespace") {
    CHECK(normalize_answer("  chr12.  ", TaskKind::ExactMatch) == "chr12");
    CHECK(normalize_answer("two   words", TaskKind::ExactMatch) == "two words");
    CHECK(normalize_answer("plain", TaskKind::MultipleChoice) == "plain");
}

TEST_CASE("strict mode trims only") {
    NormalizeOptions strict;
    strict.strict = true;
    CHECK(normalize_answer(" yes. ", TaskKind::ProteinCodingBoolean, strict) == "yes.");
    CHECK(normalize_answer(" chr12. ", TaskKind::ExactMatch, strict) == "chr12.");
}

TEST_CASE("normalize_answer is idempotent") {
    std::mt19937 rng(77);
    const char* samples[] = {"yes", "No.", "Homo sapiens", "chr12", "  padded  ", "a  b c.",
                             "TRUE", "NA", "human", "Mus musculus", "maybe?", "x;"};
    for (TaskKind task : {TaskKind::ExactMatch, TaskKind::GeneDiseaseRecall,
                          TaskKind::ProteinCodingBoolean, TaskKind::MultipleChoice}) {
        for (const char* sample : samples) {
            std::string once = normalize_answer(sample, task);
            CHECK(normalize_answer(once, task) == once);
        }
        for (int i = 0; i < 200; ++i) {
            std::string s;
            for (int j = 0; j < 12; ++j) {
                s += static_cast<char>(' ' + rng() % 90);
            }
            std::string once = normalize_answer(s, task);
            CHECK(normalize_answer(once, task) == once);
        }
    }
}

TEST_CASE("score_example exact-match semantics") {
    QaExample example = make_example("e", {"chr12"}, TaskKind::ExactMatch);
    CHECK(score_example({{"chr12"}}, example) == 1.0);
    CHECK(score_example({{"12"}}, example) == 0.0);
    CHECK(score_example({{"chr12."}}, example) == 1.0);
    CHECK(score_example({{}}, example) == 0.0);

    QaExample aliases = make_example("a", {"PSMB10", "LMP10"}, TaskKind::ExactMatch);
    CHECK(score_example({{"LMP10"}}, aliases) == 1.0);  // any gold element counts
}

TEST_CASE("score_example recall semantics") {
    QaExample example = make_example("g", {"G1", "G2", "G3", "G4"}, TaskKind::GeneDiseaseRecall);
    CHECK(score_example({{"G1", "G2", "X"}}, example) == 0.5);
    CHECK(score_example({{"G1", "G2", "G3", "G4"}}, example) == 1.0);
    CHECK(score_example({{"X", "Y"}}, example) == 0.0);
    CHECK(score_example({{"G1", "G1", "G1"}}, example) == 0.25);  // duplicates count once
}

TEST_CASE("recall is monotone in correct predictions and stable under wrong ones") {
    std::mt19937 rng(31);
    QaExample example =
        make_example("g", {"G1", "G2", "G3", "G4", "G5"}, TaskKind::GeneDiseaseRecall);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> predicted;
        for (int j = 0; j < static_cast<int>(rng() % 5); ++j) {
            predicted.push_back("G" + std::to_string(1 + rng() % 5));
        }
        double base = score_example({predicted}, example);

        auto plus_correct = predicted;
        plus_correct.push_back("G" + std::to_string(1 + rng() % 5));
        CHECK(score_example({plus_correct}, example) >= base);

        auto plus_wrong = predicted;
        plus_wrong.push_back("WRONG" + std::to_string(rng() % 100));
        CHECK(score_example({plus_wrong}, example) == base);
    }
}

TEST_CASE("evaluate_run aggregates per task with missing predictions flagged") {
    std::vector<QaExample> examples = {
        make_example("a", {"x"}, TaskKind::ExactMatch),
        make_example("b", {"x"}, TaskKind::ExactMatch),
        make_example("c", {"x"}, TaskKind::ExactMatch),
        make_example("d", {"x"}, TaskKind::ExactMatch),
    };
    std::map<std::string, Prediction> predictions = {
        {"a", {{"x"}}}, {"b", {{"x"}}}, {"c", {{"wrong"}}}, {"d", {{"wrong"}}}};
    ScoreReport report = evaluate_run(examples, predictions);
    CHECK(report.n == 4);
    CHECK(report.per_task.at("ExactMatch") == 0.5);

    predictions.erase("d");
    report = evaluate_run(examples, predictions);
    CHECK(report.per_example[3].missing_prediction);
    CHECK(report.per_example[3].score == 0.0);
}

TEST_CASE("evaluate_run keeps tasks separate") {
    std::vector<QaExample> examples = {
        make_example("a", {"x"}, TaskKind::ExactMatch),
        make_example("b", {"x"}, TaskKind::ExactMatch),
        make_example("c", {"G1", "G2"}, TaskKind::GeneDiseaseRecall),
    };
    std::map<std::string, Prediction> predictions = {
        {"a", {{"x"}}}, {"b", {{"no"}}}, {"c", {{"G1"}}}};
    ScoreReport report = evaluate_run(examples, predictions);
    CHECK(report.per_task.size() == 2);
    CHECK(report.per_task.at("ExactMatch") == 0.5);
    CHECK(report.per_task.at("GeneDiseaseRecall") == 0.5);
}

TEST_CASE("evaluate_run means are permutation-invariant") {
    std::vector<QaExample> examples;
    std::map<std::string, Prediction> predictions;
    for (int i = 0; i < 12; ++i) {
        std::string id = "e" + std::to_string(i);
        examples.push_back(make_example(id, {"x"}, TaskKind::MultipleChoice));
        predictions[id] = Prediction{{i % 3 == 0 ? "x" : "y"}};
    }
    double mean = evaluate_run(examples, predictions).per_task.at("MultipleChoice");
    std::mt19937 rng(5);
    for (int round = 0; round < 10; ++round) {
        std::shuffle(examples.begin(), examples.end(), rng);
        CHECK(evaluate_run(examples, predictions).per_task.at("MultipleChoice") == mean);
    }
}

TEST_CASE("empty dataset is an error") {
    CHECK_THROWS_AS(evaluate_run({}, {}), EmptyDatasetError);
}

TEST_CASE("fixture datasets reproduce their hand-computed means") {
    struct Row {
        const char* dataset;
        TaskKind task;
        double mean;
    };
    const Row rows[] = {
        {"exact_match", TaskKind::ExactMatch, 0.7},
        {"gene_disease_recall", TaskKind::GeneDiseaseRecall, 0.5},
        {"protein_coding", TaskKind::ProteinCodingBoolean, 0.8},
        {"multiple_choice", TaskKind::MultipleChoice, 0.6},
    };
    for (const Row& row : rows) {
        auto examples = load_dataset_file(
            testutil::fixture_path(std::string("datasets/") + row.dataset + ".jsonl"), row.task);
        auto predictions = load_predictions_file(testutil::fixture_path(
            std::string("datasets/") + row.dataset + "_predictions.jsonl"));
        ScoreReport report = evaluate_run(examples, predictions);
        CHECK(report.n == 20);
        CHECK(report.per_task.at(task_kind_name(row.task)) == doctest::Approx(row.mean).epsilon(1e-12));
    }
}

TEST_CASE("score_report_to_json shape") {
    std::vector<QaExample> examples = {make_example("a", {"x"}, TaskKind::ExactMatch)};
    std::map<std::string, Prediction> predictions;
    auto j = score_report_to_json(evaluate_run(examples, predictions));
    CHECK(j["n"] == 1);
    CHECK(j["per_example"][0]["missing_prediction"] == true);
    CHECK(j["per_task"]["ExactMatch"] == 0.0);
}

}  // TEST_SUITE
