#include "biorag/eval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "biorag/errors.hpp"

namespace biorag {

namespace {

std::string trim_copy(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\n\r\f\v");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\n\r\f\v");
    return s.substr(begin, end - begin + 1);
}

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_internal_whitespace(const std::string& s) {
    std::string out;
    bool in_run = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_run = true;
            continue;
        }
        if (in_run && !out.empty()) out.push_back(' ');
        in_run = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

bool is_terminal_punct(unsigned char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

}  // namespace

const char* task_kind_name(TaskKind task) {
    switch (task) {
        case TaskKind::ExactMatch: return "ExactMatch";
        case TaskKind::GeneDiseaseRecall: return "GeneDiseaseRecall";
        case TaskKind::ProteinCodingBoolean: return "ProteinCodingBoolean";
        case TaskKind::MultipleChoice: return "MultipleChoice";
    }
    return "?";
}

std::optional<TaskKind> parse_task_kind(const std::string& name) {
    for (TaskKind task : {TaskKind::ExactMatch, TaskKind::GeneDiseaseRecall,
                          TaskKind::ProteinCodingBoolean, TaskKind::MultipleChoice}) {
        if (name == task_kind_name(task)) return task;
    }
    return std::nullopt;
}

std::vector<QaExample> load_dataset(std::istream& in, TaskKind task) {
    std::vector<QaExample> examples;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("question") ||
            !j.contains("gold") || !j["gold"].is_array()) {
            throw ParseError(line_no, "expected {\"id\": ..., \"question\": ..., \"gold\": [...]}");
        }
        QaExample example;
        example.id = j["id"].get<std::string>();
        example.question = j["question"].get<std::string>();
        for (const auto& g : j["gold"]) example.gold.push_back(g.get<std::string>());
        if (example.gold.empty()) throw ParseError(line_no, "gold list must be nonempty");
        example.task = task;
        examples.push_back(std::move(example));
    }
    return examples;
}

std::vector<QaExample> load_dataset_file(const std::string& path, TaskKind task) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);
    return load_dataset(in, task);
}

const std::map<std::string, std::string>& species_informal_table() {
    // Latin -> informal mapping, matched case-insensitively after trimming.
    // Mirrored by the fixture at data/species_informal.tsv.
    static const std::map<std::string, std::string> table = {
        {"homo sapiens", "human"},
        {"mus musculus", "mouse"},
        {"rattus norvegicus", "rat"},
        {"danio rerio", "zebrafish"},
        {"drosophila melanogaster", "fruit fly"},
        {"caenorhabditis elegans", "roundworm"},
        {"saccharomyces cerevisiae", "yeast"},
        {"arabidopsis thaliana", "thale cress"},
        {"gallus gallus", "chicken"},
        {"bos taurus", "cattle"},
        {"sus scrofa", "pig"},
        {"canis lupus familiaris", "dog"},
        {"felis catus", "cat"},
        {"macaca mulatta", "rhesus macaque"},
        {"pan troglodytes", "chimpanzee"},
        {"xenopus laevis", "african clawed frog"},
        {"oryza sativa", "rice"},
        {"zea mays", "maize"},
        {"escherichia coli", "e. coli"},
    };
    return table;
}

std::string normalize_answer(const std::string& raw, TaskKind task,
                             const NormalizeOptions& opts) {
    std::string s = trim_copy(raw);
    if (opts.strict) return s;

    while (!s.empty() && is_terminal_punct(static_cast<unsigned char>(s.back()))) s.pop_back();
    s = collapse_internal_whitespace(trim_copy(s));

    if (task == TaskKind::ProteinCodingBoolean) {
        std::string folded = to_lower(s);
        if (folded == "yes") return "TRUE";
        if (folded == "no") return "NA";
        auto it = species_informal_table().find(folded);
        if (it != species_informal_table().end()) return it->second;
    }
    return s;
}

double score_example(const Prediction& predicted, const QaExample& example,
                     const NormalizeOptions& opts) {
    if (example.task == TaskKind::GeneDiseaseRecall) {
        std::unordered_set<std::string> predicted_set;
        for (const std::string& value : predicted.values) {
            predicted_set.insert(normalize_answer(value, example.task, opts));
        }
        std::unordered_set<std::string> gold_set(example.gold.begin(), example.gold.end());
        size_t matched = 0;
        for (const std::string& gold : gold_set) {
            if (predicted_set.contains(gold)) ++matched;
        }
        return gold_set.empty() ? 0.0
                                : static_cast<double>(matched) / static_cast<double>(gold_set.size());
    }

    if (predicted.values.empty()) return 0.0;
    std::string normalized = normalize_answer(predicted.values.front(), example.task, opts);
    for (const std::string& gold : example.gold) {
        if (normalized == gold) return 1.0;
    }
    return 0.0;
}

ScoreReport evaluate_run(const std::vector<QaExample>& examples,
                         const std::map<std::string, Prediction>& predictions,
                         const NormalizeOptions& opts) {
    if (examples.empty()) throw EmptyDatasetError();

    ScoreReport report;
    report.n = examples.size();
    std::map<std::string, std::pair<double, size_t>> sums;  // task -> (sum, count)
    for (const QaExample& example : examples) {
        ExampleScore entry;
        entry.id = example.id;
        auto it = predictions.find(example.id);
        if (it == predictions.end()) {
            entry.score = 0.0;
            entry.missing_prediction = true;
        } else {
            entry.score = score_example(it->second, example, opts);
        }
        auto& [sum, count] = sums[task_kind_name(example.task)];
        sum += entry.score;
        count += 1;
        report.per_example.push_back(std::move(entry));
    }
    for (const auto& [task, sum_count] : sums) {
        report.per_task[task] = sum_count.first / static_cast<double>(sum_count.second);
    }
    return report;
}

std::map<std::string, Prediction> load_predictions(std::istream& in) {
    std::map<std::string, Prediction> predictions;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("predicted")) {
            throw ParseError(line_no, "expected {\"id\": ..., \"predicted\": ...}");
        }
        Prediction prediction;
        const auto& value = j["predicted"];
        if (value.is_string()) {
            prediction.values.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            for (const auto& v : value) prediction.values.push_back(v.get<std::string>());
        } else {
            throw ParseError(line_no, "predicted must be text or a list of text");
        }
        predictions[j["id"].get<std::string>()] = std::move(prediction);
    }
    return predictions;
}

std::map<std::string, Prediction> load_predictions_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open predictions file: " + path);
    return load_predictions(in);
}

nlohmann::ordered_json score_report_to_json(const ScoreReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["per_task"] = nlohmann::ordered_json::object();
    for (const auto& [task, mean] : report.per_task) j["per_task"][task] = mean;
    j["per_example"] = nlohmann::ordered_json::array();
    for (const ExampleScore& entry : report.per_example) {
        nlohmann::ordered_json e;
        e["id"] = entry.id;
        e["score"] = entry.score;
        if (entry.missing_prediction) e["missing_prediction"] = true;
        j["per_example"].push_back(std::move(e));
    }
    return j;
}

}  // namespace biorag
