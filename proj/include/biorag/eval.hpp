#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace biorag {

enum class TaskKind { ExactMatch, GeneDiseaseRecall, ProteinCodingBoolean, MultipleChoice };
const char* task_kind_name(TaskKind task);
std::optional<TaskKind> parse_task_kind(const std::string& name);

struct QaExample {
    std::string id;
    std::string question;
    std::vector<std::string> gold;  // nonempty; singleton for exact tasks
    TaskKind task = TaskKind::ExactMatch;
};

// Dataset lines: {"id": ..., "question": ..., "gold": [...]}. An empty gold
// list is a ParseError.
std::vector<QaExample> load_dataset(std::istream& in, TaskKind task);
std::vector<QaExample> load_dataset_file(const std::string& path, TaskKind task);

struct NormalizeOptions {
    bool strict = false;  // trim only, no further normalization
};

// trim -> strip terminal punctuation -> collapse internal whitespace; for
// ProteinCodingBoolean additionally yes/no -> TRUE/NA and Latin species names
// -> informal names (bundled table). Idempotent.
std::string normalize_answer(const std::string& raw, TaskKind task,
                             const NormalizeOptions& opts = {});

// Latin name (lowercased key) -> informal name.
const std::map<std::string, std::string>& species_informal_table();

struct Prediction {
    std::vector<std::string> values;  // single-answer tasks use values[0]
};

// Exact tasks: 1 if the normalized prediction equals any gold element, else
// 0. GeneDiseaseRecall: |predicted ∩ gold| / |gold| on exact element matches.
double score_example(const Prediction& predicted, const QaExample& example,
                     const NormalizeOptions& opts = {});

struct ExampleScore {
    std::string id;
    double score = 0.0;
    bool missing_prediction = false;
};

struct ScoreReport {
    std::map<std::string, double> per_task;  // task name -> mean score
    std::vector<ExampleScore> per_example;
    size_t n = 0;
};

// Missing predictions score 0 and are flagged. Throws EmptyDatasetError on an
// empty example list.
ScoreReport evaluate_run(const std::vector<QaExample>& examples,
                         const std::map<std::string, Prediction>& predictions,
                         const NormalizeOptions& opts = {});

// Predictions file: {"id": ..., "predicted": "text"} or {"predicted": [...]}.
std::map<std::string, Prediction> load_predictions(std::istream& in);
std::map<std::string, Prediction> load_predictions_file(const std::string& path);

nlohmann::ordered_json score_report_to_json(const ScoreReport& report);

}  // namespace biorag
