#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "biorag/corpus.hpp"

namespace biorag {

struct MeshTerm {
    std::string label;                      // canonical heading
    std::vector<std::string> tree_numbers;  // sorted, deduplicated
};

// Immutable after load; safe to share across threads.
class MeshVocabulary {
public:
    // One term per line: "label<TAB>tree;tree;...". Duplicate labels merge
    // their tree numbers. Blank lines are skipped; a non-blank line without a
    // TAB raises ParseError with its line number.
    static MeshVocabulary load(std::istream& in);
    static MeshVocabulary load_file(const std::string& path);

    bool contains(const std::string& label) const;
    const MeshTerm* find(const std::string& label) const;
    const std::vector<MeshTerm>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    // Adds every label whose tree number extends a tree number of an input
    // label. Used by the off-by-default hierarchy expansion option.
    std::vector<std::string> expand_with_descendants(
        const std::vector<std::string>& labels) const;

    std::string version = "fixture";

private:
    std::vector<MeshTerm> terms_;  // input order of first occurrence
    std::unordered_map<std::string, size_t> by_label_;
};

enum class MeshPredictorKind { Scripted, LexicalBaseline, Remote };

struct MeshPredictorSpec {
    std::string name;
    MeshPredictorKind kind = MeshPredictorKind::LexicalBaseline;
    std::string fixture_path;  // scripted
    std::string endpoint;      // remote
};

// Question -> MeSH labels contract (the trained predictor is pluggable; the
// implementations below are deterministic stand-ins).
class MeshPredictor {
public:
    virtual ~MeshPredictor() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::string> predict(const std::string& question,
                                             const MeshVocabulary& vocab) = 0;
};

// Fixture-driven predictor: line-delimited JSON {"question": ..., "mesh": [...]}.
// Unknown questions predict nothing.
class ScriptedMeshPredictor : public MeshPredictor {
public:
    static ScriptedMeshPredictor load_file(const std::string& path);
    static ScriptedMeshPredictor load(std::istream& in);

    void add(const std::string& question, std::vector<std::string> mesh);
    std::string name() const override { return "scripted"; }
    std::vector<std::string> predict(const std::string& question,
                                     const MeshVocabulary& vocab) override;

private:
    std::unordered_map<std::string, std::vector<std::string>> by_question_;
};

// Returns every vocabulary label appearing case-insensitively as a substring
// of the question, ordered by descending label length then alphabetically.
class LexicalMeshPredictor : public MeshPredictor {
public:
    std::string name() const override { return "lexical-baseline"; }
    std::vector<std::string> predict(const std::string& question,
                                     const MeshVocabulary& vocab) override;
};

// POST {"question": ...} -> {"mesh": [...]}; endpoint from config or
// BIORAG_MESH_ENDPOINT.
class RemoteMeshPredictor : public MeshPredictor {
public:
    explicit RemoteMeshPredictor(std::string endpoint);
    std::string name() const override { return "remote"; }
    std::vector<std::string> predict(const std::string& question,
                                     const MeshVocabulary& vocab) override;

private:
    std::string endpoint_;
};

std::unique_ptr<MeshPredictor> make_mesh_predictor(const MeshPredictorSpec& spec);

// Validates the question, dedups predictions (order preserved) and drops
// out-of-vocabulary labels with a logged warning.
std::vector<std::string> predict_mesh(MeshPredictor& predictor, const std::string& question,
                                      const MeshVocabulary& vocab);

enum class MeshFilterMode { AnyOf, MatchAll };

// OR-of-equality predicate over MeSH labels. mode == MatchAll iff terms is
// empty (an abstaining predictor degrades to pure vector search).
struct MeshFilter {
    std::vector<std::string> terms;
    MeshFilterMode mode = MeshFilterMode::MatchAll;

    static MeshFilter match_all() { return {}; }

    // Human-readable form used in traces and the execute prompt, e.g.
    //   filtered by: [eq("MeSH", "Adaptive Immunity") or eq("MeSH", "Animals")]
    std::string describe() const;
};

MeshFilter build_filter(const std::vector<std::string>& labels);

// MatchAll -> true; AnyOf -> true iff the document shares at least one MeSH
// term with the filter (exact label equality).
bool filter_matches(const MeshFilter& filter, const CleanDocument& doc);

}  // namespace biorag
